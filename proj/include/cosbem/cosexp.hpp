#pragma once

#include "cosbem/models.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace cosbem::cosexp {

using CharFun = std::function<std::complex<double>(double)>;

// Truncation interval [a, b] of a cosine expansion, in log-price units.
// A width below 1e-12 is a legal but flagged state: dependent integrals
// treat the expansion as carrying no mass instead of dividing by b - a.
struct CosInterval {
    double a;
    double b;

    CosInterval(double a_, double b_) : a(a_), b(b_) {
        if (!(a <= b)) throw std::invalid_argument("CosInterval: requires a <= b");
    }

    double width() const { return b - a; }
    bool collapsed() const { return width() < 1e-12; }
};

// Truncated cosine expansion of a density. Coefficients are stored
// unweighted; the sum-prime convention (first term halved) is applied by
// eval_series and the inner-product helpers, exactly once.
struct CosSeries {
    CosInterval interval;
    std::vector<double> coeffs;
};

// F_n = (2/(b-a)) Re{ exp(-i n a pi/(b-a)) cf(n pi/(b-a)) }, n = 0..n_terms-1.
// A collapsed interval yields all-zero coefficients.
CosSeries cos_coefficients(const CharFun& cf, CosInterval interval, int n_terms);

// sum-prime over F_n cos(n pi (x-a)/(b-a)); x outside [a, b] is permitted,
// callers clip via Heaviside logic.
double eval_series(const CosSeries& s, double x);

// sum-prime over f[n] * v[n] (first term halved).
double half_weighted_dot(std::span<const double> f, std::span<const double> v);

// Black-Scholes expansion interval around `center`:
// a, b = int_s^tau r - sigma^2 (tau-s)/2 -+ L sqrt(sigma^2 (tau-s)) + center.
CosInterval bs_interval(const models::BSParams& p, double s, double tau, double center,
                        double width_l);

// Heston expansion interval from the first two log-price cumulants
// conditioned on start variance v: a, b = c1 -+ L sqrt(c2) + center.
CosInterval heston_interval(const models::HestonParams& p, double dt, double v,
                            double center, double width_l);

// Smallest N with (2/(b-a)) exp(-(sigma pi / (b-a))^2 T N^2 / 2) <= eps.
int estimate_nf_bs(const models::BSParams& p, double horizon, CosInterval interval,
                   double eps);

// Finite tail proxy (2/(b-a)) sum_{n=n_start}^{n_max} |cf(n pi/(b-a))| for the
// series truncation error.
double truncation_error_bound(const CharFun& cf, CosInterval interval, int n_start,
                              int n_max);

// Analytic payoff-times-cosine integrals over the clipped interval
// [max(a, clip_lo), min(b, clip_hi)]; an empty clip yields zeros.
std::vector<double> payoff_coeffs_call(CosInterval interval, double strike, double clip_lo,
                                       double clip_hi, int n_terms);
std::vector<double> payoff_coeffs_cash(CosInterval interval, double clip_lo, double clip_hi,
                                       int n_terms);
// Sine variant (e^y - E) sin(n pi (y-a)/(b-a)) * n pi/(b-a): the term-wise
// d/dx of payoff_coeffs_call under the interval shift a(x) = a0 + x.
std::vector<double> payoff_coeffs_call_dx(CosInterval interval, double strike,
                                          double clip_lo, double clip_hi, int n_terms);

} // namespace cosbem::cosexp
