#pragma once

#include "cosbem/bessel.hpp"

#include <complex>
#include <stdexcept>
#include <vector>

namespace cosbem::models {

// One segment of a piecewise-constant short-rate curve: rate applies from
// t_from until the next breakpoint.
struct RateSegment {
    double t_from;
    double rate;
};

// Black-Scholes parameters with deterministic piecewise-constant rates.
struct BSParams {
    double sigma;
    std::vector<RateSegment> rate_schedule;
    double dividend;

    BSParams(double sigma_, std::vector<RateSegment> schedule, double dividend_ = 0.0)
        : sigma(sigma_), rate_schedule(std::move(schedule)), dividend(dividend_) {
        if (!(sigma > 0.0)) throw std::invalid_argument("BSParams: sigma must be > 0");
        if (rate_schedule.empty())
            throw std::invalid_argument("BSParams: rate schedule must not be empty");
        if (rate_schedule.front().t_from != 0.0)
            throw std::invalid_argument("BSParams: first rate segment must start at t = 0");
        for (std::size_t i = 1; i < rate_schedule.size(); ++i)
            if (!(rate_schedule[i].t_from > rate_schedule[i - 1].t_from))
                throw std::invalid_argument("BSParams: breakpoints must be strictly increasing");
        if (dividend < 0.0) throw std::invalid_argument("BSParams: dividend must be >= 0");
    }

    static BSParams constant_rate(double sigma_, double rate, double dividend_ = 0.0) {
        return BSParams(sigma_, {{0.0, rate}}, dividend_);
    }

    // Schedule seen from the reversed clock tau = horizon - t, so that
    // r_rev(tau) = r(horizon - tau). Exact for piecewise-constant rates.
    BSParams reversed(double horizon) const;
};

// Exact integral of the piecewise-constant rate over [t1, t2].
double integrated_rate(const BSParams& p, double t1, double t2);

// Fourier transform w.r.t. the terminal log-price of the Black-Scholes
// transition density over (s, tau], evaluated from log-price x. Rates are
// integrated on the schedule's own clock.
std::complex<double> bs_charfun(const BSParams& p, double omega, double s, double tau, double x);

// Heston parameters under the risk-neutral measure; the volatility risk
// premium theta is fixed to zero. Construction rejects Feller violations.
struct HestonParams {
    double lambda; // mean-reversion speed
    double vbar;   // long-run variance
    double eta;    // vol-of-vol
    double rho;    // price/variance correlation
    double r;      // risk-free rate
    double delta;  // dividend yield

    HestonParams(double lambda_, double vbar_, double eta_, double rho_, double r_,
                 double delta_)
        : lambda(lambda_), vbar(vbar_), eta(eta_), rho(rho_), r(r_), delta(delta_) {
        if (!(lambda > 0.0)) throw std::invalid_argument("HestonParams: lambda must be > 0");
        if (!(vbar > 0.0)) throw std::invalid_argument("HestonParams: vbar must be > 0");
        if (!(eta > 0.0)) throw std::invalid_argument("HestonParams: eta must be > 0");
        if (!(rho > -1.0 && rho < 1.0))
            throw std::invalid_argument("HestonParams: rho must lie in (-1, 1)");
        if (2.0 * lambda * vbar < eta * eta)
            throw std::invalid_argument("HestonParams: Feller condition 2*lambda*vbar >= eta^2 violated");
    }

    double feller_a() const { return 2.0 * lambda * vbar / (eta * eta); } // a = 2*lambda*vbar/eta^2
    double bessel_nu() const { return feller_a() - 1.0; }                 // order d/2 - 1 = a - 1
};

// CIR transition density p_v(w, dt | v) of the variance.
double variance_density(const HestonParams& p, double w, double dt, double v);

// Characteristic function Phi(a) of the integrated variance over dt,
// conditioned on start variance v and end variance w. Accepts complex a so it
// can be composed into the conditional log-price transform.
std::complex<double> integrated_variance_charfun(const HestonParams& p,
                                                 std::complex<double> a_freq, double dt,
                                                 double v, double w);

// Fourier transform p_hat(omega; v, w, dt) w.r.t. the log-return of the
// log-price transition density conditioned on both variance endpoints.
std::complex<double> heston_cond_charfun(const HestonParams& p, double omega, double v,
                                         double w, double dt);

// Marginal log-price characteristic function phi(omega; x, v, dt) in the
// stable ("little trap") branch formulation.
std::complex<double> heston_logprice_charfun(const HestonParams& p, double omega, double x,
                                             double v, double dt);

namespace detail {
// phi at complex frequency; needed for the martingale identity omega = -i and
// the semi-analytic vanilla integrand phi(omega - i).
std::complex<double> heston_logprice_charfun_c(const HestonParams& p,
                                               std::complex<double> omega, double x,
                                               double v, double dt);

// g(u) = u/sinh(u), log g, and H(u) = u coth(u) for Re u > 0, plus the
// cancellation-free differences g(u1) - g(u2) and H(u1) - H(u2) used by the
// integrated-variance transform and its cached evaluation plans.
struct UFun {
    std::complex<double> g;
    std::complex<double> log_g;
    std::complex<double> big_h;
};
constexpr double small_u = 0.35;
UFun eval_u(std::complex<double> u);
std::complex<double> g_diff(std::complex<double> u1, std::complex<double> u2);
std::complex<double> h_diff(std::complex<double> u1, std::complex<double> u2);
} // namespace detail

} // namespace cosbem::models
