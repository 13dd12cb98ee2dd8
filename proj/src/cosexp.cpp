#include "cosbem/cosexp.hpp"

#include "cosbem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cosbem::cosexp {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

struct Clip {
    double lo, hi;
    bool empty;
};

Clip make_clip(const CosInterval& itv, double clip_lo, double clip_hi) {
    const double lo = std::max(itv.a, clip_lo);
    const double hi = std::min(itv.b, clip_hi);
    return {lo, hi, !(hi - lo > 0.0) || itv.collapsed()};
}

} // namespace

CosSeries cos_coefficients(const CharFun& cf, CosInterval interval, int n_terms) {
    if (n_terms < 1) throw std::invalid_argument("cos_coefficients: n_terms must be >= 1");
    CosSeries s{interval, std::vector<double>(static_cast<std::size_t>(n_terms), 0.0)};
    if (interval.collapsed()) return s;
    const double w = interval.width();
    const double scale = 2.0 / w;
    for (int n = 0; n < n_terms; ++n) {
        const double omega = n * pi / w;
        std::complex<double> value;
        try {
            value = cf(omega);
        } catch (const std::exception& e) {
            throw numeric_error("cos_coefficients: characteristic function failed at n = " +
                                std::to_string(n) + ": " + e.what());
        }
        s.coeffs[n] = scale * std::real(std::exp(std::complex<double>(0.0, -omega * interval.a)) * value);
    }
    return s;
}

double eval_series(const CosSeries& s, double x) {
    if (s.coeffs.empty() || s.interval.collapsed()) return 0.0;
    const double theta = pi * (x - s.interval.a) / s.interval.width();
    const double c = std::cos(theta);
    double sum = 0.5 * s.coeffs[0];
    double ck_prev = 1.0; // cos(0)
    double ck = c;        // cos(theta)
    for (std::size_t n = 1; n < s.coeffs.size(); ++n) {
        sum += s.coeffs[n] * ck;
        const double next = 2.0 * c * ck - ck_prev;
        ck_prev = ck;
        ck = next;
    }
    return sum;
}

double half_weighted_dot(std::span<const double> f, std::span<const double> v) {
    const std::size_t n = std::min(f.size(), v.size());
    if (n == 0) return 0.0;
    double sum = 0.5 * f[0] * v[0];
    for (std::size_t k = 1; k < n; ++k) sum += f[k] * v[k];
    return sum;
}

CosInterval bs_interval(const models::BSParams& p, double s, double tau, double center,
                        double width_l) {
    if (!(s < tau)) throw std::invalid_argument("bs_interval: requires s < tau");
    const double dt = tau - s;
    const double drift = models::integrated_rate(p, s, tau) - 0.5 * p.sigma * p.sigma * dt;
    const double half = width_l * std::sqrt(p.sigma * p.sigma * dt);
    return CosInterval(drift - half + center, drift + half + center);
}

CosInterval heston_interval(const models::HestonParams& p, double dt, double v,
                            double center, double width_l) {
    if (!(dt > 0.0)) throw std::invalid_argument("heston_interval: dt must be > 0");
    const double lam = p.lambda, vbar = p.vbar, eta = p.eta, rho = p.rho;
    const double e1 = std::exp(-lam * dt);
    const double c1 = (p.r - p.delta) * dt + (1.0 - e1) * (vbar - v) / (2.0 * lam) -
                      0.5 * vbar * dt;
    const double c2 =
        1.0 / (8.0 * lam * lam * lam) *
        (eta * dt * lam * e1 * (v - vbar) * (8.0 * lam * rho - 4.0 * eta) +
         lam * rho * eta * (1.0 - e1) * (16.0 * vbar - 8.0 * v) +
         2.0 * vbar * lam * dt * (-4.0 * lam * rho * eta + eta * eta + 4.0 * lam * lam) +
         eta * eta * ((vbar - 2.0 * v) * e1 * e1 + vbar * (6.0 * e1 - 7.0) + 2.0 * v) +
         8.0 * lam * lam * (v - vbar) * (1.0 - e1));
    if (!(c2 > 0.0))
        throw numeric_error("heston_interval: degenerate cumulant c2 = " + std::to_string(c2) +
                            " at dt = " + std::to_string(dt));
    const double half = width_l * std::sqrt(c2);
    return CosInterval(c1 - half + center, c1 + half + center);
}

int estimate_nf_bs(const models::BSParams& p, double horizon, CosInterval interval,
                   double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("estimate_nf_bs: eps must lie in (0, 1)");
    if (!(horizon > 0.0)) throw std::invalid_argument("estimate_nf_bs: horizon must be > 0");
    const double w = interval.width();
    if (interval.collapsed())
        throw std::invalid_argument("estimate_nf_bs: collapsed interval");
    const double decay = 0.5 * p.sigma * pi / w * (p.sigma * pi / w) * horizon;
    auto satisfies = [&](int n) {
        return (2.0 / w) * std::exp(-decay * double(n) * double(n)) <= eps;
    };
    // closed-form ceiling from solving the defining inequality; the log
    // argument is arranged positive as ln(2/((b-a) eps))
    const double log_arg = 2.0 / (w * eps);
    int n;
    if (log_arg <= 1.0) {
        n = 1;
    } else {
        const double radicand = std::log(log_arg) / decay;
        n = std::max(1, static_cast<int>(std::ceil(std::sqrt(radicand))));
    }
    while (!satisfies(n)) ++n;
    while (n > 1 && satisfies(n - 1)) --n;
    return n;
}

double truncation_error_bound(const CharFun& cf, CosInterval interval, int n_start,
                              int n_max) {
    if (!(n_start < n_max))
        throw std::invalid_argument("truncation_error_bound: requires n_start < n_max");
    if (interval.collapsed()) return 0.0;
    const double w = interval.width();
    double sum = 0.0;
    for (int n = n_start; n <= n_max; ++n) sum += std::abs(cf(n * pi / w));
    return 2.0 / w * sum;
}

std::vector<double> payoff_coeffs_call(CosInterval interval, double strike, double clip_lo,
                                       double clip_hi, int n_terms) {
    std::vector<double> v(static_cast<std::size_t>(n_terms), 0.0);
    const Clip c = make_clip(interval, clip_lo, clip_hi);
    if (c.empty) return v;
    const double w = interval.width();
    const double a = interval.a;
    const double e_hi = std::exp(c.hi), e_lo = std::exp(c.lo);
    for (int n = 0; n < n_terms; ++n) {
        const double k = n * pi / w;
        const double th_hi = k * (c.hi - a), th_lo = k * (c.lo - a);
        const double chi = (e_hi * (std::cos(th_hi) + k * std::sin(th_hi)) -
                            e_lo * (std::cos(th_lo) + k * std::sin(th_lo))) /
                           (1.0 + k * k);
        const double psi =
            n == 0 ? (c.hi - c.lo) : (std::sin(th_hi) - std::sin(th_lo)) / k;
        v[n] = chi - strike * psi;
    }
    return v;
}

std::vector<double> payoff_coeffs_cash(CosInterval interval, double clip_lo, double clip_hi,
                                       int n_terms) {
    std::vector<double> v(static_cast<std::size_t>(n_terms), 0.0);
    const Clip c = make_clip(interval, clip_lo, clip_hi);
    if (c.empty) return v;
    const double w = interval.width();
    const double a = interval.a;
    for (int n = 0; n < n_terms; ++n) {
        if (n == 0) {
            v[0] = c.hi - c.lo;
            continue;
        }
        const double k = n * pi / w;
        v[n] = (std::sin(k * (c.hi - a)) - std::sin(k * (c.lo - a))) / k;
    }
    return v;
}

std::vector<double> payoff_coeffs_call_dx(CosInterval interval, double strike,
                                          double clip_lo, double clip_hi, int n_terms) {
    std::vector<double> v(static_cast<std::size_t>(n_terms), 0.0);
    const Clip c = make_clip(interval, clip_lo, clip_hi);
    if (c.empty) return v;
    const double w = interval.width();
    const double a = interval.a;
    const double e_hi = std::exp(c.hi), e_lo = std::exp(c.lo);
    for (int n = 1; n < n_terms; ++n) {
        const double k = n * pi / w;
        const double th_hi = k * (c.hi - a), th_lo = k * (c.lo - a);
        const double chi_s = (e_hi * (std::sin(th_hi) - k * std::cos(th_hi)) -
                              e_lo * (std::sin(th_lo) - k * std::cos(th_lo))) /
                             (1.0 + k * k);
        const double k_psi_s = std::cos(th_lo) - std::cos(th_hi); // k * int sin
        v[n] = k * chi_s - strike * k_psi_s;
    }
    return v;
}

} // namespace cosbem::cosexp
