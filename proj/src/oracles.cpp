#include "cosbem/oracles.hpp"

#include "cosbem/errors.hpp"
#include "cosbem/parallel.hpp"
#include "cosbem/quad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace cosbem::oracles {

namespace {

using cplx = std::complex<double>;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P = 1/2 + (1/pi) int_0^inf Re[e^{-i omega k} f(omega)/(i omega)] d omega;
// the integrand has a finite omega -> 0 limit, guarded by a floor.
double probability_from_cf(const std::function<cplx(double)>& f, double log_strike) {
    auto g = [&](double omega) {
        const double om = std::max(omega, 1e-7);
        const cplx val = f(om) * std::exp(cplx(0.0, -om * log_strike)) / cplx(0.0, om);
        return val.real();
    };
    // extend the truncation until the characteristic function has died off
    double hi = 64.0;
    while (hi < 4.2e6 && std::abs(f(hi)) > 1e-15) hi *= 2.0;
    double acc = 0.0;
    double lo = 0.0, seg = 64.0;
    while (lo < hi) {
        const double up = std::min(lo + seg, hi);
        acc += quad::integrate_1d(g, lo, up, 1e-12, 1e-12);
        lo = up;
        seg *= 2.0;
    }
    return 0.5 + acc / M_PI;
}

} // namespace

double bs_vanilla(const models::BSParams& p, Payoff payoff, double spot, double strike,
                  double maturity) {
    if (p.rate_schedule.size() != 1)
        throw std::invalid_argument("bs_vanilla: requires a constant rate");
    if (payoff == Payoff::cash_or_nothing_call)
        throw std::invalid_argument("bs_vanilla: vanilla payoffs only");
    const double r = p.rate_schedule.front().rate;
    const double sig_sqrt_t = p.sigma * std::sqrt(maturity);
    const double d1 =
        (std::log(spot / strike) + (r - p.dividend + 0.5 * p.sigma * p.sigma) * maturity) /
        sig_sqrt_t;
    const double d2 = d1 - sig_sqrt_t;
    const double call = spot * std::exp(-p.dividend * maturity) * norm_cdf(d1) -
                        strike * std::exp(-r * maturity) * norm_cdf(d2);
    if (payoff == Payoff::vanilla_call) return call;
    return call - spot * std::exp(-p.dividend * maturity) + strike * std::exp(-r * maturity);
}

double heston_vanilla(const models::HestonParams& p, Payoff payoff, double spot, double v,
                      double strike, double maturity) {
    if (payoff == Payoff::cash_or_nothing_call)
        throw std::invalid_argument("heston_vanilla: vanilla payoffs only");
    const double x = std::log(spot);
    const double log_e = std::log(strike);
    const double fwd = spot * std::exp((p.r - p.delta) * maturity);
    auto phi = [&](double om) {
        return models::heston_logprice_charfun(p, om, x, v, maturity);
    };
    // phi(omega - i)/phi(-i) with phi(-i) = e^{x + (r - delta) T} = forward
    auto phi1 = [&](double om) {
        return models::detail::heston_logprice_charfun_c(p, cplx(om, -1.0), x, v, maturity) /
               fwd;
    };
    const double p1 = probability_from_cf(phi1, log_e);
    const double p2 = probability_from_cf(phi, log_e);
    const double call = std::exp(-p.r * maturity) * (fwd * p1 - strike * p2);
    if (payoff == Payoff::vanilla_call) return call;
    return call - spot * std::exp(-p.delta * maturity) + strike * std::exp(-p.r * maturity);
}

double heston_digital(const models::HestonParams& p, double spot, double v, double strike,
                      double maturity) {
    const double x = std::log(spot);
    auto phi = [&](double om) {
        return models::heston_logprice_charfun(p, om, x, v, maturity);
    };
    return std::exp(-p.r * maturity) * probability_from_cf(phi, std::log(strike));
}

namespace detail {

PhiloxBlock philox4x32(std::uint64_t key, std::uint64_t path, std::uint32_t step) {
    std::uint32_t c0 = static_cast<std::uint32_t>(path);
    std::uint32_t c1 = static_cast<std::uint32_t>(path >> 32);
    std::uint32_t c2 = step;
    std::uint32_t c3 = 0x434f5342u; // stream tag
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * c2;
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += w0;
        k1 += w1;
    }
    return {{c0, c1, c2, c3}};
}

void normal_pair(std::uint64_t key, std::uint64_t path, std::uint32_t step, double& z1,
                 double& z2) {
    const PhiloxBlock b = philox4x32(key, path, step);
    const std::uint64_t u64a = (static_cast<std::uint64_t>(b.w[0]) << 32) | b.w[1];
    const std::uint64_t u64b = (static_cast<std::uint64_t>(b.w[2]) << 32) | b.w[3];
    const double u1 = (static_cast<double>(u64a >> 11) + 0.5) * 0x1.0p-53; // in (0,1)
    const double u2 = (static_cast<double>(u64b >> 11) + 0.5) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    z1 = radius * std::cos(2.0 * M_PI * u2);
    z2 = radius * std::sin(2.0 * M_PI * u2);
}

// Acklam's rational approximation, refined by one Halley step.
double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

} // namespace detail

McEstimate mc_barrier(const models::HestonParams& p, const OptionSpec& opt, double spot,
                      double v, const McConfig& cfg) {
    const double log_b = opt.log_barrier();
    const double log_e = opt.log_strike();
    const double dt = opt.maturity / cfg.n_steps;
    const double sqrt_dt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);
    const double x0 = std::log(spot);
    const bool up = opt.barrier_kind == BarrierKind::up_and_out;
    const bool start_dead = up ? x0 >= log_b : x0 <= log_b;

    const long long batch = 8192;
    const long long n_batches = (cfg.n_paths + batch - 1) / batch;
    struct BatchAcc {
        double sum = 0.0;
        double sum_sq = 0.0;
        long long knocked = 0;
    };
    std::vector<BatchAcc> acc(static_cast<std::size_t>(n_batches));

    parallel_for(static_cast<std::size_t>(n_batches), cfg.n_threads, [&](std::size_t bi) {
        BatchAcc local;
        const long long lo = static_cast<long long>(bi) * batch;
        const long long hi = std::min(lo + batch, cfg.n_paths);
        for (long long path = lo; path < hi; ++path) {
            double payoff = 0.0;
            if (start_dead) {
                ++local.knocked;
            } else {
                double x = x0, vv = v;
                bool alive = true;
                for (int k = 0; k < cfg.n_steps; ++k) {
                    double zv, zp;
                    detail::normal_pair(cfg.seed, static_cast<std::uint64_t>(path),
                                        static_cast<std::uint32_t>(k), zv, zp);
                    const double vp = vv > 0.0 ? vv : 0.0;
                    const double sv = std::sqrt(vp) * sqrt_dt;
                    x += (p.r - p.delta - 0.5 * vp) * dt + sv * (p.rho * zv + rho_c * zp);
                    vv += p.lambda * (p.vbar - vp) * dt + p.eta * sv * zv;
                    if (up ? x >= log_b : x <= log_b) {
                        alive = false;
                        break;
                    }
                }
                if (alive) {
                    switch (opt.payoff) {
                        case Payoff::vanilla_call:
                            payoff = std::max(std::exp(x) - opt.strike, 0.0);
                            break;
                        case Payoff::vanilla_put:
                            payoff = std::max(opt.strike - std::exp(x), 0.0);
                            break;
                        case Payoff::cash_or_nothing_call:
                            payoff = x > log_e ? 1.0 : 0.0;
                            break;
                    }
                } else {
                    ++local.knocked;
                }
            }
            local.sum += payoff;
            local.sum_sq += payoff * payoff;
        }
        acc[bi] = local;
    });

    double sum = 0.0, sum_sq = 0.0;
    long long knocked = 0;
    for (const BatchAcc& a : acc) {
        sum += a.sum;
        sum_sq += a.sum_sq;
        knocked += a.knocked;
    }
    const double n = static_cast<double>(cfg.n_paths);
    const double disc = std::exp(-p.r * opt.maturity);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    const double z = detail::normal_quantile(0.5 + 0.5 * cfg.confidence);
    return {disc * mean, disc * z * std::sqrt(var / n), knocked};
}

} // namespace cosbem::oracles
