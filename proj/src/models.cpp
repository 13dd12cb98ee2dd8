#include "cosbem/models.hpp"

#include "cosbem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cosbem::models {

namespace {

using cplx = std::complex<double>;
constexpr cplx imag_unit{0.0, 1.0};

// even-series coefficients of u/sinh(u) = 1 + sum c_k u^{2k}
constexpr double g_c[6] = {-1.0 / 6.0,        7.0 / 360.0,      -31.0 / 15120.0,
                           127.0 / 604800.0,  -2.1335132681198e-5, 2.1632033217596e-6};
// even-series coefficients of u*coth(u) = 1 + sum b_k u^{2k}
constexpr double h_b[6] = {1.0 / 3.0,      -1.0 / 45.0,      2.0 / 945.0,
                           -1.0 / 4725.0,  2.1377799155576e-5, -2.1644042808063e-6};

cplx even_series(const double (&c)[6], cplx p) { // sum c_k p^k, p = u^2
    cplx acc = 0.0, pk = 1.0;
    for (int k = 0; k < 6; ++k) {
        pk *= p;
        acc += c[k] * pk;
    }
    return acc;
}

// f(u1) - f(u2) for the even series 1 + sum c_k u^{2k}, factored through
// p - q = u1^2 - u2^2 so nearby arguments do not cancel.
cplx even_series_diff(const double (&c)[6], cplx p, cplx q, cplx p_minus_q) {
    cplx h = 1.0;    // h_k = sum_{j<k} p^j q^{k-1-j}
    cplx qk = 1.0;   // q^k
    cplx acc = c[0] * h;
    for (int k = 1; k < 6; ++k) {
        qk *= q;
        h = h * p + qk; // h_{k+1} = p * h_k + q^k
        acc += c[k] * h;
    }
    return p_minus_q * acc;
}

} // namespace

namespace detail {

// g(u) = u/sinh(u) and H(u) = u*coth(u); valid for Re u > 0. For large
// arguments sinh is never formed: log sinh u = u + log(1 - e^{-2u}) - log 2.
UFun eval_u(cplx u) {
    UFun out;
    if (std::abs(u) <= small_u) {
        const cplx p = u * u;
        out.g = 1.0 + even_series(g_c, p);
        out.log_g = std::log(out.g);
        out.big_h = 1.0 + even_series(h_b, p);
    } else {
        const cplx e = std::exp(-2.0 * u);
        out.log_g = std::log(u) - u - std::log(1.0 - e) + 0.6931471805599453094172321;
        out.g = std::exp(out.log_g);
        out.big_h = u * (1.0 + e) / (1.0 - e);
    }
    return out;
}

cplx g_diff(cplx u1, cplx u2) {
    if (std::abs(u1) <= small_u && std::abs(u2) <= small_u)
        return even_series_diff(g_c, u1 * u1, u2 * u2, (u1 - u2) * (u1 + u2));
    return eval_u(u1).g - eval_u(u2).g;
}

cplx h_diff(cplx u1, cplx u2) {
    if (std::abs(u1) <= small_u && std::abs(u2) <= small_u)
        return even_series_diff(h_b, u1 * u1, u2 * u2, (u1 - u2) * (u1 + u2));
    return eval_u(u1).big_h - eval_u(u2).big_h;
}

} // namespace detail

BSParams BSParams::reversed(double horizon) const {
    if (!(horizon > 0.0)) throw std::invalid_argument("BSParams::reversed: horizon must be > 0");
    std::vector<RateSegment> rev;
    rev.reserve(rate_schedule.size());
    // segment [t_i, t_{i+1}) maps to [horizon - t_{i+1}, horizon - t_i)
    for (std::size_t i = rate_schedule.size(); i-- > 0;) {
        double start = i + 1 < rate_schedule.size()
                           ? horizon - rate_schedule[i + 1].t_from
                           : 0.0;
        if (start < horizon) rev.push_back({std::max(start, 0.0), rate_schedule[i].rate});
    }
    if (rev.empty() || rev.front().t_from > 0.0)
        rev.insert(rev.begin(), {0.0, rate_schedule.back().rate});
    rev.front().t_from = 0.0;
    return BSParams(sigma, std::move(rev), dividend);
}

double integrated_rate(const BSParams& p, double t1, double t2) {
    if (t1 > t2) throw std::invalid_argument("integrated_rate: t1 > t2");
    double acc = 0.0;
    const auto& seg = p.rate_schedule;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const double seg_lo = seg[i].t_from;
        const double seg_hi = i + 1 < seg.size() ? seg[i + 1].t_from
                                                 : std::numeric_limits<double>::infinity();
        const double lo = std::max(t1, seg_lo);
        const double hi = std::min(t2, seg_hi);
        if (hi > lo) acc += seg[i].rate * (hi - lo);
    }
    return acc;
}

std::complex<double> bs_charfun(const BSParams& p, double omega, double s, double tau,
                                double x) {
    if (!(s < tau)) throw std::invalid_argument("bs_charfun: requires s < tau");
    const double dt = tau - s;
    const double var = p.sigma * p.sigma * dt;
    const double drift = integrated_rate(p, s, tau) - 0.5 * var;
    return std::exp(cplx(-0.5 * var * omega * omega, omega * (x + drift)));
}

double variance_density(const HestonParams& p, double w, double dt, double v) {
    if (!(w >= 0.0)) throw std::invalid_argument("variance_density: w must be >= 0");
    if (!(v > 0.0)) throw std::invalid_argument("variance_density: v must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("variance_density: dt must be > 0");
    const double nu = p.bessel_nu();
    const double decay = std::exp(-p.lambda * dt);
    const double c = 2.0 * p.lambda / ((1.0 - decay) * p.eta * p.eta);
    const double b = c * v * decay;
    const double q = c * w;
    if (q == 0.0) return nu > 0.0 ? 0.0 : c * std::exp(-b);
    const double z = 2.0 * std::sqrt(b * q);
    const double sq_diff = std::sqrt(q) - std::sqrt(b);
    // scaled form: log c - (sqrt q - sqrt b)^2 + (nu/2) log(q/b) + [log I_nu(z) - z]
    const double log_scaled_bessel =
        detail::log_bessel_i_unchecked(nu, cplx(z, 0.0)).real() - z;
    const double lp = std::log(c) - sq_diff * sq_diff + 0.5 * nu * std::log(q / b) +
                      log_scaled_bessel;
    return std::exp(lp);
}

std::complex<double> integrated_variance_charfun(const HestonParams& p, cplx a_freq,
                                                 double dt, double v, double w) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrated_variance_charfun: dt must be > 0");
    if (!(v > 0.0) || !(w > 0.0))
        throw std::invalid_argument("integrated_variance_charfun: v, w must be > 0");
    if (a_freq == 0.0) return 1.0;

    const double lam = p.lambda;
    const double eta2 = p.eta * p.eta;
    const double nu = p.bessel_nu();
    const cplx gamma = std::sqrt(cplx(lam * lam, 0.0) - 2.0 * eta2 * imag_unit * a_freq);

    const cplx ug = 0.5 * gamma * dt;   // gamma * dt / 2
    const double ul = 0.5 * lam * dt;   // lambda * dt / 2
    const detail::UFun fg = detail::eval_u(ug);
    const detail::UFun fl = detail::eval_u(cplx(ul, 0.0));

    // Bessel arguments z_c = (4 sqrt(vw) / (eta^2 dt)) * g(u_c)
    const double z_scale = 4.0 * std::sqrt(v * w) / (eta2 * dt);
    const cplx z_gamma = z_scale * fg.g;
    const double z_lambda = z_scale * fl.g.real();

    // differences evaluated cancellation-free when both arguments are small
    const cplx dg = detail::g_diff(ug, cplx(ul, 0.0));  // g(ug) - g(ul)
    const cplx dh = detail::h_diff(cplx(ul, 0.0), ug);  // H(ul) - H(ug)

    const cplx s_gamma = detail::log_bessel_i_unchecked(nu, z_gamma) - z_gamma;
    const double s_lambda =
        detail::log_bessel_i_unchecked(nu, cplx(z_lambda, 0.0)).real() - z_lambda;

    const cplx log_phi = (fg.log_g - fl.log_g)                       // prefactor
                         + ((v + w) / eta2) * (2.0 / dt) * dh        // exponential factor
                         + z_scale * dg                              // z_gamma - z_lambda
                         + s_gamma - s_lambda;                       // scaled Bessel ratio
    const cplx result = std::exp(log_phi);
    if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
        throw numeric_error("integrated_variance_charfun: non-finite value at a = (" +
                            std::to_string(a_freq.real()) + ", " + std::to_string(a_freq.imag()) +
                            "), dt = " + std::to_string(dt));
    return result;
}

std::complex<double> heston_cond_charfun(const HestonParams& p, double omega, double v,
                                         double w, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("heston_cond_charfun: dt must be > 0");
    if (omega == 0.0) return 1.0;
    const cplx a =
        cplx(omega * (p.lambda * p.rho / p.eta - 0.5), 0.5 * omega * omega * (1.0 - p.rho * p.rho));
    const cplx phi = integrated_variance_charfun(p, a, dt, v, w);
    // the drift and the rho/eta * (w - v - lambda vbar dt) reshuffle both multiply i*omega
    const double shift = (p.r - p.delta) * dt +
                         (p.rho / p.eta) * (w - v - p.lambda * p.vbar * dt);
    return std::exp(imag_unit * omega * shift) * phi;
}

namespace detail {

std::complex<double> heston_logprice_charfun_c(const HestonParams& p, cplx omega, double x,
                                               double v, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("heston_logprice_charfun: dt must be > 0");
    if (omega == 0.0) return 1.0;
    const double lam = p.lambda;
    const double eta2 = p.eta * p.eta;
    const cplx iw = imag_unit * omega;
    const cplx beta = lam - p.rho * p.eta * iw;
    const cplx d = std::sqrt(beta * beta + (omega * omega + iw) * eta2);
    const cplx c_ratio = (beta - d) / (beta + d); // stable branch: |c_ratio| <= 1
    const cplx e = std::exp(-d * dt);
    const cplx one_m_ce = 1.0 - c_ratio * e;
    const cplx log_phi = iw * ((p.r - p.delta) * dt + x) +
                         (v / eta2) * ((1.0 - e) / one_m_ce) * (beta - d) +
                         (lam * p.vbar / eta2) *
                             (dt * (beta - d) - 2.0 * std::log(one_m_ce / (1.0 - c_ratio)));
    const cplx result = std::exp(log_phi);
    if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
        throw numeric_error("heston_logprice_charfun: non-finite value at omega = (" +
                            std::to_string(omega.real()) + ", " + std::to_string(omega.imag()) +
                            "), dt = " + std::to_string(dt));
    return result;
}

} // namespace detail

std::complex<double> heston_logprice_charfun(const HestonParams& p, double omega, double x,
                                             double v, double dt) {
    return detail::heston_logprice_charfun_c(p, cplx(omega, 0.0), x, v, dt);
}

} // namespace cosbem::models
