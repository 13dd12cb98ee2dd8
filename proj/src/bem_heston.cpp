#include "cosbem/bem_heston.hpp"

#include "cosbem/bessel.hpp"
#include "cosbem/errors.hpp"
#include "cosbem/parallel.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

namespace cosbem::bem_heston {

namespace {

using cplx = std::complex<double>;
constexpr double pi = 3.141592653589793238462643383279502884;

constexpr double cell_abs_tol = 1e-10, cell_rel_tol = 1e-8;
constexpr double post_abs_tol = 1e-10, post_rel_tol = 1e-8;

// Everything about one expansion window (fixed conditioning variance and time
// gap) that is reused across terminal-variance nodes and series terms: the
// lambda-side factors of the integrated-variance transform and, per
// frequency, the gamma-side factors with their cancellation-free differences.
struct Window {
    bool dead = false; // evaluation point left the interval: H-clipped to zero
    double dtau = 0.0;
    double a = 0.0;
    double inv_width = 0.0;
    double nu = 0.0;
    // CIR density pieces: p_v = exp(log_c - (sqrt q - sqrt b)^2
    //                               + (nu/2) log(q/b) + S_lambda)
    double log_c = 0.0;
    double sqrt_c = 0.0;
    double log_b_cir = 0.0;
    double sqrt_b_cir = 0.0;
    double zsc_per_sqrt_w = 0.0; // 4 sqrt(v)/(eta^2 dtau)
    double g_l = 0.0;            // g(lambda dtau / 2)
    double h_coef = 0.0;         // 2/(dtau eta^2)
    double shift_const = 0.0;    // (r - delta) dtau - (rho/eta)(v + lambda vbar dtau)
    // per-frequency tables, n = 0..n_f-1
    std::vector<double> omega;
    std::vector<double> eval_tab; // cos(n theta0), or (n pi/W) sin(n theta0)
    std::vector<cplx> log_g_diff; // log g(u_gamma) - log g(u_lambda)
    std::vector<cplx> dg;         // g(u_gamma) - g(u_lambda)
    std::vector<cplx> dh;         // H(u_lambda) - H(u_gamma)
    std::vector<cplx> g_gamma;
};

enum class SeriesMode { value, dz }; // density value, or its d/dz at the point

Window build_window(const models::HestonParams& p, double dtau, double v_cond, double z0,
                    const CosCfg& cfg, SeriesMode mode) {
    Window win;
    win.dtau = dtau;
    const cosexp::CosInterval itv = cosexp::heston_interval(p, dtau, v_cond, 0.0, cfg.width_l);
    if (!(z0 > itv.a) || !(itv.b > z0) || itv.collapsed()) {
        win.dead = true;
        return win;
    }
    win.a = itv.a;
    win.inv_width = 1.0 / itv.width();
    win.nu = p.bessel_nu();

    const double lam = p.lambda, eta2 = p.eta * p.eta;
    const double decay = std::exp(-lam * dtau);
    const double c_cir = 2.0 * lam / ((1.0 - decay) * eta2);
    win.log_c = std::log(c_cir);
    win.sqrt_c = std::sqrt(c_cir);
    const double b_cir = c_cir * v_cond * decay;
    win.log_b_cir = std::log(b_cir);
    win.sqrt_b_cir = std::sqrt(b_cir);
    win.zsc_per_sqrt_w = 4.0 * std::sqrt(v_cond) / (eta2 * dtau);
    win.h_coef = 2.0 / (dtau * eta2);
    win.shift_const = (p.r - p.delta) * dtau - (p.rho / p.eta) * (v_cond + lam * p.vbar * dtau);

    const cplx ul(0.5 * lam * dtau, 0.0);
    const models::detail::UFun fl = models::detail::eval_u(ul);
    win.g_l = fl.g.real();

    const int n_f = cfg.n_f;
    win.omega.resize(n_f);
    win.eval_tab.resize(n_f);
    win.log_g_diff.resize(n_f);
    win.dg.resize(n_f);
    win.dh.resize(n_f);
    win.g_gamma.resize(n_f);

    const double theta0 = pi * (z0 - itv.a) * win.inv_width;
    const double ct = std::cos(theta0), st = std::sin(theta0);
    double ck = 1.0, sk = 0.0; // cos(n theta0), sin(n theta0)
    for (int n = 0; n < n_f; ++n) {
        const double omega = n * pi * win.inv_width;
        win.omega[n] = omega;
        win.eval_tab[n] = mode == SeriesMode::value ? ck : omega * sk;
        const double ck_next = ck * ct - sk * st;
        const double sk_next = sk * ct + ck * st;
        ck = ck_next;
        sk = sk_next;
        if (n == 0) {
            win.log_g_diff[0] = win.dg[0] = win.dh[0] = 0.0;
            win.g_gamma[0] = fl.g;
            continue;
        }
        const cplx a_freq(omega * (lam * p.rho / p.eta - 0.5),
                          0.5 * omega * omega * (1.0 - p.rho * p.rho));
        const cplx gamma =
            std::sqrt(cplx(lam * lam, 0.0) - 2.0 * eta2 * cplx(0.0, 1.0) * a_freq);
        const cplx ug = 0.5 * gamma * dtau;
        const models::detail::UFun fg = models::detail::eval_u(ug);
        win.log_g_diff[n] = fg.log_g - fl.log_g;
        win.dg[n] = models::detail::g_diff(ug, ul);
        win.dh[n] = models::detail::h_diff(ul, ug);
        win.g_gamma[n] = fg.g;
    }
    return win;
}

// (1/2) w p_v(w, dtau | v_cond) * series(z0) for one terminal-variance node;
// the caller supplies the time jacobian.
double kernel_value(const models::HestonParams& p, const Window& win, double v_cond,
                    double w) {
    if (win.dead || w <= 0.0) return 0.0;
    const double sqw = std::sqrt(w);
    const double zsc = win.zsc_per_sqrt_w * sqw;
    const double z_l = zsc * win.g_l;
    const double log_i_l =
        models::detail::log_bessel_i_unchecked(win.nu, cplx(z_l, 0.0)).real();
    const double s_l = log_i_l - z_l;
    // CIR transition density in log form
    const double sq_diff = win.sqrt_c * sqw - win.sqrt_b_cir;
    const double log_pv = win.log_c - sq_diff * sq_diff +
                          0.5 * win.nu * (win.log_c + std::log(w) - win.log_b_cir) + s_l;
    if (log_pv < -720.0) return 0.0; // variance layer carries no mass here
    const double pv = std::exp(log_pv);

    const double shift = win.shift_const + (p.rho / p.eta) * w;
    const double h_mult = (v_cond + w) * win.h_coef;
    const double two_over_width = 2.0 * win.inv_width;
    double series = 0.5 * two_over_width * win.eval_tab[0];
    const int n_f = static_cast<int>(win.omega.size());
    for (int n = 1; n < n_f; ++n) {
        const cplx z_g = zsc * win.g_gamma[n];
        const cplx s_g = models::detail::log_bessel_i_unchecked(win.nu, z_g) - z_g;
        const cplx log_phi =
            win.log_g_diff[n] + h_mult * win.dh[n] + zsc * win.dg[n] + s_g - s_l;
        const double re = log_phi.real();
        const double im = log_phi.imag() + win.omega[n] * (shift - win.a);
        series += two_over_width * std::exp(re) * std::cos(im) * win.eval_tab[n];
    }
    return 0.5 * w * pv * series;
}

// cache of windows keyed by the exact time-gap bits; each assembly row runs
// sequentially on one worker so no locking is needed
struct WindowCache {
    const models::HestonParams& p;
    double v_cond;
    double z0;
    const CosCfg& cfg;
    SeriesMode mode;
    std::unordered_map<std::uint64_t, Window> map;

    const Window& get(double dtau) {
        const std::uint64_t key = std::bit_cast<std::uint64_t>(dtau);
        auto it = map.find(key);
        if (it == map.end())
            it = map.emplace(key, build_window(p, dtau, v_cond, z0, cfg, mode)).first;
        return it->second;
    }
};

// row i of block ell: cell integrals over (w, s), with s = 1/2 + u^2 on the
// diagonal block to absorb the kernel's 1/sqrt(tau - t_j) endpoint
std::vector<double> assemble_row(const models::HestonParams& p, const HestonGrids& grids,
                                 int ell, int i, const CosCfg& cfg) {
    const double dt = grids.tgrid.dt;
    const double v_i = grids.vgrid.midpoint(i);
    WindowCache cache{p, v_i, 0.0, cfg, SeriesMode::value, {}};
    std::vector<double> row(static_cast<std::size_t>(grids.vgrid.n_cells), 0.0);
    for (int h = 1; h <= grids.vgrid.n_cells; ++h) {
        const double w_lo = grids.vgrid.node(h - 1);
        const double w_hi = grids.vgrid.node(h);
        try {
            if (ell == 0) {
                auto f = [&](double w, double u) {
                    const double dtau = dt * u * u;
                    return 2.0 * u * dt * kernel_value(p, cache.get(dtau), v_i, w);
                };
                row[h - 1] = quad::integrate_cell_2d(f, w_lo, w_hi, 0.0, std::sqrt(0.5),
                                                     cell_abs_tol, cell_rel_tol);
            } else {
                auto f = [&](double w, double s) {
                    const double dtau = dt * (ell - 0.5 + s);
                    return dt * kernel_value(p, cache.get(dtau), v_i, w);
                };
                row[h - 1] = quad::integrate_cell_2d(f, w_lo, w_hi, 0.0, 1.0, cell_abs_tol,
                                                     cell_rel_tol);
            }
        } catch (const std::exception& e) {
            throw numeric_error("assemble_block: (ell, i, h) = (" + std::to_string(ell) +
                                ", " + std::to_string(i) + ", " + std::to_string(h) +
                                "): " + e.what());
        }
    }
    return row;
}

std::vector<double> payoff_coeffs_for(const OptionSpec& opt, const cosexp::CosInterval& itv,
                                      int n_f) {
    const double log_e = opt.log_strike();
    const double log_b = opt.log_barrier();
    if (opt.barrier_kind == BarrierKind::down_and_out) {
        if (opt.payoff != Payoff::vanilla_call)
            throw std::invalid_argument("bem_heston: down-and-out supports the vanilla call");
        return cosexp::payoff_coeffs_call(itv, opt.strike, std::max(log_b, log_e), itv.b,
                                          n_f);
    }
    if (opt.payoff == Payoff::vanilla_call)
        return cosexp::payoff_coeffs_call(itv, opt.strike, log_e, std::min(itv.b, log_b),
                                          n_f);
    if (opt.payoff == Payoff::cash_or_nothing_call)
        return cosexp::payoff_coeffs_cash(itv, log_e, std::min(itv.b, log_b), n_f);
    throw std::invalid_argument("bem_heston: up-and-out supports call and cash-or-nothing");
}

std::vector<double> payoff_coeffs_dx_for(const OptionSpec& opt,
                                         const cosexp::CosInterval& itv, int n_f) {
    const double log_e = opt.log_strike();
    const double log_b = opt.log_barrier();
    if (opt.barrier_kind == BarrierKind::down_and_out)
        return cosexp::payoff_coeffs_call_dx(itv, opt.strike, std::max(log_b, log_e), itv.b,
                                             n_f);
    return cosexp::payoff_coeffs_call_dx(itv, opt.strike, log_e, std::min(itv.b, log_b),
                                         n_f);
}

// sum' F_n[phi_T] V_n with the expansion started at (x, v) over time-to-go dt
double payoff_expectation(const models::HestonParams& p, const OptionSpec& opt, double x,
                          double v, double dt, const CosCfg& cfg, bool differentiated) {
    const cosexp::CosInterval itv = cosexp::heston_interval(p, dt, v, x, cfg.width_l);
    auto cf = [&](double om) { return models::heston_logprice_charfun(p, om, x, v, dt); };
    const cosexp::CosSeries series = cosexp::cos_coefficients(cf, itv, cfg.n_f);
    const std::vector<double> payoff = differentiated
                                           ? payoff_coeffs_dx_for(opt, itv, cfg.n_f)
                                           : payoff_coeffs_for(opt, itv, cfg.n_f);
    return cosexp::half_weighted_dot(series.coeffs, payoff);
}

// boundary correction at evaluation time t:
// sum_{h,k} alpha_h^(k) int int (w/2) p_v(w, tau - t | v) series(B - x) dw dtau
double boundary_correction(const models::HestonParams& p, const OptionSpec& opt,
                           const BoundaryDensityH& sol, double x, double v, double t,
                           const CosCfg& cfg, SeriesMode mode) {
    const double z0 = opt.log_barrier() - x;
    const quad::TimeGrid& tg = sol.grids.tgrid;
    const quad::VarianceGrid& vg = sol.grids.vgrid;
    WindowCache cache{p, v, z0, cfg, mode, {}};
    const int k_first = static_cast<int>(std::floor(t / tg.dt + 1e-12)) + 1;
    double acc = 0.0;
    for (int k = k_first; k <= tg.n_steps; ++k) {
        const double tau_lo = std::max(t, tg.node(k - 1));
        const double tau_hi = tg.node(k);
        if (!(tau_hi > tau_lo)) continue;
        for (int h = 1; h <= vg.n_cells; ++h) {
            const double alpha = sol.alpha[k - 1](h - 1);
            if (alpha == 0.0) continue;
            auto f = [&](double w, double tau) {
                return kernel_value(p, cache.get(tau - t), v, w);
            };
            const double cell = quad::integrate_cell_2d(f, vg.node(h - 1), vg.node(h),
                                                        tau_lo, tau_hi, post_abs_tol,
                                                        post_rel_tol);
            acc += alpha * cell;
        }
    }
    return acc;
}

} // namespace

bool near_barrier(const OptionSpec& opt, double spot) {
    return std::abs(std::log(spot) - opt.log_barrier()) < near_barrier_log_distance;
}

Eigen::MatrixXd assemble_block(const models::HestonParams& p, const HestonGrids& grids,
                               int ell, const CosCfg& cos_cfg) {
    if (ell < 0 || ell >= grids.tgrid.n_steps)
        throw std::invalid_argument("assemble_block: lag index out of range");
    const int n_v = grids.vgrid.n_cells;
    Eigen::MatrixXd block(n_v, n_v);
    for (int i = 1; i <= n_v; ++i) {
        const std::vector<double> row = assemble_row(p, grids, ell, i, cos_cfg);
        for (int h = 1; h <= n_v; ++h) block(i - 1, h - 1) = row[h - 1];
    }
    return block;
}

std::vector<Eigen::VectorXd> assemble_rhs(const models::HestonParams& p,
                                          const OptionSpec& opt, const HestonGrids& grids,
                                          const CosCfg& cos_cfg) {
    if (grids.tgrid.horizon != opt.maturity)
        throw std::invalid_argument("assemble_rhs: grid horizon must equal the maturity");
    const int n_t = grids.tgrid.n_steps;
    const int n_v = grids.vgrid.n_cells;
    const double log_b = opt.log_barrier();
    std::vector<Eigen::VectorXd> rhs(static_cast<std::size_t>(n_t), Eigen::VectorXd(n_v));
    for (int j = 1; j <= n_t; ++j) {
        const double to_go = opt.maturity - grids.tgrid.midpoint(j);
        for (int i = 1; i <= n_v; ++i) {
            try {
                rhs[j - 1](i - 1) = payoff_expectation(p, opt, log_b,
                                                       grids.vgrid.midpoint(i), to_go,
                                                       cos_cfg, false);
            } catch (const std::exception& e) {
                throw numeric_error("assemble_rhs: (j, i) = (" + std::to_string(j) + ", " +
                                    std::to_string(i) + "): " + e.what());
            }
        }
    }
    return rhs;
}

BlockToeplitzSystem assemble(const models::HestonParams& p, const OptionSpec& opt,
                             const HestonGrids& grids, const CosCfg& cos_cfg,
                             int n_threads) {
    if (grids.tgrid.horizon != opt.maturity)
        throw std::invalid_argument("assemble: grid horizon must equal the maturity");

    const int n_t = grids.tgrid.n_steps;
    const int n_v = grids.vgrid.n_cells;
    BlockToeplitzSystem sys{grids,
                            std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n_t),
                                                         Eigen::MatrixXd(n_v, n_v)),
                            {}};

    // one work item per (lag, collocation variance) pair
    parallel_for(static_cast<std::size_t>(n_t) * n_v, n_threads, [&](std::size_t item) {
        const int ell = static_cast<int>(item) / n_v;
        const int i = static_cast<int>(item) % n_v + 1;
        const std::vector<double> row = assemble_row(p, grids, ell, i, cos_cfg);
        for (int h = 1; h <= n_v; ++h) sys.blocks[ell](i - 1, h - 1) = row[h - 1];
    });

    sys.rhs = assemble_rhs(p, opt, grids, cos_cfg);
    return sys;
}

BoundaryDensityH solve_blocks(const BlockToeplitzSystem& sys) {
    const int n_t = sys.grids.tgrid.n_steps;
    if (static_cast<int>(sys.blocks.size()) != n_t ||
        static_cast<int>(sys.rhs.size()) != n_t)
        throw std::invalid_argument("solve_blocks: system shape mismatch");

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.blocks[0]);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw numeric_error("solve_blocks: diagonal block ill-conditioned, rcond = " +
                            std::to_string(rcond));

    BoundaryDensityH sol{sys.grids,
                         std::vector<Eigen::VectorXd>(static_cast<std::size_t>(n_t))};
    for (int j = n_t; j >= 1; --j) {
        Eigen::VectorXd r = sys.rhs[j - 1];
        for (int k = j + 1; k <= n_t; ++k) r -= sys.blocks[k - j] * sol.alpha[k - 1];
        sol.alpha[j - 1] = lu.solve(r);
    }
    return sol;
}

PriceResult price_heston_at(const models::HestonParams& p, const OptionSpec& opt,
                            const BoundaryDensityH& sol, double spot, double v, double t,
                            const CosCfg& cos_cfg) {
    if (!(t >= 0.0 && t < opt.maturity))
        throw std::invalid_argument("price_heston: requires 0 <= t < maturity");
    if (!(v > 0.0)) throw std::invalid_argument("price_heston: v must be > 0");
    if (!opt.is_live(spot)) return {0.0, true};
    const double x = std::log(spot);
    const double u = payoff_expectation(p, opt, x, v, opt.maturity - t, cos_cfg, false) -
                     boundary_correction(p, opt, sol, x, v, t, cos_cfg, SeriesMode::value);
    return {std::exp(-p.r * (opt.maturity - t)) * u, false};
}

PriceResult price_heston(const models::HestonParams& p, const OptionSpec& opt,
                         const BoundaryDensityH& sol, double spot, double v,
                         const CosCfg& cos_cfg) {
    return price_heston_at(p, opt, sol, spot, v, 0.0, cos_cfg);
}

PriceResult delta_heston(const models::HestonParams& p, const OptionSpec& opt,
                         const BoundaryDensityH& sol, double spot, double v,
                         const CosCfg& cos_cfg) {
    if (opt.payoff != Payoff::vanilla_call)
        throw std::invalid_argument("delta_heston: supported for the call payoffs");
    if (!(v > 0.0)) throw std::invalid_argument("delta_heston: v must be > 0");
    if (!opt.is_live(spot)) return {0.0, true};
    const double x = std::log(spot);
    // the expansion coefficients do not move with x; the clipped payoff
    // integrals differentiate into the sine variant, the boundary series
    // into its d/dz at B - x
    const double du_dx =
        payoff_expectation(p, opt, x, v, opt.maturity, cos_cfg, true) -
        boundary_correction(p, opt, sol, x, v, 0.0, cos_cfg, SeriesMode::dz);
    return {std::exp(-p.r * opt.maturity) * std::exp(-x) * du_dx, false};
}

namespace detail {

double kernel_value_once(const models::HestonParams& p, double dtau, double v_cond,
                         double w, double z0, const CosCfg& cfg) {
    const Window win = build_window(p, dtau, v_cond, z0, cfg, SeriesMode::value);
    return 2.0 * kernel_value(p, win, v_cond, w); // w p_v series(z0)
}

} // namespace detail

} // namespace cosbem::bem_heston
