#include "cosbem/bem_bs.hpp"

#include "cosbem/errors.hpp"
#include "cosbem/parallel.hpp"

#include <cmath>
#include <limits>

namespace cosbem::bem_bs {

namespace {

constexpr double matrix_abs_tol = 1e-10, matrix_rel_tol = 1e-8;
constexpr double post_abs_tol = 1e-8, post_rel_tol = 1e-6;

// (sigma^2/2) G(B, s; B, tau) with G reconstructed on the s-dependent
// expansion window; the boundary value is clipped out when B leaves [a, b].
double kernel_at_barrier(const models::BSParams& rev, double log_barrier, double s,
                         double tau, const CosCfg& cfg, Kernel kernel) {
    const double half_var = 0.5 * rev.sigma * rev.sigma;
    if (kernel == Kernel::exact_gaussian) {
        const double dt = tau - s;
        const double var = rev.sigma * rev.sigma * dt;
        const double drift = models::integrated_rate(rev, s, tau) - 0.5 * var;
        return half_var * std::exp(-0.5 * drift * drift / var) / std::sqrt(2.0 * M_PI * var);
    }
    const cosexp::CosInterval itv = cosexp::bs_interval(rev, s, tau, log_barrier, cfg.width_l);
    if (!(log_barrier > itv.a) || !(itv.b > log_barrier)) return 0.0; // H[B-a] H[b-B]
    auto cf = [&](double w) { return models::bs_charfun(rev, w, s, tau, log_barrier); };
    const cosexp::CosSeries series = cosexp::cos_coefficients(cf, itv, cfg.n_f);
    return half_var * cosexp::eval_series(series, log_barrier);
}

// payoff inner product sum' F_n V_n for the put clipped to [a, min(B, log E, b)]
double payoff_term(const models::BSParams& rev, const OptionSpec& opt, double x, double s,
                   double tau, const CosCfg& cfg, Kernel kernel) {
    const double clip_hi = std::min(opt.log_barrier(), opt.log_strike());
    if (kernel == Kernel::exact_gaussian) {
        // direct quadrature of (E - e^y) against the Gaussian kernel
        const double dt = tau - s;
        const double var = rev.sigma * rev.sigma * dt;
        const double mean = x + models::integrated_rate(rev, s, tau) - 0.5 * var;
        auto f = [&](double y) {
            return (opt.strike - std::exp(y)) *
                   std::exp(-0.5 * (y - mean) * (y - mean) / var) /
                   std::sqrt(2.0 * M_PI * var);
        };
        const double lo = mean - 12.0 * std::sqrt(var);
        if (clip_hi <= lo) return 0.0;
        return quad::integrate_1d(f, lo, clip_hi, matrix_abs_tol, matrix_rel_tol);
    }
    const cosexp::CosInterval itv = cosexp::bs_interval(rev, s, tau, x, cfg.width_l);
    auto cf = [&](double w) { return models::bs_charfun(rev, w, s, tau, x); };
    const cosexp::CosSeries series = cosexp::cos_coefficients(cf, itv, cfg.n_f);
    // (E - e^y) integrals are the negated call coefficients over the same clip
    const std::vector<double> call =
        cosexp::payoff_coeffs_call(itv, opt.strike, -std::numeric_limits<double>::infinity(),
                                   clip_hi, cfg.n_f);
    return -cosexp::half_weighted_dot(series.coeffs, call);
}

} // namespace

TriangularSystemBS assemble_bs(const models::BSParams& p, const OptionSpec& opt,
                               const quad::TimeGrid& grid, const CosCfg& cos_cfg,
                               Kernel kernel, int n_threads) {
    if (opt.payoff != Payoff::vanilla_put || opt.barrier_kind != BarrierKind::up_and_out)
        throw std::invalid_argument("assemble_bs: supports the up-and-out vanilla put");
    if (grid.horizon != opt.maturity)
        throw std::invalid_argument("assemble_bs: grid horizon must equal the maturity");

    const models::BSParams rev = p.reversed(opt.maturity);
    const double log_b = opt.log_barrier();
    const int n = grid.n_steps;
    TriangularSystemBS sys{grid,
                           std::vector<double>(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0),
                           std::vector<double>(static_cast<std::size_t>(n), 0.0)};

    parallel_for(static_cast<std::size_t>(n), n_threads, [&](std::size_t row) {
        const int j = static_cast<int>(row) + 1;
        const double tbar = grid.midpoint(j);
        for (int k = 1; k <= j; ++k) {
            const double s_lo = grid.node(k - 1);
            const double s_hi = std::min(grid.node(k), tbar);
            auto f = [&](double s) {
                return kernel_at_barrier(rev, log_b, s, tbar, cos_cfg, kernel);
            };
            try {
                sys.at(j, k) = quad::integrate_1d(
                    f, s_lo, s_hi, matrix_abs_tol, matrix_rel_tol,
                    k == j ? quad::Endpoint::singular_hi : quad::Endpoint::none);
            } catch (const numeric_error& e) {
                throw numeric_error("assemble_bs: entry (" + std::to_string(j) + ", " +
                                    std::to_string(k) + "): " + e.what());
            }
        }
        // F_j = -int u_0 G dy, the put inner product with flipped sign
        sys.rhs[row] = -payoff_term(rev, opt, log_b, 0.0, tbar, cos_cfg, kernel);
    });
    return sys;
}

BoundaryDensityBS solve_bs(const TriangularSystemBS& sys) {
    const int n = sys.grid.n_steps;
    BoundaryDensityBS sol{sys.grid, std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    for (int j = 1; j <= n; ++j) {
        double acc = sys.rhs[j - 1];
        for (int k = 1; k < j; ++k) acc -= sys.at(j, k) * sol.alpha[k - 1];
        const double diag = sys.at(j, j);
        if (diag == 0.0)
            throw numeric_error("solve_bs: zero diagonal at row " + std::to_string(j));
        sol.alpha[j - 1] = acc / diag;
    }
    return sol;
}

PriceResult price_bs(const models::BSParams& p, const OptionSpec& opt,
                     const BoundaryDensityBS& sol, double spot, double t,
                     const CosCfg& cos_cfg, Kernel kernel) {
    if (!(t < opt.maturity)) throw std::invalid_argument("price_bs: requires t < maturity");
    if (!opt.is_live(spot)) return {0.0, true};

    const models::BSParams rev = p.reversed(opt.maturity);
    const double x = std::log(spot);
    const double log_b = opt.log_barrier();
    const double tau = opt.maturity - t;
    const quad::TimeGrid& grid = sol.grid;

    double u = payoff_term(rev, opt, x, 0.0, tau, cos_cfg, kernel);

    const int k_max = static_cast<int>(std::ceil(tau / grid.dt - 1e-12));
    for (int k = 1; k <= k_max; ++k) {
        const double s_lo = grid.node(k - 1);
        const double s_hi = std::min(grid.node(k), tau);
        if (!(s_hi > s_lo)) continue;
        auto f = [&](double s) {
            const double half_var = 0.5 * rev.sigma * rev.sigma;
            if (kernel == Kernel::exact_gaussian) {
                const double dt = tau - s;
                const double var = rev.sigma * rev.sigma * dt;
                const double mean = x + models::integrated_rate(rev, s, tau) - 0.5 * var;
                return half_var *
                       std::exp(-0.5 * (log_b - mean) * (log_b - mean) / var) /
                       std::sqrt(2.0 * M_PI * var);
            }
            const cosexp::CosInterval itv =
                cosexp::bs_interval(rev, s, tau, x, cos_cfg.width_l);
            if (!(log_b > itv.a) || !(itv.b > log_b)) return 0.0; // H[B-a] H[b-B]
            auto cf = [&](double w) { return models::bs_charfun(rev, w, s, tau, x); };
            const cosexp::CosSeries series = cosexp::cos_coefficients(cf, itv, cos_cfg.n_f);
            return half_var * cosexp::eval_series(series, log_b);
        };
        const bool singular = s_hi >= tau - 1e-15;
        u += sol.alpha[k - 1] *
             quad::integrate_1d(f, s_lo, s_hi, post_abs_tol, post_rel_tol,
                                singular ? quad::Endpoint::singular_hi : quad::Endpoint::none);
    }

    const double discount = std::exp(-models::integrated_rate(p, t, opt.maturity));
    return {u * discount, false};
}

} // namespace cosbem::bem_bs
