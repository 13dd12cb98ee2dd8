#pragma once

#include "cosbem/cosexp.hpp"
#include "cosbem/models.hpp"
#include "cosbem/quad.hpp"
#include "cosbem/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cosbem::bem_heston {

struct PriceResult {
    double value;
    bool knocked_out;
};

// Collocation grids: time layer on [0, T], truncated variance layer.
struct HestonGrids {
    quad::TimeGrid tgrid;
    quad::VarianceGrid vgrid;
};

// Block upper-triangular Toeplitz collocation system: block l couples
// collocation time j with basis cell k = j + l, so only n_steps distinct
// blocks exist.
struct BlockToeplitzSystem {
    HestonGrids grids;
    std::vector<Eigen::MatrixXd> blocks; // A^(l), l = 0..n_steps-1
    std::vector<Eigen::VectorXd> rhs;    // F^(j), j = 1..n_steps (0-based storage)
};

// Piecewise-constant boundary density du/dy(B, w, tau) on the product grid.
struct BoundaryDensityH {
    HestonGrids grids;
    std::vector<Eigen::VectorXd> alpha; // alpha^(k), k = 1..n_steps (0-based storage)
};

// One Toeplitz block A^(l) of cell integrals of (dt/2) w p_v p(0).
Eigen::MatrixXd assemble_block(const models::HestonParams& p, const HestonGrids& grids,
                               int ell, const CosCfg& cos_cfg);

// Right-hand side F_i^(j): payoff integrated against the marginal density
// started at the barrier. Supported contracts: down-and-out call,
// up-and-out call, up-and-out cash-or-nothing call.
std::vector<Eigen::VectorXd> assemble_rhs(const models::HestonParams& p,
                                          const OptionSpec& opt, const HestonGrids& grids,
                                          const CosCfg& cos_cfg);

// Blocks and right-hand side together, assembled in parallel.
BlockToeplitzSystem assemble(const models::HestonParams& p, const OptionSpec& opt,
                             const HestonGrids& grids, const CosCfg& cos_cfg,
                             int n_threads = 0);

// Block-backward substitution; the diagonal block is factorized once.
BoundaryDensityH solve_blocks(const BlockToeplitzSystem& sys);

// Representation-formula price at t = 0: V(S, v, 0) = u(x, v, 0) e^{-rT}.
PriceResult price_heston(const models::HestonParams& p, const OptionSpec& opt,
                         const BoundaryDensityH& sol, double spot, double v,
                         const CosCfg& cos_cfg);

// General evaluation time t in [0, T) with floor-index logic in the boundary
// sum; price_heston is the t = 0 case.
PriceResult price_heston_at(const models::HestonParams& p, const OptionSpec& opt,
                            const BoundaryDensityH& sol, double spot, double v, double t,
                            const CosCfg& cos_cfg);

// dV/dS at t = 0 from the differentiated representation formula (sine series);
// supported for the call payoffs.
PriceResult delta_heston(const models::HestonParams& p, const OptionSpec& opt,
                         const BoundaryDensityH& sol, double spot, double v,
                         const CosCfg& cos_cfg);

// Spots this close to the barrier (in log distance) price accurately only
// with a refined time grid; pricers report it via the near_barrier flag.
constexpr double near_barrier_log_distance = 0.02;
bool near_barrier(const OptionSpec& opt, double spot);

} // namespace cosbem::bem_heston

namespace cosbem::bem_heston::detail {
// w p_v(w, dtau | v_cond) * [cosine reconstruction of p(z0, dtau | w, v_cond)]
// through the cached-window fast path; unit tests pin it against the
// composition of the public density/transform operations.
double kernel_value_once(const models::HestonParams& p, double dtau, double v_cond,
                         double w, double z0, const CosCfg& cfg);
}
