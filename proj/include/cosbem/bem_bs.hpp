#pragma once

#include "cosbem/cosexp.hpp"
#include "cosbem/models.hpp"
#include "cosbem/quad.hpp"
#include "cosbem/types.hpp"

#include <vector>

namespace cosbem::bem_bs {

// Pricing result; knocked_out marks a spot at or beyond the barrier.
struct PriceResult {
    double value;
    bool knocked_out;
};

// Whether the collocation kernel G(B, s; B, t_j) is reconstructed by the
// cosine expansion or evaluated from its closed form. Both assemble the same
// system up to series truncation; the closed form backs the equivalence test.
enum class Kernel { cos_series, exact_gaussian };

// Piecewise-constant boundary density du/dy(B, .) on the time grid.
struct BoundaryDensityBS {
    quad::TimeGrid grid;
    std::vector<double> alpha; // alpha_k, k = 1..n_steps
};

// Lower-triangular collocation system A alpha = F (packed rows j >= k).
struct TriangularSystemBS {
    quad::TimeGrid grid;
    std::vector<double> entries; // row j, cols 1..j
    std::vector<double> rhs;     // F_j

    double at(int j, int k) const { // 1-based, j >= k
        return entries[static_cast<std::size_t>(j - 1) * j / 2 + (k - 1)];
    }
    double& at(int j, int k) {
        return entries[static_cast<std::size_t>(j - 1) * j / 2 + (k - 1)];
    }
};

// Collocation assembly for the up-and-out put of the Black-Scholes section.
TriangularSystemBS assemble_bs(const models::BSParams& p, const OptionSpec& opt,
                               const quad::TimeGrid& grid, const CosCfg& cos_cfg,
                               Kernel kernel = Kernel::cos_series, int n_threads = 0);

// Forward substitution.
BoundaryDensityBS solve_bs(const TriangularSystemBS& sys);

// Representation-formula price V(S, t) = u(log S, T - t) e^{-int_t^T rbar}.
PriceResult price_bs(const models::BSParams& p, const OptionSpec& opt,
                     const BoundaryDensityBS& sol, double spot, double t,
                     const CosCfg& cos_cfg, Kernel kernel = Kernel::cos_series);

} // namespace cosbem::bem_bs
