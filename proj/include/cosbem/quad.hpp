#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cosbem::quad {

// Uniform time grid on [0, T] with collocation midpoints.
struct TimeGrid {
    int n_steps;
    double horizon; // T
    double dt;

    TimeGrid(int n, double t_final) : n_steps(n), horizon(t_final), dt(t_final / n) {
        if (n < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
        if (!(t_final > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
    }

    double node(int k) const { return k * dt; }              // t_k, k = 0..n_steps
    double midpoint(int j) const { return (j - 0.5) * dt; }  // \bar t_j, j = 1..n_steps
};

// Uniform variance grid on [0, v_max].
struct VarianceGrid {
    int n_cells;
    double v_max;
    double dv;

    VarianceGrid(int n, double vmax) : n_cells(n), v_max(vmax), dv(vmax / n) {
        if (n < 1) throw std::invalid_argument("VarianceGrid: n_cells must be >= 1");
        if (!(vmax > 0.0)) throw std::invalid_argument("VarianceGrid: v_max must be > 0");
    }

    // default truncation bound 2*max(v_spot, vbar)
    static double default_v_max(double v_spot, double vbar) {
        return 2.0 * (v_spot > vbar ? v_spot : vbar);
    }

    double node(int h) const { return h * dv; }              // v_h, h = 0..n_cells
    double midpoint(int i) const { return (i - 0.5) * dv; }  // \bar v_i, i = 1..n_cells
};

// Treatment of an integrable (x - lo)^{-1/2} or (hi - x)^{-1/2} endpoint.
enum class Endpoint { none, singular_lo, singular_hi };

// Adaptive Gauss-Kronrod (G7/K15) integration of f on [lo, hi] to
// min(abs_tol, rel_tol * |I|). Square-root endpoint singularities are removed
// by the substitution x = hi - u^2 (resp. x = lo + u^2) before subdividing.
// Deterministic for fixed (f, bounds, tolerances).
double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    double abs_tol, double rel_tol, Endpoint endpoint = Endpoint::none);

// Tensor Gauss-Legendre integration of f(x, y) over [x_lo,x_hi] x [y_lo,y_hi].
// A 5x5 estimate is checked against an embedded 8x8 one; disagreeing cells are
// split 2x2 recursively. The node set depends only on the bounds and
// tolerances, so results do not depend on evaluation order or thread count.
double integrate_cell_2d(const std::function<double(double, double)>& f,
                         double x_lo, double x_hi, double y_lo, double y_hi,
                         double abs_tol, double rel_tol);

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1],
// n in {5, 8, 10, 16}.
std::span<const double> gauss_nodes(int n);
std::span<const double> gauss_weights(int n);

} // namespace cosbem::quad
