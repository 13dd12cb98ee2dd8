#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cosbem/quad.hpp"

#include <cmath>
#include <random>

using namespace cosbem::quad;

TEST_CASE("time grid nodes and midpoints") {
    TimeGrid g(4, 1.0);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(4) == 1.0);
    CHECK(g.midpoint(1) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g.midpoint(4) == doctest::Approx(0.875).epsilon(1e-15));
    // node arithmetic is multiplicative, not accumulated
    TimeGrid f(640, 0.73);
    CHECK(f.node(640) == 640 * f.dt);
}

TEST_CASE("variance grid") {
    VarianceGrid g(8, 0.08);
    CHECK(g.node(8) == doctest::Approx(0.08).epsilon(1e-15));
    CHECK(g.midpoint(1) == doctest::Approx(0.005).epsilon(1e-14));
    CHECK(VarianceGrid::default_v_max(0.01, 0.04) == doctest::Approx(0.08));
}

TEST_CASE("integrate_1d basics") {
    auto one = [](double) { return 1.0; };
    CHECK(integrate_1d(one, 0.0, 1.0, 1e-12, 1e-12) == doctest::Approx(1.0).epsilon(1e-13));

    auto osc = [](double x) { return std::cos(50.0 * x); };
    CHECK(integrate_1d(osc, 0.0, 1.0, 1e-14, 1e-14) ==
          doctest::Approx(std::sin(50.0) / 50.0).epsilon(1e-12));
}

TEST_CASE("integrate_1d endpoint singularities") {
    auto inv_sqrt = [](double x) { return 1.0 / std::sqrt(x); };
    CHECK(integrate_1d(inv_sqrt, 0.0, 1.0, 1e-12, 1e-12, Endpoint::singular_lo) ==
          doctest::Approx(2.0).epsilon(1e-10));
    auto inv_sqrt_hi = [](double x) { return 1.0 / std::sqrt(1.0 - x); };
    CHECK(integrate_1d(inv_sqrt_hi, 0.0, 1.0, 1e-12, 1e-12, Endpoint::singular_hi) ==
          doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("integrate_cell_2d") {
    auto one = [](double, double) { return 1.0; };
    CHECK(integrate_cell_2d(one, 0.0, 1.0, 0.0, 1.0, 1e-12, 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-13));

    auto sep = [](double w, double s) { return w * std::exp(-s); };
    CHECK(integrate_cell_2d(sep, 0.0, 1.0, 0.0, 1.0, 1e-13, 1e-13) ==
          doctest::Approx(0.5 * (1.0 - std::exp(-1.0))).epsilon(1e-12));

    // needle in one corner forces recursive refinement
    auto needle = [](double x, double y) {
        const double dx = x - 0.1, dy = y - 0.1;
        return std::exp(-(dx * dx + dy * dy) / 2e-4);
    };
    const double expected = 2e-4 * M_PI; // full Gaussian mass, tails negligible
    CHECK(integrate_cell_2d(needle, 0.0, 1.0, 0.0, 1.0, 1e-12, 1e-10) ==
          doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("integrate_cell_2d against Monte Carlo on a smooth cell") {
    auto f = [](double w, double s) { return std::exp(w * s) * std::cos(3.0 * w) + w * w; };
    const double quad_val = integrate_cell_2d(f, 0.2, 0.7, 0.1, 0.9, 1e-12, 1e-12);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uw(0.2, 0.7), us(0.1, 0.9);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = f(uw(rng), us(rng));
        sum += v;
        sum2 += v * v;
    }
    const double area = 0.5 * 0.8;
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n) * area;
    CHECK(std::abs(quad_val - mean * area) < 3.0 * se);
}

TEST_CASE("determinism of quadrature values") {
    auto f = [](double w, double s) { return std::sin(w * 7.0) * std::exp(s * s); };
    const double a = integrate_cell_2d(f, 0.0, 1.3, 0.0, 0.9, 1e-11, 1e-11);
    const double b = integrate_cell_2d(f, 0.0, 1.3, 0.0, 0.9, 1e-11, 1e-11);
    CHECK(a == b);
}
