#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cosbem/bem_bs.hpp"
#include "cosbem/errors.hpp"
#include "cosbem/oracles.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace cosbem;
using namespace cosbem::bem_bs;

namespace {

models::BSParams table1_bs() { return models::BSParams(0.105, {{0.0, 0.01}, {0.25, 0.03}}, 0.0); }
OptionSpec table1_option() {
    return OptionSpec(Payoff::vanilla_put, BarrierKind::up_and_out, 50.0, 40.0, 1.0);
}

} // namespace

TEST_CASE("assembly: cosine kernel matches the closed-form Gaussian kernel") {
    models::BSParams p = table1_bs();
    OptionSpec opt = table1_option();
    quad::TimeGrid grid(6, opt.maturity);
    CosCfg cfg = CosCfg::bs_default();
    TriangularSystemBS cos_sys = assemble_bs(p, opt, grid, cfg, Kernel::cos_series);
    TriangularSystemBS exact_sys = assemble_bs(p, opt, grid, cfg, Kernel::exact_gaussian);
    for (int j = 1; j <= grid.n_steps; ++j) {
        for (int k = 1; k <= j; ++k) {
            CAPTURE(j);
            CAPTURE(k);
            CHECK(std::abs(cos_sys.at(j, k) - exact_sys.at(j, k)) < 1e-7);
        }
        CHECK(std::abs(cos_sys.rhs[j - 1] - exact_sys.rhs[j - 1]) < 1e-7);
    }

    // first-column decay away from the diagonal
    for (int j = 3; j <= grid.n_steps; ++j)
        CHECK(std::abs(cos_sys.at(j, 1)) < std::abs(cos_sys.at(j - 1, 1)));
}

TEST_CASE("solve_bs: identity system and residual") {
    quad::TimeGrid grid(4, 1.0);
    TriangularSystemBS sys{grid, std::vector<double>(10, 0.0), {1.0, 0.0, 0.0, 0.0}};
    for (int j = 1; j <= 4; ++j) sys.at(j, j) = 1.0;
    BoundaryDensityBS sol = solve_bs(sys);
    CHECK(sol.alpha[0] == 1.0);
    for (int j = 2; j <= 4; ++j) CHECK(sol.alpha[j - 1] == 0.0);

    models::BSParams p = table1_bs();
    OptionSpec opt = table1_option();
    quad::TimeGrid g8(8, opt.maturity);
    TriangularSystemBS real_sys = assemble_bs(p, opt, g8, CosCfg::bs_default());
    BoundaryDensityBS real_sol = solve_bs(real_sys);

    double norm_f = 0.0, resid = 0.0;
    for (int j = 1; j <= 8; ++j) {
        double acc = 0.0;
        for (int k = 1; k <= j; ++k) acc += real_sys.at(j, k) * real_sol.alpha[k - 1];
        resid = std::max(resid, std::abs(acc - real_sys.rhs[j - 1]));
        norm_f = std::max(norm_f, std::abs(real_sys.rhs[j - 1]));
    }
    CHECK(resid < 1e-12 * norm_f);

    // dense-solve oracle and the sign of du/dy at an upper knock-out of a put
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(8, 8);
    Eigen::VectorXd f(8);
    for (int j = 1; j <= 8; ++j) {
        f(j - 1) = real_sys.rhs[j - 1];
        for (int k = 1; k <= j; ++k) a(j - 1, k - 1) = real_sys.at(j, k);
    }
    Eigen::VectorXd dense = a.partialPivLu().solve(f);
    for (int j = 0; j < 8; ++j) {
        CHECK(std::abs(dense(j) - real_sol.alpha[j]) < 1e-10 * std::max(1.0, std::abs(dense(j))));
        CHECK(real_sol.alpha[j] <= 0.0);
    }

    TriangularSystemBS singular = real_sys;
    singular.at(3, 3) = 0.0;
    CHECK_THROWS_AS(solve_bs(singular), cosbem::numeric_error);
}

TEST_CASE("up-and-out put prices match the reference table at coarse grids") {
    models::BSParams p = table1_bs();
    OptionSpec opt = table1_option();
    CosCfg cfg = CosCfg::bs_default();

    quad::TimeGrid g4(4, opt.maturity);
    BoundaryDensityBS s4 = solve_bs(assemble_bs(p, opt, g4, cfg));
    const PriceResult v4 = price_bs(p, opt, s4, 35.0, 0.0, cfg);
    CHECK(!v4.knocked_out);
    CHECK(std::abs(v4.value - 11.43996) < 2e-3);

    quad::TimeGrid g16(16, opt.maturity);
    BoundaryDensityBS s16 = solve_bs(assemble_bs(p, opt, g16, cfg));
    const PriceResult v16 = price_bs(p, opt, s16, 35.0, 0.0, cfg);
    CHECK(std::abs(v16.value - 11.43811) < 2e-3);

    // both kernel pipelines produce the same price to 5 decimals
    BoundaryDensityBS s4e = solve_bs(assemble_bs(p, opt, g4, cfg, Kernel::exact_gaussian));
    const PriceResult v4e = price_bs(p, opt, s4e, 35.0, 0.0, cfg, Kernel::exact_gaussian);
    CHECK(std::abs(v4.value - v4e.value) < 1e-5);

    // boundary condition and payoff bound
    CHECK(price_bs(p, opt, s4, 40.0, 0.0, cfg).value == 0.0);
    CHECK(price_bs(p, opt, s4, 40.0, 0.0, cfg).knocked_out);
    CHECK(price_bs(p, opt, s4, 43.0, 0.0, cfg).knocked_out);
    const double cap = opt.strike * std::exp(-models::integrated_rate(p, 0.0, 1.0));
    for (double spot : {5.0, 20.0, 35.0, 39.5}) {
        const double value = price_bs(p, opt, s4, spot, 0.0, cfg).value;
        CHECK(value >= 0.0);
        CHECK(value <= cap);
    }

    // intermediate evaluation time stays finite and below the cap
    const PriceResult mid = price_bs(p, opt, s16, 35.0, 0.55, cfg);
    CHECK(mid.value > 0.0);
    CHECK(mid.value < opt.strike);
}

TEST_CASE("barrier pushed far away converges to the vanilla put") {
    models::BSParams p = models::BSParams::constant_rate(0.2, 0.05, 0.0);
    OptionSpec opt(Payoff::vanilla_put, BarrierKind::up_and_out, 100.0, 1e4 * 100.0, 0.5);
    CosCfg cfg = CosCfg::bs_default();
    quad::TimeGrid grid(8, opt.maturity);
    BoundaryDensityBS sol = solve_bs(assemble_bs(p, opt, grid, cfg));
    const double bem = price_bs(p, opt, sol, 90.0, 0.0, cfg).value;
    const double vanilla = oracles::bs_vanilla(p, Payoff::vanilla_put, 90.0, 100.0, 0.5);
    CHECK(std::abs(bem - vanilla) < 1e-4);
}

TEST_CASE("assemble_bs input validation") {
    models::BSParams p = table1_bs();
    OptionSpec call(Payoff::vanilla_call, BarrierKind::up_and_out, 50.0, 40.0, 1.0);
    quad::TimeGrid grid(4, 1.0);
    CHECK_THROWS_AS(assemble_bs(p, call, grid, CosCfg::bs_default()), std::invalid_argument);
    OptionSpec put = table1_option();
    quad::TimeGrid bad(4, 0.5);
    CHECK_THROWS_AS(assemble_bs(p, put, bad, CosCfg::bs_default()), std::invalid_argument);
}
