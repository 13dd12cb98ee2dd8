#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cosbem/cosexp.hpp"
#include "cosbem/errors.hpp"
#include "cosbem/quad.hpp"

#include <cmath>
#include <complex>

using namespace cosbem;
using namespace cosbem::cosexp;
using cplx = std::complex<double>;

namespace {

models::BSParams sec32_bs() { return models::BSParams::constant_rate(0.2, 0.05, 0.0); }
models::HestonParams table3() { return models::HestonParams(4.0, 0.04, 0.1, -0.5, 0.05, 0.02); }

} // namespace

TEST_CASE("cos_coefficients of a Gaussian cf: normalization and A_n quadrature") {
    models::BSParams p = sec32_bs();
    const double x0 = std::log(100.0), horizon = 0.1;
    CosInterval itv = bs_interval(p, 0.0, horizon, x0, 10.0);
    auto cf = [&](double w) { return models::bs_charfun(p, w, 0.0, horizon, x0); };
    CosSeries s = cos_coefficients(cf, itv, 64);

    auto dens = [&](double y) { return eval_series(s, y); };
    const double mass = quad::integrate_1d(dens, itv.a, itv.b, 1e-10, 1e-10);
    CHECK(std::abs(mass - 1.0) < 1e-6);

    // direct quadrature of the A_n definition (exact Gaussian integrand)
    const double var = p.sigma * p.sigma * horizon;
    const double mean = x0 + 0.05 * horizon - 0.5 * var;
    auto gauss = [&](double y) {
        return std::exp(-0.5 * (y - mean) * (y - mean) / var) / std::sqrt(2.0 * M_PI * var);
    };
    const double w = itv.width();
    for (int n = 0; n <= 10; ++n) {
        auto integrand = [&](double y) {
            return gauss(y) * std::cos(n * M_PI * (y - itv.a) / w);
        };
        const double a_n = 2.0 / w * quad::integrate_1d(integrand, itv.a, itv.b, 1e-13, 1e-13);
        CHECK(std::abs(a_n - s.coeffs[n]) < 1e-8);
    }
}

TEST_CASE("eval_series conventions") {
    CosInterval itv(-1.0, 3.0);
    CosSeries flat{itv, {2.0, 0.0, 0.0}};
    CHECK(eval_series(flat, 0.3) == doctest::Approx(1.0).epsilon(1e-15)); // halved first term
    CHECK(eval_series(flat, -0.9) == doctest::Approx(1.0).epsilon(1e-15));

    // symmetric Gaussian centered at the interval midpoint
    models::BSParams p = sec32_bs();
    const double tau = 0.5;
    const double x0 = 1.4; // center value drops out of the symmetry statement
    CosInterval g_itv = bs_interval(p, 0.0, tau, x0, 8.0);
    auto cf = [&](double w) { return models::bs_charfun(p, w, 0.0, tau, x0); };
    CosSeries s = cos_coefficients(cf, g_itv, 96);
    const double mid = 0.5 * (g_itv.a + g_itv.b);
    for (double d : {0.05, 0.31, 1.0}) {
        CHECK(std::abs(eval_series(s, mid + d) - eval_series(s, mid - d)) < 1e-10);
    }
}

TEST_CASE("series matches the exact Gaussian kernel at L = 10, N_F = 50") {
    models::BSParams p(0.105, {{0.0, 0.01}, {0.25, 0.03}}, 0.0);
    models::BSParams rev = p.reversed(1.0);
    const double s_t = 0.0, tau = 1.0, x = std::log(35.0);
    CosInterval itv = bs_interval(rev, s_t, tau, x, 10.0);
    auto cf = [&](double w) { return models::bs_charfun(rev, w, s_t, tau, x); };
    CosSeries series = cos_coefficients(cf, itv, 50);

    const double var = p.sigma * p.sigma * (tau - s_t);
    const double mean = x + models::integrated_rate(rev, s_t, tau) - 0.5 * var;
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double y = itv.a + itv.width() * i / 200.0;
        const double exact =
            std::exp(-0.5 * (y - mean) * (y - mean) / var) / std::sqrt(2.0 * M_PI * var);
        worst = std::max(worst, std::abs(eval_series(series, y) - exact));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("bs_interval geometry") {
    models::BSParams p(0.105, {{0.0, 0.01}, {0.25, 0.03}}, 0.0);
    CosInterval itv = bs_interval(p, 0.0, 1.0, std::log(40.0), 10.0);
    CHECK(itv.width() == doctest::Approx(2.0 * 10.0 * 0.105).epsilon(1e-14));
    const double drift = models::integrated_rate(p, 0.0, 1.0) - 0.5 * 0.105 * 0.105;
    CHECK(itv.a == doctest::Approx(drift - 1.05 + std::log(40.0)).epsilon(1e-14));
    // Gaussian mass outside mean +/- 10 sigma
    CHECK(0.5 * std::erfc(10.0 / std::sqrt(2.0)) < 1e-20);

    CosInterval flat = bs_interval(p, 0.0, 1.0, 0.0, 0.0);
    CHECK(flat.collapsed());
}

TEST_CASE("heston_interval cumulants against frozen independent evaluation") {
    models::HestonParams p = table3();
    CosInterval itv = heston_interval(p, 1.0, 0.01, 0.0, 30.0);
    // c1, c2 evaluated independently at 50 digits from the cumulant formulas
    const double c1_ref = 0.01368131635416724682;
    const double c2_ref = 0.03293092177196765412;
    const double c1 = 0.5 * (itv.a + itv.b);
    const double c2 = std::pow(itv.width() / 60.0, 2);
    CHECK(std::abs(c1 - c1_ref) < 1e-12);
    CHECK(std::abs(c2 - c2_ref) < 1e-12);

    // dt -> 0: interval keeps positive width
    CosInterval tiny = heston_interval(p, 1e-3, 0.01, 0.0, 30.0);
    CHECK(tiny.width() > 0.0);
    CHECK(!tiny.collapsed());

    // degenerate cumulant: v so small that c2 goes negative at short dt
    CHECK_THROWS_AS(heston_interval(p, 1e-5, 1e-8, 0.0, 30.0), cosbem::numeric_error);
}

TEST_CASE("heston_interval density mass and pointwise inversion") {
    models::HestonParams p = table3();
    const double dt = 0.05, v = 0.01, x = 0.0;
    CosInterval itv = heston_interval(p, dt, v, x, 30.0);
    auto cf = [&](double w) { return models::heston_logprice_charfun(p, w, x, v, dt); };
    CosSeries s = cos_coefficients(cf, itv, 128);
    auto dens = [&](double y) { return eval_series(s, y); };
    const double mass = quad::integrate_1d(dens, itv.a, itv.b, 1e-9, 1e-9);
    CHECK(std::abs(mass - 1.0) < 1e-4);

    // shape check: series equals direct Fourier inversion of phi
    for (double y : {-0.02, 0.0, 0.015}) {
        auto f = [&](double om) {
            return (cf(om) * std::exp(cplx(0.0, -om * y))).real() / M_PI;
        };
        const double direct = quad::integrate_1d(f, 0.0, 2500.0, 1e-11, 1e-10);
        CHECK(std::abs(eval_series(s, y) - direct) < 1e-6);
    }
}

TEST_CASE("estimate_nf_bs reproduces the worked example and its inequality") {
    models::BSParams p = sec32_bs();
    const double horizon = 0.1;
    CosInterval itv = bs_interval(p, 0.0, horizon, std::log(100.0), 10.0);
    const int n_f = estimate_nf_bs(p, horizon, itv, 1e-3);
    CHECK(n_f == 25);

    // defining inequality holds at N and fails at N - 1
    const double w = itv.width();
    auto lhs = [&](int n) {
        const double d = 0.5 * std::pow(p.sigma * M_PI / w, 2) * horizon;
        return 2.0 / w * std::exp(-d * n * n);
    };
    CHECK(lhs(n_f) <= 1e-3);
    CHECK(lhs(n_f - 1) > 1e-3);

    // monotone in eps
    CHECK(estimate_nf_bs(p, horizon, itv, 0.5e-3) >= n_f);
    CHECK(estimate_nf_bs(p, horizon, itv, 0.999) >= 1);
}

TEST_CASE("truncation_error_bound") {
    models::BSParams p = sec32_bs();
    const double horizon = 0.1;
    const double x0 = std::log(100.0);
    CosInterval itv = bs_interval(p, 0.0, horizon, x0, 10.0);
    auto cf = [&](double w) { return models::bs_charfun(p, w, 0.0, horizon, x0); };
    const double b25 = truncation_error_bound(cf, itv, 25, 600);
    const double b40 = truncation_error_bound(cf, itv, 40, 600);
    CHECK(b40 <= b25); // non-increasing in n_start
    const double first = 2.0 / itv.width() * std::abs(cf(25 * M_PI / itv.width()));
    CHECK(b25 >= first);
    CHECK(b25 < 10.0 * first); // the first term dominates the tail

    // Heston short-maturity case: the 128-term tail bound, frozen against an
    // independent 30-digit evaluation, decaying by orders of magnitude as the
    // series start moves out
    models::HestonParams h = table3();
    const double dt = 0.05;
    CosInterval hitv = heston_interval(h, dt, 0.01, 0.0, 30.0);
    auto phat = [&](double om) { return models::heston_cond_charfun(h, om, 0.01, 0.01, dt); };
    const double tail128 = truncation_error_bound(phat, hitv, 128, 750);
    CHECK(tail128 == doctest::Approx(1.3878072e-5).epsilon(1e-6));
    CHECK(truncation_error_bound(phat, hitv, 96, 750) > 100.0 * tail128);
    CHECK(truncation_error_bound(phat, hitv, 64, 750) > 1e4 * tail128);
}

TEST_CASE("payoff coefficients: identities and quadrature oracles") {
    models::HestonParams p = table3();
    CosInterval itv = heston_interval(p, 1.0, 0.01, std::log(110.0), 30.0);
    const double strike = 100.0;
    const double log_e = std::log(strike);
    const int n_terms = 12;
    const double w = itv.width();

    SUBCASE("empty clip yields zeros") {
        auto v = payoff_coeffs_call(itv, strike, itv.b + 1.0, itv.b + 2.0, n_terms);
        for (double x : v) CHECK(x == 0.0);
        auto c = payoff_coeffs_cash(itv, 5.0, 4.0, n_terms);
        for (double x : c) CHECK(x == 0.0);
    }

    SUBCASE("n = 0 closed forms") {
        auto v = payoff_coeffs_call(itv, strike, log_e, itv.b, n_terms);
        const double hi = itv.b, lo = std::max(itv.a, log_e);
        CHECK(v[0] == doctest::Approx(std::exp(hi) - std::exp(lo) - strike * (hi - lo))
                          .epsilon(1e-13));
        auto c = payoff_coeffs_cash(itv, itv.a, itv.b, n_terms);
        CHECK(c[0] == doctest::Approx(w).epsilon(1e-14));
        for (int n = 1; n < n_terms; ++n) CHECK(std::abs(c[n]) < 1e-13); // orthogonality
        auto d = payoff_coeffs_call_dx(itv, strike, log_e, itv.b, n_terms);
        CHECK(d[0] == 0.0);
    }

    SUBCASE("quadrature cross-checks") {
        auto call = payoff_coeffs_call(itv, strike, log_e, itv.b, n_terms);
        auto cash = payoff_coeffs_cash(itv, log_e, itv.b, n_terms);
        auto calldx = payoff_coeffs_call_dx(itv, strike, log_e, itv.b, n_terms);
        const double lo = std::max(itv.a, log_e), hi = itv.b;
        for (int n = 1; n <= 5; ++n) {
            const double k = n * M_PI / w;
            auto f_call = [&](double y) { return (std::exp(y) - strike) * std::cos(k * (y - itv.a)); };
            auto f_cash = [&](double y) { return std::cos(k * (y - itv.a)); };
            auto f_dx = [&](double y) {
                return (std::exp(y) - strike) * std::sin(k * (y - itv.a)) * k;
            };
            CHECK(std::abs(call[n] - quad::integrate_1d(f_call, lo, hi, 1e-13, 1e-13)) < 1e-10);
            CHECK(std::abs(cash[n] - quad::integrate_1d(f_cash, lo, hi, 1e-14, 1e-14)) < 1e-12);
            CHECK(std::abs(calldx[n] - quad::integrate_1d(f_dx, lo, hi, 1e-13, 1e-13)) < 1e-10);
        }
    }

    SUBCASE("disjoint-interval additivity") {
        const double m = 0.5 * (log_e + itv.b);
        auto left = payoff_coeffs_call(itv, strike, log_e, m, n_terms);
        auto right = payoff_coeffs_call(itv, strike, m, itv.b, n_terms);
        auto full = payoff_coeffs_call(itv, strike, log_e, itv.b, n_terms);
        for (int n = 0; n < n_terms; ++n)
            CHECK(std::abs(left[n] + right[n] - full[n]) < 1e-12 * std::max(1.0, std::abs(full[n])));
    }

    SUBCASE("sine variant equals d/dx of the cosine variant under interval shift") {
        // V_n(x) = int_clip (e^y - E) cos(n pi (y - a0 - x)/w) dy with fixed clip
        const double h = 1e-6;
        const double lo = std::max(itv.a + 1e-3, log_e); // clip endpoints stay fixed
        const double hi = itv.b - 1e-3;
        auto at_shift = [&](double dx) {
            CosInterval shifted(itv.a + dx, itv.b + dx);
            return payoff_coeffs_call(shifted, strike, lo, hi, n_terms);
        };
        auto plus = at_shift(h), minus = at_shift(-h);
        auto sine = payoff_coeffs_call_dx(itv, strike, lo, hi, n_terms);
        for (int n = 0; n < n_terms; ++n) {
            const double fd = (plus[n] - minus[n]) / (2.0 * h);
            CHECK(std::abs(sine[n] - fd) < 1e-6 * std::max(1.0, std::abs(sine[n])));
        }
    }
}

TEST_CASE("collapsed interval behavior") {
    CosInterval flat(1.0, 1.0);
    CHECK(flat.collapsed());
    auto v = payoff_coeffs_call(flat, 10.0, 0.0, 2.0, 4);
    for (double x : v) CHECK(x == 0.0);
    auto cf = [](double) { return std::complex<double>(1.0, 0.0); };
    CosSeries s = cos_coefficients(cf, flat, 4);
    CHECK(eval_series(s, 1.0) == 0.0);
}
