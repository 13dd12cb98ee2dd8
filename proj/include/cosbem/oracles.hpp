#pragma once

#include "cosbem/models.hpp"
#include "cosbem/types.hpp"

#include <cstdint>

namespace cosbem::oracles {

// Monte Carlo configuration; paths are generated from counter-based
// per-path substreams, so results are independent of the worker count.
struct McConfig {
    long long n_paths;
    int n_steps;
    std::uint64_t seed;
    double confidence = 0.95;
    int n_threads = 0; // 0: hardware concurrency

    McConfig(long long n, int m, std::uint64_t seed_, double conf = 0.95, int threads = 0)
        : n_paths(n), n_steps(m), seed(seed_), confidence(conf), n_threads(threads) {
        if (n_paths < 100) throw std::invalid_argument("McConfig: n_paths must be >= 100");
        if (n_steps < 10) throw std::invalid_argument("McConfig: n_steps must be >= 10");
        if (!(conf > 0.0 && conf < 1.0))
            throw std::invalid_argument("McConfig: confidence must lie in (0, 1)");
    }
};

struct McEstimate {
    double mean;
    double half_width; // CI = mean +- half_width at the configured level
    long long n_knocked;
};

// Black-Scholes closed form (constant rate).
double bs_vanilla(const models::BSParams& p, Payoff payoff, double spot, double strike,
                  double maturity);

// Heston vanilla by semi-analytic Fourier integration of the log-price
// characteristic function, adaptive quadrature to ~1e-10.
double heston_vanilla(const models::HestonParams& p, Payoff payoff, double spot, double v,
                      double strike, double maturity);

// Cash-or-nothing call paying 1_{S_T > E}, discounted.
double heston_digital(const models::HestonParams& p, double spot, double v, double strike,
                      double maturity);

// Full-truncation Euler scheme with discrete knock-out monitoring at each of
// the n_steps dates. Deterministic for a fixed (seed, config).
McEstimate mc_barrier(const models::HestonParams& p, const OptionSpec& opt, double spot,
                      double v, const McConfig& cfg);

namespace detail {
// Philox4x32-10 counter-based generator: one block of four 32-bit words per
// (path, step) pair.
struct PhiloxBlock {
    std::uint32_t w[4];
};
PhiloxBlock philox4x32(std::uint64_t key, std::uint64_t path, std::uint32_t step);
// standard-normal pair from one philox block (Box-Muller)
void normal_pair(std::uint64_t key, std::uint64_t path, std::uint32_t step, double& z1,
                 double& z2);
double normal_quantile(double prob);
} // namespace detail

} // namespace cosbem::oracles
