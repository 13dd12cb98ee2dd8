#pragma once

#include <cmath>
#include <stdexcept>

namespace cosbem {

enum class Payoff { vanilla_put, vanilla_call, cash_or_nothing_call };
enum class BarrierKind { up_and_out, down_and_out };

// Knock-out option contract in both price and log coordinates.
struct OptionSpec {
    Payoff payoff;
    BarrierKind barrier_kind;
    double strike;   // E > 0
    double barrier;  // S_B > 0
    double maturity; // T > 0, years

    OptionSpec(Payoff p, BarrierKind b, double strike_, double barrier_, double maturity_)
        : payoff(p), barrier_kind(b), strike(strike_), barrier(barrier_), maturity(maturity_) {
        if (!(strike > 0.0)) throw std::invalid_argument("OptionSpec: strike must be > 0");
        if (!(barrier > 0.0)) throw std::invalid_argument("OptionSpec: barrier must be > 0");
        if (!(maturity > 0.0)) throw std::invalid_argument("OptionSpec: maturity must be > 0");
    }

    double log_strike() const { return std::log(strike); }
    double log_barrier() const { return std::log(barrier); }

    // Evaluation spots must lie strictly on the live side of the barrier.
    bool is_live(double spot) const {
        return barrier_kind == BarrierKind::up_and_out ? spot < barrier : spot > barrier;
    }
};

// Cosine-expansion configuration. Defaults are set per model by the pricers
// (Black-Scholes: L = 10, n_f = 50; Heston: L = 30, n_f = 128).
struct CosCfg {
    double width_l; // interval half-width in standard deviations
    int n_f;        // number of series terms

    CosCfg(double l, int n) : width_l(l), n_f(n) {
        if (!(width_l > 0.0)) throw std::invalid_argument("CosCfg: L must be > 0");
        if (n_f < 1) throw std::invalid_argument("CosCfg: n_f must be >= 1");
    }

    static CosCfg bs_default() { return CosCfg(10.0, 50); }
    static CosCfg heston_default() { return CosCfg(30.0, 128); }
};

} // namespace cosbem
