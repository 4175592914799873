#pragma once

#include "dlpsmpc/auglag.hpp"
#include "dlpsmpc/dlp_core.hpp"
#include "dlpsmpc/lbfgsb.hpp"
#include "dlpsmpc/market_data.hpp"
#include "dlpsmpc/moments.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dlp {

struct ControllerConfig {
    double gamma = 0.1;
    std::size_t horizon = 29;
    std::size_t window = 18;
    double epsilon_cost = 0.0;
    ALConfig al;
    SolverConfig solver;
    /// Bypasses the optimizer and applies this weight at every step.
    std::optional<double> forced_weight;

    void validate() const;
};

/// One realized period [k, k+1).
struct StepRecord {
    std::size_t index = 0;
    double weight = 0.0;           // w_k applied over the period
    double realized_return = 0.0;  // X(k)
    double mu_hat = 0.0;           // NaN when no estimate exists
    double sigma2_hat = 0.0;
    AccountState after;            // state at k+1
    bool warmup = false;
    bool al_feasible = true;
    bool fallback = false;
    std::size_t outer_iters = 0;
    std::size_t inner_iters = 0;
};

struct Trajectory {
    std::string strategy;
    AccountState initial;
    double w_max = 1.0;
    std::vector<StepRecord> steps;
    std::vector<Date> dates;  // steps.size() + 1 entries, or empty

    /// Total value at k = 0 .. steps.size().
    std::vector<double> equity() const;
    AccountState state_at(std::size_t k) const;
    std::size_t fallbacks() const;
};

/// Outcome of one receding-horizon decision.
struct HorizonDecision {
    double weight = 0.0;               // first component actually applied
    std::vector<double> plan;          // full horizon after fallback / tie-break
    ALResult al;
    bool fallback = false;             // AL ended infeasible, zero weights used
    bool zero_preferred = false;       // zero weights matched or beat the solver's J
};

using EventSink = std::function<void(std::string_view)>;

/// Constrained solve plus the controller policies: zero weights when every
/// AL round ends infeasible, and zero weights when they are at least as good.
HorizonDecision solve_horizon(const HorizonSpec& spec, const AccountState& state, const ALConfig& al,
                              const SolverConfig& solver, std::span<const double> w0);

/// Single-step decision from rolling estimates. `w_prev` empty marks the first
/// tradable step, which starts the solver from w_max / 2.
HorizonDecision run_horizon_solve(const AccountState& state, const RollingEstimate& stats,
                                  const ControllerConfig& cfg, double w_max, std::optional<double> w_prev);

/// Receding-horizon execution over `returns` from capital v0 split equally.
/// Warm-up steps (k < window) hold zero weight.
Trajectory run(const ReturnSeries& returns, double v0, const ControllerConfig& cfg, const EventSink& log = {});

}  // namespace dlp
