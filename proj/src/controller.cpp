#include "dlpsmpc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace dlp {

void ControllerConfig::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (window < 2) throw std::invalid_argument("window must be at least 2");
    if (!(epsilon_cost >= 0.0 && epsilon_cost < 1.0)) throw std::invalid_argument("cost rate must lie in [0, 1)");
    al.validate();
    solver.validate();
    if (forced_weight && !(*forced_weight >= 0.0)) throw std::invalid_argument("forced weight must be >= 0");
}

std::vector<double> Trajectory::equity() const {
    std::vector<double> v;
    v.reserve(steps.size() + 1);
    v.push_back(total_value(initial));
    for (const auto& s : steps) v.push_back(total_value(s.after));
    return v;
}

AccountState Trajectory::state_at(std::size_t k) const { return k == 0 ? initial : steps.at(k - 1).after; }

std::size_t Trajectory::fallbacks() const {
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const auto& s) { return s.fallback; }));
}

HorizonDecision solve_horizon(const HorizonSpec& spec, const AccountState& state, const ALConfig& al,
                              const SolverConfig& solver, std::span<const double> w0) {
    HorizonDecision d;
    d.al = solve_constrained(spec, state, al, solver, w0);
    const std::vector<double> zeros(spec.horizon(), 0.0);
    if (!d.al.feasible) {
        d.fallback = true;
        d.plan = zeros;
    } else {
        // J(0) = y_k; prefer zero exposure under indifference.
        const double y = total_value(state);
        if (d.al.objective <= y + 1e-12 * std::max(1.0, std::abs(y))) {
            d.zero_preferred = true;
            d.plan = zeros;
        } else {
            d.plan = d.al.w_star;
        }
    }
    d.weight = d.plan.front();
    return d;
}

HorizonDecision run_horizon_solve(const AccountState& state, const RollingEstimate& stats,
                                  const ControllerConfig& cfg, double w_max, std::optional<double> w_prev) {
    const auto spec = HorizonSpec::uniform(cfg.horizon, cfg.gamma, w_max, stats.mu_hat, stats.sigma2_hat);
    const double start = w_prev ? std::clamp(*w_prev, 0.0, w_max) : 0.5 * w_max;
    const std::vector<double> w0(cfg.horizon, start);
    return solve_horizon(spec, state, cfg.al, cfg.solver, w0);
}

Trajectory run(const ReturnSeries& returns, double v0, const ControllerConfig& cfg, const EventSink& log) {
    cfg.validate();
    if (returns.size() < cfg.window + 1) throw std::invalid_argument("return series shorter than window + 1");

    Trajectory traj;
    traj.strategy = cfg.forced_weight ? "smpc-forced" : "smpc";
    traj.initial = AccountState::split(v0);
    traj.w_max = weight_bound(returns.x_min(), returns.x_max(), cfg.epsilon_cost).w_max;
    traj.dates = returns.dates();
    traj.steps.reserve(returns.size());

    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    AccountState state = traj.initial;
    CostModel cost{cfg.epsilon_cost, 0.0};
    std::optional<double> last_solved;

    for (std::size_t k = 0; k < returns.size(); ++k) {
        StepRecord rec;
        rec.index = k;
        rec.realized_return = returns[k];
        rec.mu_hat = kNaN;
        rec.sigma2_hat = kNaN;
        const bool estimable = k >= cfg.window;
        RollingEstimate stats;
        if (estimable) {
            stats = rolling_stats(returns, k, cfg.window);
            rec.mu_hat = stats.mu_hat;
            rec.sigma2_hat = stats.sigma2_hat;
        }

        if (cfg.forced_weight) {
            rec.weight = std::min(*cfg.forced_weight, traj.w_max);
        } else if (!estimable) {
            rec.warmup = true;
            rec.weight = 0.0;
        } else {
            const auto d = run_horizon_solve(state, stats, cfg, traj.w_max, last_solved);
            rec.weight = d.weight;
            rec.al_feasible = d.al.feasible;
            rec.fallback = d.fallback;
            rec.outer_iters = d.al.outer_iters;
            rec.inner_iters = d.al.inner_iters;
            last_solved = d.weight;
            if (d.fallback && log) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "step %zu: augmented Lagrangian infeasible (violation %.3g), zero weight applied",
                              k, d.al.violation);
                log(buf);
            }
        }

        rec.after = step_accounts(state, rec.weight, rec.realized_return, cost);
        cost.w_prev = rec.weight;
        state = rec.after;
        traj.steps.push_back(rec);
    }
    return traj;
}

}  // namespace dlp
