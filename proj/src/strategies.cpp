#include "dlpsmpc/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dlp {

std::string BenchmarkSpec::name() const {
    switch (kind) {
    case BenchmarkKind::Constant: return "constant";
    case BenchmarkKind::BuyAndHold: return "buy_and_hold";
    case BenchmarkKind::LogRamp: return "w1";
    case BenchmarkKind::Oscillating: return "w2";
    case BenchmarkKind::EndsWeighted: return "w3";
    }
    return "unknown";
}

std::optional<BenchmarkKind> BenchmarkSpec::parse_kind(std::string_view text) {
    if (text == "constant") return BenchmarkKind::Constant;
    if (text == "buy_and_hold" || text == "buy-and-hold") return BenchmarkKind::BuyAndHold;
    if (text == "w1") return BenchmarkKind::LogRamp;
    if (text == "w2") return BenchmarkKind::Oscillating;
    if (text == "w3") return BenchmarkKind::EndsWeighted;
    return std::nullopt;
}

double weight_at(const BenchmarkSpec& spec, std::size_t k, double w_max) {
    if (spec.n_total < 2) throw std::invalid_argument("n_total must be at least 2");
    if (k > spec.n_total) throw std::out_of_range("step index beyond n_total");
    const double n = static_cast<double>(spec.n_total);
    const double kk = static_cast<double>(k);

    double w = 0.0;
    switch (spec.kind) {
    case BenchmarkKind::Constant:
        w = spec.constant_weight;
        break;
    case BenchmarkKind::BuyAndHold:
        return 1.0;
    case BenchmarkKind::LogRamp:
        w = std::log(1.0 + (kk / n) * (std::numbers::e - 1.0));
        break;
    case BenchmarkKind::Oscillating: {
        const double arg = (0.02 / n) * kk - 0.01;
        // sin(1/x) has no limit at 0; use the midpoint of its range.
        w = arg == 0.0 ? 0.5 : 0.5 * (std::sin(1.0 / arg) + 1.0);
        break;
    }
    case BenchmarkKind::EndsWeighted: {
        const double f = (4.0 / n) * kk - 2.0;
        const double v = f == 0.0 ? 0.0 : f * std::sin(1.0 / f);
        w = v >= 0.0 ? v : 0.0;
        break;
    }
    }
    return std::clamp(w, 0.0, w_max);
}

Trajectory run_benchmark(const ReturnSeries& returns, double v0, const BenchmarkSpec& schedule, double epsilon_cost) {
    if (returns.size() < 1) throw std::invalid_argument("empty return series");
    BenchmarkSpec spec = schedule;
    if (spec.n_total == 0) spec.n_total = std::max<std::size_t>(returns.size(), 2);
    if (spec.kind == BenchmarkKind::Constant && !(spec.constant_weight >= 0.0))
        throw std::invalid_argument("constant weight must be non-negative");

    Trajectory traj;
    traj.strategy = spec.name();
    traj.w_max = weight_bound(returns.x_min(), returns.x_max(), epsilon_cost).w_max;
    traj.dates = returns.dates();
    traj.steps.reserve(returns.size());
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    if (spec.kind == BenchmarkKind::BuyAndHold) {
        traj.initial = AccountState::make(v0, 0.0);
        AccountState state = traj.initial;
        for (std::size_t k = 0; k < returns.size(); ++k) {
            StepRecord rec;
            rec.index = k;
            rec.weight = 1.0;
            rec.realized_return = returns[k];
            rec.mu_hat = rec.sigma2_hat = kNaN;
            state.v_long *= 1.0 + returns[k];
            rec.after = state;
            traj.steps.push_back(rec);
        }
        return traj;
    }

    traj.initial = AccountState::split(v0);
    AccountState state = traj.initial;
    CostModel cost{epsilon_cost, 0.0};
    for (std::size_t k = 0; k < returns.size(); ++k) {
        StepRecord rec;
        rec.index = k;
        rec.weight = weight_at(spec, k, traj.w_max);
        rec.realized_return = returns[k];
        rec.mu_hat = rec.sigma2_hat = kNaN;
        rec.after = step_accounts(state, rec.weight, rec.realized_return, cost);
        cost.w_prev = rec.weight;
        state = rec.after;
        traj.steps.push_back(rec);
    }
    return traj;
}

}  // namespace dlp
