#include "dlpsmpc/dlp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dlp {

namespace {

// At w = w_max and x = x_max the short factor is exactly zero in exact
// arithmetic; round-off can leave it a few ulps below. Larger negatives
// (inadmissible weights) are passed through unchanged.
double boundary_factor(double f) noexcept {
    constexpr double slack = 8.0 * std::numeric_limits<double>::epsilon();
    return (f < 0.0 && f >= -slack) ? 0.0 : f;
}

}  // namespace

AccountState AccountState::make(double v_long, double v_short) {
    AccountState s{v_long, v_short};
    if (!s.valid()) throw std::invalid_argument("account state requires v_long > 0 and v_short >= 0");
    return s;
}

AccountState AccountState::split(double capital) {
    if (!(capital > 0.0) || !std::isfinite(capital)) throw std::invalid_argument("initial capital must be positive");
    return {0.5 * capital, 0.5 * capital};
}

bool AccountState::valid() const noexcept {
    return v_long > 0.0 && v_short >= 0.0 && std::isfinite(v_long) && std::isfinite(v_short);
}

WeightBound weight_bound(double x_min, double x_max, double epsilon) {
    if (!(x_min > -1.0 && x_min < 0.0 && x_max > 0.0) || !std::isfinite(x_max))
        throw std::invalid_argument("weight_bound requires -1 < x_min < 0 < x_max");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("cost rate must lie in [0, 1)");

    double w = std::min(1.0, 1.0 / x_max);
    if (epsilon > 0.0) w = std::min({w, 1.0 / (epsilon - x_min), 1.0 / (x_max + epsilon)});
    return {w};
}

AccountState step_accounts(const AccountState& state, double w, double x, const CostModel& cost) {
    const double friction = cost.epsilon * std::abs(w - cost.w_prev);
    return {state.v_long * (1.0 + w * x - friction), state.v_short * boundary_factor(1.0 - w * x - friction)};
}

AccountState step_accounts_asymmetric(const AccountState& state, double w_long, double w_short, double x) {
    // pi_L = w_L V_L, pi_S = -w_S V_S; V(k+1) = V(k) + X(k) pi(k).
    return {state.v_long + x * (w_long * state.v_long), state.v_short + x * (-w_short * state.v_short)};
}

}  // namespace dlp
