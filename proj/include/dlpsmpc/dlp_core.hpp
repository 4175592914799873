#pragma once

namespace dlp {

/// Long and short account values z = (V_L, V_S).
struct AccountState {
    double v_long = 50.0;
    double v_short = 50.0;

    /// Throws std::invalid_argument unless v_long > 0 and v_short >= 0.
    static AccountState make(double v_long, double v_short);
    /// Splits `capital` equally between the two accounts.
    static AccountState split(double capital);

    bool valid() const noexcept;
    bool operator==(const AccountState&) const = default;
};

/// V = V_L + V_S.
inline double total_value(const AccountState& s) noexcept { return s.v_long + s.v_short; }

/// Largest admissible weight.
struct WeightBound {
    double w_max = 1.0;
};

/// Proportional turnover cost: each account pays epsilon * |w - w_prev| of its value.
struct CostModel {
    double epsilon = 0.0;
    double w_prev = 0.0;
};

/// min{1, 1/x_max}; with epsilon > 0 additionally min{1/(eps - x_min), 1/(x_max + eps)}.
/// Throws std::invalid_argument unless -1 < x_min < 0 < x_max and epsilon in [0, 1).
WeightBound weight_bound(double x_min, double x_max, double epsilon = 0.0);

/// One closed-loop period of the symmetric double linear policy:
///   V_L' = V_L (1 + w x - eps |w - w_prev|),  V_S' = V_S (1 - w x - eps |w - w_prev|).
AccountState step_accounts(const AccountState& state, double w, double x, const CostModel& cost = {});

/// General (asymmetric) form with independent long/short weights and no costs.
AccountState step_accounts_asymmetric(const AccountState& state, double w_long, double w_short, double x);

}  // namespace dlp
