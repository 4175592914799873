#pragma once

#include "dlpsmpc/dlp_core.hpp"
#include "dlpsmpc/moments.hpp"

#include <span>
#include <vector>

namespace dlp {

/// Leave-one-out products over the horizon, entry j excluding step j.
///
///   a_plus/a_minus : prod_{i != j} (1 +/- mu_i w_i)
///   b_plus/b_minus : prod_{i != j} ((1 +/- mu_i w_i)^2 + sigma_i^2 w_i^2)
///   c_cross        : prod_{i != j} (1 - w_i^2 (mu_i^2 + sigma_i^2))
///   d_plus/d_minus : b - a^2, accumulated without subtraction
///   e_cross        : c - a_plus a_minus, accumulated without subtraction
///
/// Built from prefix and suffix products; no division by a factor.
struct LeaveOneOut {
    std::vector<double> a_plus, a_minus;
    std::vector<double> b_plus, b_minus;
    std::vector<double> c_cross;
    std::vector<double> d_plus, d_minus;
    std::vector<double> e_cross;
};

LeaveOneOut leave_one_out(const HorizonSpec& spec, std::span<const double> w);

/// dJ/dw_j = mu_j (A_j^+ V_L - A_j^- V_S) - gamma z^T Sigma'_j z.
std::vector<double> grad_objective(const HorizonSpec& spec, std::span<const double> w, const AccountState& state);

/// dh/dw_j = mu_j (A_j^+ V_L - A_j^- V_S).
std::vector<double> grad_expected_gain(const HorizonSpec& spec, std::span<const double> w,
                                       const AccountState& state);

/// Objective and its gradient from one pass over the horizon.
struct ValueAndGradient {
    double objective = 0.0;
    double gain = 0.0;
    std::vector<double> grad_objective;
    std::vector<double> grad_gain;
};

ValueAndGradient evaluate_with_gradient(const HorizonSpec& spec, std::span<const double> w,
                                        const AccountState& state);

}  // namespace dlp
