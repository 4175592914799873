#pragma once

#include "dlpsmpc/dlp_core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dlp {

/// Prediction horizon with per-step conditional return moments.
class HorizonSpec {
public:
    /// Throws std::invalid_argument on length mismatch, negative variances,
    /// gamma < 0 or w_max <= 0.
    HorizonSpec(double gamma, double w_max, std::vector<double> mus, std::vector<double> sigma2s);
    /// The same (mu, sigma2) at every step of a horizon of length h.
    static HorizonSpec uniform(std::size_t h, double gamma, double w_max, double mu, double sigma2);

    std::size_t horizon() const noexcept { return mus_.size(); }
    double gamma() const noexcept { return gamma_; }
    double w_max() const noexcept { return w_max_; }
    std::span<const double> mus() const noexcept { return mus_; }
    std::span<const double> sigma2s() const noexcept { return sigma2s_; }

    HorizonSpec with_gamma(double gamma) const;
    /// True when every w_i lies in [0, w_max] and the length matches.
    bool admissible(std::span<const double> w) const noexcept;

private:
    double gamma_;
    double w_max_;
    std::vector<double> mus_;
    std::vector<double> sigma2s_;
};

/// Conditional moments of the H-step-ahead wealth y_{k+H}.
///
/// p_plus/p_minus are the diagonal of the expected transition matrix,
/// q_plus/q_minus and m_cross the entries of the second-moment matrix M.
/// The covariance entries cov_* are Sigma = M - Phi^T c c^T Phi computed by
/// recurrences instead of differencing the products. `variance` is
/// accumulated in the basis of summed and differenced growth factors, which
/// stays accurate when the two accounts are nearly equal.
struct MomentSet {
    double p_plus = 1.0;
    double p_minus = 1.0;
    double q_plus = 1.0;
    double q_minus = 1.0;
    double m_cross = 1.0;
    double cov_long = 0.0;   // q_plus - p_plus^2
    double cov_short = 0.0;  // q_minus - p_minus^2
    double cov_cross = 0.0;  // m_cross - p_plus p_minus
    double mean = 0.0;
    double variance = 0.0;
};

/// Throws std::invalid_argument if `w` is not admissible or `state` invalid,
/// InvariantError if the variance is negative beyond round-off.
MomentSet predict_moments(const HorizonSpec& spec, std::span<const double> w, const AccountState& state);

/// J(w) = E_k[y_{k+H}] - gamma var_k(y_{k+H}).
double objective(const HorizonSpec& spec, std::span<const double> w, const AccountState& state);

/// h(w) = E_k[y_{k+H}] - y_k.
double expected_gain(const HorizonSpec& spec, std::span<const double> w, const AccountState& state);

}  // namespace dlp
