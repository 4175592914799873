#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace dlp {

struct SolverConfig {
    std::size_t memory = 10;     // stored curvature pairs, 1..50
    double tol = 1e-8;           // sup-norm of the free gradient
    std::size_t max_iter = 500;
    std::size_t ls_max = 20;     // backtracking halvings per line search
    double armijo = 1e-4;

    void validate() const;
};

enum class SolverStatus {
    Converged,   // free-gradient sup-norm <= tol
    NoProgress,  // line search could not decrease f even along steepest descent
    MaxIter,
};

struct SolverResult {
    std::vector<double> x_star;
    double f_star = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    double pg_norm = 0.0;
    SolverStatus status = SolverStatus::MaxIter;
};

/// Writes f(x) and returns it; must fill `grad` (same length as x).
using ObjectiveFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BoxProblem {
    std::vector<double> lower;
    std::vector<double> upper;
    ObjectiveFn eval;

    std::size_t dim() const noexcept { return lower.size(); }
};

struct IterationTrace {
    std::size_t iteration;
    double f;
    double pg_norm;
    std::size_t active;  // coordinates at a bound at the Cauchy point
    std::size_t pairs;   // stored curvature pairs
};

using TraceSink = std::function<void(const IterationTrace&)>;

/// Limited set of (s, y) pairs with s^T y > 0, oldest first.
class CurvatureMemory {
public:
    explicit CurvatureMemory(std::size_t capacity) : capacity_(capacity) {}

    /// Stores the pair when s^T y > eps * y^T y; evicts the oldest beyond capacity.
    bool push(std::vector<double> s, std::vector<double> y);
    void clear() noexcept { s_.clear(), y_.clear(); theta_ = 1.0; }

    std::size_t size() const noexcept { return s_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    /// Base curvature scaling y^T y / s^T y of the newest pair; 1 when empty.
    double theta() const noexcept { return theta_; }
    const std::deque<std::vector<double>>& s() const noexcept { return s_; }
    const std::deque<std::vector<double>>& y() const noexcept { return y_; }

private:
    std::size_t capacity_;
    std::deque<std::vector<double>> s_, y_;
    double theta_ = 1.0;
};

/// Elementwise clamp of x into [lower, upper].
std::vector<double> project(std::span<const double> x, std::span<const double> lower, std::span<const double> upper);

/// Sup-norm of the gradient over coordinates not held at a bound by the sign of g.
double free_gradient_norm(std::span<const double> x, std::span<const double> g, std::span<const double> lower,
                          std::span<const double> upper);

/// Box-constrained limited-memory BFGS: generalized Cauchy point on the
/// projected-gradient path, Newton step of the quadratic model on the free
/// subspace, projected Armijo backtracking.
///
/// x0 is projected into the box first. Throws SolverError when the objective
/// or its gradient is non-finite at an evaluated point.
SolverResult minimize(const BoxProblem& problem, std::span<const double> x0, const SolverConfig& cfg = {},
                      const TraceSink& trace = {});

}  // namespace dlp
