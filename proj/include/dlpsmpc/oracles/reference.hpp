#pragma once

// Reference computations used as independent oracles by the test suites and
// the `verify` subcommand. Nothing here calls into the production modules:
// every quantity is recomputed from its definition, in extended precision
// where round-off would otherwise dominate.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dlp::oracle {

struct TwoMoments {
    long double mean = 0.0L;
    long double variance = 0.0L;
};

/// Exact mean and variance of V_L d+ + V_S d- where each X(i) takes
/// mu_i +/- sigma_i with probability 1/2, by enumerating all 2^H paths.
TwoMoments enumerate_wealth(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                            std::span<const double> sigma2);

/// Mean and variance from the closed-form products and the 2x2 matrices
/// E[y] = c^T Phi z, var = z^T (M - Phi^T c c^T Phi) z, in long double.
TwoMoments matrix_moments(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                          std::span<const double> sigma2);

/// J = mean - gamma * variance via matrix_moments.
long double matrix_objective(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                             std::span<const double> sigma2, double gamma);

/// h = mean - (v_long + v_short) via matrix_moments.
long double matrix_gain(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                        std::span<const double> sigma2);

using ScalarFn = std::function<long double(std::span<const double>)>;

/// Central differences (f(w + h e_j) - f(w - h e_j)) / 2h for each coordinate.
std::vector<double> central_difference(const ScalarFn& f, std::span<const double> w, double step = 1e-6);

/// Max over all pairs i <= j of (V_i - V_j) / V_i, in percent.
double brute_force_drawdown(std::span<const double> curve);

/// Projected gradient descent on 0.5 x^T A x + b^T x over a box, step 1/L with
/// L the Gershgorin bound, until the projected step is below `tol`.
std::vector<double> projected_gradient_qp(const std::vector<std::vector<double>>& a, std::span<const double> b,
                                          std::span<const double> lower, std::span<const double> upper,
                                          double tol = 1e-13, std::size_t max_iter = 2000000);

struct GridBest {
    double w0 = 0.0;
    double w1 = 0.0;
    long double value = 0.0L;
    bool found = false;
};

/// Best value of `objective` over an n x n grid on [0, w_max]^2 among points
/// with `constraint` >= 0.
GridBest grid_best_2d(const ScalarFn& objective, const ScalarFn& constraint, double w_max, std::size_t n);

/// Arg-max of `objective` over n equispaced points of [0, w_max] with `constraint` >= 0.
double grid_argmax_1d(const ScalarFn& objective, const ScalarFn& constraint, double w_max, std::size_t n);

}  // namespace dlp::oracle
