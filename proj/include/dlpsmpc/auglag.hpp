#pragma once

#include "dlpsmpc/dlp_core.hpp"
#include "dlpsmpc/lbfgsb.hpp"
#include "dlpsmpc/moments.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dlp {

struct ALConfig {
    double rho0 = 10.0;
    double lambda0 = 0.0;
    std::size_t al_maxiter = 10;
    double al_tol = 1e-8;

    void validate() const;
};

struct ALResult {
    std::vector<double> w_star;
    double objective = 0.0;  // J(w_star) without penalty
    double gain = 0.0;       // h(w_star)
    double violation = 0.0;  // max(0, -gain)
    double lambda_final = 0.0;
    double rho_final = 0.0;
    std::size_t outer_iters = 0;
    std::size_t inner_iters = 0;
    bool feasible = false;
};

struct OuterRoundTrace {
    std::size_t round;
    double rho;
    double lambda;     // multiplier used by this round's subproblem
    double violation;  // after the subproblem solve
    std::size_t inner_iterations;
};

using OuterTraceSink = std::function<void(const OuterRoundTrace&)>;

/// J(w) - (rho/2) max(0, -h(w) + lambda/rho)^2.
double al_objective(const HorizonSpec& spec, std::span<const double> w, const AccountState& state, double rho,
                    double lambda);

/// grad J(w) + rho max(0, -h(w) + lambda/rho) grad h(w); the hinge side at zero contributes nothing.
std::vector<double> al_gradient(const HorizonSpec& spec, std::span<const double> w, const AccountState& state,
                                double rho, double lambda);

/// Maximizes J subject to h(w) >= 0 over [0, w_max]^H by a sequence of
/// box-constrained subproblems: dual update lambda <- max(0, lambda - rho h),
/// stop once max(0, -h) < al_tol, otherwise double rho and warm-start.
/// Throws SolverError (tagged with the round) if an inner solve fails.
ALResult solve_constrained(const HorizonSpec& spec, const AccountState& state, const ALConfig& cfg,
                           const SolverConfig& solver_cfg, std::span<const double> w0,
                           const OuterTraceSink& trace = {});

}  // namespace dlp
