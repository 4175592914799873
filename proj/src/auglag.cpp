#include "dlpsmpc/auglag.hpp"

#include "dlpsmpc/error.hpp"
#include "dlpsmpc/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dlp {

namespace {

void check_penalty(double rho, double lambda) {
    if (!(rho > 0.0)) throw std::invalid_argument("penalty rho must be positive");
    if (!(lambda >= 0.0)) throw std::invalid_argument("multiplier lambda must be non-negative");
}

}  // namespace

void ALConfig::validate() const {
    check_penalty(rho0, lambda0);
    if (al_maxiter < 1) throw std::invalid_argument("al_maxiter must be at least 1");
    if (!(al_tol > 0.0)) throw std::invalid_argument("al_tol must be positive");
}

double al_objective(const HorizonSpec& spec, std::span<const double> w, const AccountState& state, double rho,
                    double lambda) {
    check_penalty(rho, lambda);
    const auto m = predict_moments(spec, w, state);
    const double gain = m.mean - total_value(state);
    const double hinge = std::max(0.0, -gain + lambda / rho);
    return m.mean - spec.gamma() * m.variance - 0.5 * rho * hinge * hinge;
}

std::vector<double> al_gradient(const HorizonSpec& spec, std::span<const double> w, const AccountState& state,
                                double rho, double lambda) {
    check_penalty(rho, lambda);
    auto vg = evaluate_with_gradient(spec, w, state);
    const double hinge = std::max(0.0, -vg.gain + lambda / rho);
    if (hinge > 0.0)
        for (std::size_t j = 0; j < w.size(); ++j) vg.grad_objective[j] += rho * hinge * vg.grad_gain[j];
    return vg.grad_objective;
}

ALResult solve_constrained(const HorizonSpec& spec, const AccountState& state, const ALConfig& cfg,
                           const SolverConfig& solver_cfg, std::span<const double> w0, const OuterTraceSink& trace) {
    cfg.validate();
    if (!spec.admissible(w0)) throw std::invalid_argument("initial weights outside [0, w_max]^H");

    const std::size_t h = spec.horizon();
    double rho = cfg.rho0;
    double lambda = cfg.lambda0;

    BoxProblem problem;
    problem.lower.assign(h, 0.0);
    problem.upper.assign(h, spec.w_max());
    // Negated augmented objective; rho and lambda are read by reference each round.
    problem.eval = [&](std::span<const double> w, std::span<double> grad) {
        const auto vg = evaluate_with_gradient(spec, w, state);
        const double hinge = std::max(0.0, -vg.gain + lambda / rho);
        for (std::size_t j = 0; j < h; ++j) {
            double gj = vg.grad_objective[j];
            if (hinge > 0.0) gj += rho * hinge * vg.grad_gain[j];
            grad[j] = -gj;
        }
        return -(vg.objective - 0.5 * rho * hinge * hinge);
    };

    ALResult out;
    std::vector<double> w(w0.begin(), w0.end());
    for (std::size_t round = 1; round <= cfg.al_maxiter; ++round) {
        SolverResult inner;
        try {
            inner = minimize(problem, w, solver_cfg);
        } catch (const SolverError& e) {
            throw SolverError("augmented-Lagrangian round " + std::to_string(round) + ": " + e.what());
        }
        w = inner.x_star;
        out.inner_iters += inner.iterations;
        out.outer_iters = round;

        const double gain = expected_gain(spec, w, state);
        const double violation = std::max(0.0, -gain);
        if (trace) trace({round, rho, lambda, violation, inner.iterations});

        lambda = std::max(0.0, lambda - rho * gain);
        if (violation < cfg.al_tol) break;
        rho *= 2.0;
    }

    const auto m = predict_moments(spec, w, state);
    out.w_star = std::move(w);
    out.objective = m.mean - spec.gamma() * m.variance;
    out.gain = m.mean - total_value(state);
    out.violation = std::max(0.0, -out.gain);
    out.lambda_final = lambda;
    out.rho_final = rho;
    out.feasible = out.violation < cfg.al_tol;
    return out;
}

}  // namespace dlp
