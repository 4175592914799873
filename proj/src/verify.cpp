#include "dlpsmpc/verify.hpp"

#include "dlpsmpc/auglag.hpp"
#include "dlpsmpc/controller.hpp"
#include "dlpsmpc/dlp_core.hpp"
#include "dlpsmpc/gradient.hpp"
#include "dlpsmpc/lbfgsb.hpp"
#include "dlpsmpc/metrics.hpp"
#include "dlpsmpc/moments.hpp"
#include "dlpsmpc/oracles/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace dlp {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

struct Instance {
    std::vector<double> mu, s2, w;
    double gamma, w_max;
    AccountState state;
};

// H in [h_lo, h_hi], mu in [-0.05, 0.05], sigma^2 in [0, 0.01]; a quarter of
// the weights sit exactly on a bound. One state in ten has no short
// account and one in ten has equal accounts.
Instance random_instance(Rng& rng, std::size_t h_lo, std::size_t h_hi) {
    Instance in;
    const auto h = std::uniform_int_distribution<std::size_t>(h_lo, h_hi)(rng);
    in.w_max = uniform(rng, 0.0, 1.0) < 0.5 ? 1.0 : uniform(rng, 0.3, 1.0);
    in.gamma = uniform(rng, 0.01, 1.0);
    const double v_long = uniform(rng, 1.0, 100.0);
    const double u_state = uniform(rng, 0.0, 1.0);
    in.state = {v_long, u_state < 0.1 ? 0.0 : u_state < 0.2 ? v_long : uniform(rng, 1.0, 100.0)};
    for (std::size_t i = 0; i < h; ++i) {
        in.mu.push_back(uniform(rng, -0.05, 0.05));
        in.s2.push_back(uniform(rng, 0.0, 0.01));
        const double u = uniform(rng, 0.0, 1.0);
        in.w.push_back(u < 0.125 ? 0.0 : u < 0.25 ? in.w_max : uniform(rng, 0.0, in.w_max));
    }
    return in;
}

bool gradient_entry_ok(double analytic, double fd) {
    if (std::abs(analytic) < 1e-4) return std::abs(analytic - fd) <= 1e-8;
    return std::abs(analytic - fd) <= 1e-6 * std::abs(analytic);
}

double entry_error(double analytic, double fd) {
    return std::abs(analytic) < 1e-4 ? std::abs(analytic - fd) : std::abs(analytic - fd) / std::abs(analytic);
}

std::string fmt(const char* pattern, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

SuiteOutcome verify_gradient(const VerifyOptions& opts) {
    SuiteOutcome out;
    out.name = "gradient";
    Rng rng(opts.seed);
    for (std::size_t n = 0; n < opts.gradient_instances; ++n) {
        const Instance in = random_instance(rng, 1, 10);
        const HorizonSpec spec(in.gamma, in.w_max, in.mu, in.s2);
        auto g_obj = grad_objective(spec, in.w, in.state);
        const auto g_gain = grad_expected_gain(spec, in.w, in.state);
        if (opts.corrupt_gradient_sign)
            for (auto& v : g_obj) v = -v;

        // Reference values by path enumeration: central deviations keep the
        // variance free of the Q - P^2 cancellation of the product form.
        const auto fd_obj = oracle::central_difference(
            [&](std::span<const double> w) {
                const auto m = oracle::enumerate_wealth(in.state.v_long, in.state.v_short, w, in.mu, in.s2);
                return m.mean - static_cast<long double>(in.gamma) * m.variance;
            },
            in.w);
        const auto fd_gain = oracle::central_difference(
            [&](std::span<const double> w) {
                return oracle::enumerate_wealth(in.state.v_long, in.state.v_short, w, in.mu, in.s2).mean -
                       static_cast<long double>(total_value(in.state));
            },
            in.w);
        for (std::size_t j = 0; j < in.w.size(); ++j) {
            out.checks += 2;
            out.worst = std::max({out.worst, entry_error(g_obj[j], fd_obj[j]), entry_error(g_gain[j], fd_gain[j])});
            if (!gradient_entry_ok(g_obj[j], fd_obj[j])) ++out.failures;
            if (!gradient_entry_ok(g_gain[j], fd_gain[j])) ++out.failures;
        }
    }
    out.passed = out.failures == 0;
    out.detail = fmt("worst error %.3g (relative, or absolute below 1e-4)", out.worst);
    return out;
}

SuiteOutcome verify_moments(const VerifyOptions& opts) {
    SuiteOutcome out;
    out.name = "moments";
    Rng rng(opts.seed + 1);
    for (std::size_t n = 0; n < opts.moment_instances; ++n) {
        const Instance in = random_instance(rng, 1, 6);
        const HorizonSpec spec(in.gamma, in.w_max, in.mu, in.s2);
        const auto m = predict_moments(spec, in.w, in.state);
        const auto ref = oracle::enumerate_wealth(in.state.v_long, in.state.v_short, in.w, in.mu, in.s2);
        const double mean_err = std::abs(m.mean - static_cast<double>(ref.mean)) / std::abs(static_cast<double>(ref.mean));
        const double var_ref = std::abs(static_cast<double>(ref.variance));
        const double var_scale = var_ref > 0.0 ? var_ref : 1.0;
        const double var_err = std::abs(m.variance - static_cast<double>(ref.variance)) / var_scale;
        out.checks += 2;
        out.worst = std::max({out.worst, mean_err, var_err});
        if (mean_err > 1e-12) ++out.failures;
        if (var_err > 1e-12) ++out.failures;
    }
    out.passed = out.failures == 0;
    out.detail = fmt("worst relative error %.3g", out.worst);
    return out;
}

SuiteOutcome verify_solver(const VerifyOptions& opts) {
    SuiteOutcome out;
    out.name = "solver";
    Rng rng(opts.seed + 2);
    std::string notes;

    // Separable quadratics: minimizer is clamp(c, 0, 1).
    for (std::size_t trial = 0; trial < 20; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        std::vector<double> c(n), scale(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = uniform(rng, -1.0, 2.0);
            scale[i] = uniform(rng, 0.5, 20.0);
        }
        BoxProblem p{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0),
                     [&](std::span<const double> x, std::span<double> g) {
                         double f = 0.0;
                         for (std::size_t i = 0; i < n; ++i) {
                             f += scale[i] * (x[i] - c[i]) * (x[i] - c[i]);
                             g[i] = 2.0 * scale[i] * (x[i] - c[i]);
                         }
                         return f;
                     }};
        const auto r = minimize(p, std::vector<double>(n, 0.5));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(r.x_star[i] - std::clamp(c[i], 0.0, 1.0)));
        ++out.checks;
        out.worst = std::max(out.worst, err);
        if (err > 1e-8) ++out.failures;
    }

    // Rosenbrock on [-2, 2]^2.
    {
        BoxProblem p{{-2.0, -2.0}, {2.0, 2.0}, [](std::span<const double> x, std::span<double> g) {
                         const double a = 1.0 - x[0];
                         const double b = x[1] - x[0] * x[0];
                         g[0] = -2.0 * a - 400.0 * x[0] * b;
                         g[1] = 200.0 * b;
                         return a * a + 100.0 * b * b;
                     }};
        const auto r = minimize(p, std::vector<double>{-1.2, 1.0});
        const double err = std::max(std::abs(r.x_star[0] - 1.0), std::abs(r.x_star[1] - 1.0));
        ++out.checks;
        if (err > 1e-6 || r.f_star > 1e-10) {
            ++out.failures;
            notes += fmt(" rosenbrock error %.3g;", err);
        }
    }

    // Constrained H = 2 DLP instances against a feasible grid.
    std::size_t fallbacks = 0;
    for (std::size_t trial = 0; trial < opts.dlp_instances; ++trial) {
        const Instance in = random_instance(rng, 2, 2);
        const HorizonSpec spec(in.gamma, in.w_max, in.mu, in.s2);
        const auto d = solve_horizon(spec, in.state, ALConfig{}, SolverConfig{},
                                     std::vector<double>(2, 0.5 * in.w_max));
        if (d.fallback) ++fallbacks;
        const long double j = oracle::matrix_objective(in.state.v_long, in.state.v_short, d.plan, in.mu, in.s2,
                                                      in.gamma);
        const auto best = oracle::grid_best_2d(
            [&](std::span<const double> w) {
                return oracle::matrix_objective(in.state.v_long, in.state.v_short, w, in.mu, in.s2, in.gamma);
            },
            [&](std::span<const double> w) { return oracle::matrix_gain(in.state.v_long, in.state.v_short, w, in.mu, in.s2); },
            in.w_max, opts.grid_points);
        const double shortfall = static_cast<double>((best.value - j) / std::abs(best.value));
        ++out.checks;
        out.worst = std::max(out.worst, shortfall);
        if (shortfall > 1e-3) ++out.failures;
    }
    if (fallbacks * 100 >= std::max<std::size_t>(opts.dlp_instances, 1)) {
        ++out.failures;
        notes += " fallback rate >= 1%;";
    }
    out.passed = out.failures == 0;
    out.detail = fmt("worst shortfall %.3g", out.worst) + notes;
    return out;
}

SuiteOutcome verify_survivability(const VerifyOptions& opts) {
    SuiteOutcome out;
    out.name = "survivability";
    Rng rng(opts.seed + 3);
    for (std::size_t n = 0; n < opts.survival_paths; ++n) {
        const double x_min = uniform(rng, -0.95, -0.01);
        const double x_max = uniform(rng, 0.01, 3.0);
        const double eps = (n % 2 == 0) ? 0.0 : 0.001;
        const double w_max = weight_bound(x_min, x_max, eps).w_max;
        AccountState s{uniform(rng, 1.0, 100.0), uniform(rng, 0.0, 100.0)};
        CostModel cost{eps, 0.0};
        const auto steps = std::uniform_int_distribution<int>(1, 50)(rng);
        bool ok = true;
        for (int k = 0; k < steps && ok; ++k) {
            // Extreme weights and returns are drawn often; they are the worst case.
            const double u = uniform(rng, 0.0, 1.0);
            const double w = u < 0.2 ? w_max : u < 0.3 ? 0.0 : uniform(rng, 0.0, w_max);
            const double v = uniform(rng, 0.0, 1.0);
            const double x = v < 0.2 ? x_min : v < 0.4 ? x_max : uniform(rng, x_min, x_max);
            s = step_accounts(s, w, x, cost);
            cost.w_prev = w;
            ok = s.v_long > 0.0 && s.v_short >= 0.0 && total_value(s) > 0.0;
        }
        ++out.checks;
        if (!ok) ++out.failures;
    }
    out.passed = out.failures == 0;
    out.detail = std::to_string(out.checks) + " paths";
    return out;
}

SuiteOutcome verify_metrics(const VerifyOptions& opts) {
    SuiteOutcome out;
    out.name = "metrics";
    Rng rng(opts.seed + 4);
    for (std::size_t n = 0; n < opts.drawdown_curves; ++n) {
        const auto len = std::uniform_int_distribution<std::size_t>(2, 1000)(rng);
        std::vector<double> curve(len);
        curve[0] = 100.0;
        for (std::size_t t = 1; t < len; ++t) curve[t] = curve[t - 1] * (1.0 + uniform(rng, -0.05, 0.05));
        const double fast = max_drawdown_pct(curve);
        const double slow = oracle::brute_force_drawdown(curve);
        ++out.checks;
        out.worst = std::max(out.worst, std::abs(fast - slow));
        if (std::abs(fast - slow) > 1e-12) ++out.failures;
    }
    out.passed = out.failures == 0;
    out.detail = fmt("worst drawdown difference %.3g", out.worst);
    return out;
}

std::vector<SuiteOutcome> run_verification(const VerifyOptions& opts) {
    return {verify_gradient(opts), verify_moments(opts), verify_solver(opts), verify_survivability(opts),
            verify_metrics(opts)};
}

}  // namespace dlp
