#include "dlpsmpc/controller.hpp"
#include "dlpsmpc/oracles/reference.hpp"
#include "dlpsmpc/strategies.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace dlp;

namespace {

ReturnSeries constant_returns(std::size_t n, double x, ReturnBounds b = {-0.2, 0.2}) {
    return ReturnSeries(std::vector<double>(n, x), b);
}

ReturnSeries random_returns(std::size_t n, std::uint64_t seed, double drift = 0.001, double vol = 0.03) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(drift, vol);
    std::vector<double> x(n);
    for (auto& v : x) v = std::clamp(z(rng), -0.25, 0.25);
    return ReturnSeries(x, {-0.3, 0.3});
}

}  // namespace

TEST_CASE("flat market: zero estimates and constant wealth") {
    ControllerConfig cfg;
    cfg.horizon = 5;
    cfg.window = 6;
    const auto t = run(constant_returns(40, 0.0), 100.0, cfg);
    REQUIRE(t.steps.size() == 40);
    for (const auto& s : t.steps) {
        if (s.index >= cfg.window) {
            CHECK(s.mu_hat == 0.0);
            CHECK(s.sigma2_hat == 0.0);
        }
        CHECK(total_value(s.after) == 100.0);
    }
}

TEST_CASE("warm-up holds zero weight and carries no estimate") {
    ControllerConfig cfg;
    cfg.horizon = 4;
    cfg.window = 10;
    const auto t = run(random_returns(30, 1), 100.0, cfg);
    for (std::size_t k = 0; k < cfg.window; ++k) {
        CHECK(t.steps[k].warmup);
        CHECK(t.steps[k].weight == 0.0);
        CHECK(std::isnan(t.steps[k].mu_hat));
    }
    CHECK_FALSE(t.steps[cfg.window].warmup);
}

TEST_CASE("steady positive returns drive the weight to w_max") {
    ControllerConfig cfg;
    cfg.gamma = 1e-3;
    cfg.horizon = 2;
    cfg.window = 5;
    const auto r = constant_returns(40, 0.01, {-0.05, 0.02});
    const auto t = run(r, 100.0, cfg);
    const double w_max = weight_bound(-0.05, 0.02).w_max;  // 1
    for (std::size_t k = cfg.window; k < t.steps.size(); ++k) CHECK(t.steps[k].weight == doctest::Approx(w_max).epsilon(1e-8));
    const auto eq = t.equity();
    // The first traded period leaves the total unchanged for equal accounts;
    // after that the long account dominates and the total grows every step.
    for (std::size_t k = cfg.window + 2; k < eq.size(); ++k) CHECK(eq[k] > eq[k - 1]);
    CHECK(t.steps.back().after.v_long > t.steps[cfg.window].after.v_long);
    CHECK(t.steps.back().after.v_short < t.steps[cfg.window].after.v_short);

    // Grid check of the horizon program at H = 2 in the same regime.
    const auto best = oracle::grid_best_2d(
        [](std::span<const double> w) {
            return oracle::matrix_objective(50.5, 49.5, w, std::vector<double>{0.01, 0.01},
                                            std::vector<double>{0.0, 0.0}, 1e-3);
        },
        [](std::span<const double> w) {
            return oracle::matrix_gain(50.5, 49.5, w, std::vector<double>{0.01, 0.01}, std::vector<double>{0.0, 0.0});
        },
        1.0, 201);
    CHECK(best.w0 == 1.0);
    CHECK(best.w1 == 1.0);
}

TEST_CASE("flat objective ties break to zero") {
    ControllerConfig cfg;
    cfg.horizon = 3;
    const auto d = run_horizon_solve({60.0, 40.0}, RollingEstimate{0.0, 0.0, 18}, cfg, 1.0, std::nullopt);
    CHECK(d.weight == 0.0);
    CHECK(d.zero_preferred);
}

TEST_CASE("equal accounts, positive drift, vanishing risk aversion: full weight") {
    ControllerConfig cfg;
    cfg.gamma = 1e-9;
    cfg.horizon = 2;
    const auto d = run_horizon_solve({50.0, 50.0}, RollingEstimate{0.02, 1e-4, 18}, cfg, 0.8, std::nullopt);
    CHECK(d.weight == doctest::Approx(0.8).epsilon(1e-8));
    const double arg = oracle::grid_argmax_1d(
        [](std::span<const double> w) {
            return oracle::matrix_objective(50.0, 50.0, std::vector<double>{w[0], 0.8}, std::vector<double>{0.02, 0.02},
                                            std::vector<double>{1e-4, 1e-4}, 1e-9);
        },
        [](std::span<const double>) { return 1.0L; }, 0.8, 1001);
    CHECK(arg == doctest::Approx(0.8));
}

TEST_CASE("one-step decisions match a dense grid") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        ControllerConfig cfg;
        cfg.gamma = 0.01 + 0.5 * u(rng);
        cfg.horizon = 1;
        const AccountState s{20.0 + 60.0 * u(rng), 20.0 + 60.0 * u(rng)};
        const RollingEstimate e{0.04 * (u(rng) - 0.5), 0.002 * u(rng), 18};
        const double w_max = 0.5 + 0.5 * u(rng);
        const auto d = run_horizon_solve(s, e, cfg, w_max, std::nullopt);
        const std::vector<double> mu{e.mu_hat}, s2{e.sigma2_hat};
        const double w_grid = oracle::grid_argmax_1d(
            [&](std::span<const double> w) { return oracle::matrix_objective(s.v_long, s.v_short, w, mu, s2, cfg.gamma); },
            [&](std::span<const double> w) { return oracle::matrix_gain(s.v_long, s.v_short, w, mu, s2); }, w_max, 100001);
        CHECK(d.weight == doctest::Approx(w_grid).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("weights stay admissible and wealth positive on random data") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ControllerConfig cfg;
        cfg.horizon = 8;
        cfg.window = 10;
        cfg.epsilon_cost = seed % 2 ? 0.001 : 0.0;
        const auto r = random_returns(120, seed, 0.0, 0.05);
        const auto t = run(r, 100.0, cfg);
        for (const auto& s : t.steps) {
            CHECK(s.weight >= 0.0);
            CHECK(s.weight <= t.w_max);
            CHECK(s.after.v_long > 0.0);
            CHECK(s.after.v_short >= 0.0);
        }
    }
}

TEST_CASE("forced weight reproduces the constant benchmark") {
    const auto r = random_returns(200, 3);
    ControllerConfig cfg;
    cfg.forced_weight = 0.51;
    const auto a = run(r, 100.0, cfg);
    const auto b = run_benchmark(r, 100.0, BenchmarkSpec{BenchmarkKind::Constant, 0.51, 0});
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        CHECK(a.steps[k].weight == b.steps[k].weight);
        CHECK(a.steps[k].after == b.steps[k].after);
    }
}

TEST_CASE("fallbacks are logged") {
    // A tiny iteration budget leaves the first rounds infeasible on a
    // losing-drift, long-heavy start.
    ControllerConfig cfg;
    cfg.horizon = 4;
    cfg.window = 5;
    cfg.al.al_maxiter = 1;
    cfg.al.rho0 = 1e-6;
    std::vector<double> x{0.1, 0.1, 0.1, 0.1, 0.1};
    for (int i = 0; i < 20; ++i) x.push_back(i % 2 ? 0.15 : -0.2);
    const ReturnSeries r(x, {-0.3, 0.3});
    std::vector<std::string> log;
    const auto t = run(r, 100.0, cfg, [&](std::string_view m) { log.emplace_back(m); });
    CHECK(log.size() == t.fallbacks());
    for (const auto& s : t.steps)
        if (s.fallback) CHECK(s.weight == 0.0);
}

TEST_CASE("configuration validation") {
    ControllerConfig c;
    c.gamma = 0.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.window = 1;
    CHECK_THROWS(c.validate());
    c = {};
    c.horizon = 0;
    CHECK_THROWS(c.validate());
    c = {};
    CHECK_THROWS(run(constant_returns(18, 0.0), 100.0, c));
}
