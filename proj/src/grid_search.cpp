#include "dlpsmpc/grid_search.hpp"

#include "dlpsmpc/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace dlp {

namespace {

GridRow score(const ReturnSeries& returns, const ControllerConfig& cfg, const GridSearchOptions& opts) {
    GridRow row;
    row.gamma = cfg.gamma;
    row.horizon = cfg.horizon;
    row.window = cfg.window;
    try {
        const Trajectory traj = run(returns, opts.v0, cfg);
        const auto equity = traj.equity();
        const std::span<const double> span(equity.begin() + static_cast<std::ptrdiff_t>(opts.validation_start),
                                           equity.end());
        const std::size_t n = span.size() - 1;
        double mean = 0.0;
        std::vector<double> r(n);
        for (std::size_t t = 0; t < n; ++t) mean += r[t] = span[t + 1] / span[t] - 1.0;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : r) ss += (v - mean) * (v - mean);
        const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
        row.criterion = mean - opts.cv_gamma * var;
        row.validation_return_pct = (span.back() / span.front() - 1.0) * 100.0;
        row.validation_max_drawdown_pct = max_drawdown_pct(span);
        row.fallbacks = traj.fallbacks();
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<GridRow> grid_search(const ReturnSeries& returns, const ParameterGrid& grid,
                                 const ControllerConfig& base, const GridSearchOptions& opts) {
    if (grid.size() == 0) throw std::invalid_argument("empty parameter grid");
    if (opts.validation_start + 2 > returns.size() + 1)
        throw std::invalid_argument("validation split outside the data range");

    std::vector<ControllerConfig> jobs;
    for (double g : grid.gammas)
        for (std::size_t h : grid.horizons)
            for (std::size_t l : grid.windows) {
                ControllerConfig c = base;
                c.gamma = g;
                c.horizon = h;
                c.window = l;
                jobs.push_back(c);
            }

    std::vector<GridRow> rows(jobs.size());
    std::size_t workers = opts.threads ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) rows[i] = score(returns, jobs[i], opts);
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
        if (a.criterion.has_value() != b.criterion.has_value()) return a.criterion.has_value();
        if (a.criterion && *a.criterion != *b.criterion) return *a.criterion > *b.criterion;
        return std::tie(a.gamma, a.horizon, a.window) < std::tie(b.gamma, b.horizon, b.window);
    });
    return rows;
}

}  // namespace dlp
