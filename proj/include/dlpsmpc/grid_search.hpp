#pragma once

#include "dlpsmpc/controller.hpp"
#include "dlpsmpc/market_data.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dlp {

struct ParameterGrid {
    std::vector<double> gammas;
    std::vector<std::size_t> horizons;
    std::vector<std::size_t> windows;

    std::size_t size() const noexcept { return gammas.size() * horizons.size() * windows.size(); }
};

struct GridSearchOptions {
    std::size_t validation_start = 0;  // first step of the scored span
    double cv_gamma = 1.0;             // risk aversion of the selection criterion
    std::size_t threads = 0;           // 0: hardware concurrency
    double v0 = 100.0;
};

struct GridRow {
    double gamma = 0.0;
    std::size_t horizon = 0;
    std::size_t window = 0;
    /// mean(r) - cv_gamma * var(r) of per-period equity returns on the validation span.
    std::optional<double> criterion;
    double validation_return_pct = 0.0;
    double validation_max_drawdown_pct = 0.0;
    std::size_t fallbacks = 0;
    std::string error;  // non-empty when the run failed
};

/// Runs every (gamma, H, L) triple over the whole series (earlier steps warm
/// up the estimates) and scores the validation span. Rows are sorted by
/// criterion descending, failed runs last, ties by (gamma, H, L).
/// Throws std::invalid_argument on an empty grid or a split outside the data.
std::vector<GridRow> grid_search(const ReturnSeries& returns, const ParameterGrid& grid,
                                 const ControllerConfig& base, const GridSearchOptions& opts);

}  // namespace dlp
