#pragma once

#include "dlpsmpc/controller.hpp"
#include "dlpsmpc/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlp {

/// Ordered key/value pairs describing a resolved run configuration.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-tripping decimal form ("%.17g"); "nan" for NaN.
std::string format_number(double v);

/// Trajectory rows k = 0 .. T with columns
/// index,date,w_applied,v_long,v_short,total,mu_hat,sigma2_hat,al_feasible.
/// Row k carries the state at k and the decision taken at k; decision
/// fields of the final row are empty. The configuration is written first
/// as "# key = value" lines.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ConfigEntries& config = {});
std::string trajectory_csv(const Trajectory& traj, const ConfigEntries& config = {});

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// "key = value" lines: strategy, total_return_pct, sharpe_annualized,
/// sortino_annualized, max_drawdown_pct, annualization_factor.
/// Undefined ratios are written as "undefined".
void write_report_kv(std::ostream& out, std::string_view strategy, const PerformanceReport& rep,
                     const ConfigEntries& config = {});

/// Aligned metric-by-strategy table.
std::string comparison_table(const std::vector<std::pair<std::string, PerformanceReport>>& rows);

/// step,date then one equity column per trajectory (all must have equal length).
void write_equity_series(std::ostream& out, const std::vector<Trajectory>& trajs, const ConfigEntries& config = {});

/// Flat "key = value" text; '#' starts a comment. Throws DataError on a
/// line without '=' (row-indexed) or a duplicate key.
std::map<std::string, std::string> parse_config(std::string_view text);
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

}  // namespace dlp
