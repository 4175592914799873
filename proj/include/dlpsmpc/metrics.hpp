#pragma once

#include <optional>
#include <span>

namespace dlp {

enum class AssetClass { Crypto, Equity };

/// 365 for assets trading every day, 252 for exchange-traded equities.
constexpr int periods_per_year(AssetClass c) noexcept { return c == AssetClass::Crypto ? 365 : 252; }

struct PerformanceReport {
    double total_return = 0.0;               // percent
    std::optional<double> sharpe_annualized;  // empty when volatility is zero
    std::optional<double> sortino_annualized; // empty when downside deviation is zero
    double max_drawdown = 0.0;               // percent
    int annualization_factor = 365;
};

/// Statistics of simple per-period returns r_t = V_t / V_{t-1} - 1 of an equity curve.
/// Sharpe uses the sample standard deviation (n - 1); Sortino the downside
/// deviation sqrt(mean(min(r - rf, 0)^2)) over all n periods. `risk_free` is
/// an annual rate, spread evenly over the periods.
/// Throws std::invalid_argument for fewer than two points or a non-positive value.
PerformanceReport evaluate(std::span<const double> curve, int periods_per_year = 365, double risk_free = 0.0);

/// Largest peak-to-trough decline in percent, using the running peak.
double max_drawdown_pct(std::span<const double> curve);

}  // namespace dlp
