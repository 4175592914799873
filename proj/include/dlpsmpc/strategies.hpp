#pragma once

#include "dlpsmpc/controller.hpp"
#include "dlpsmpc/market_data.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace dlp {

enum class BenchmarkKind { Constant, BuyAndHold, LogRamp, Oscillating, EndsWeighted };

/// Prescribed weight schedule. LogRamp, Oscillating and EndsWeighted are the
/// benchmark functions w1, w2 and w3 over a sample of n_total steps.
struct BenchmarkSpec {
    BenchmarkKind kind = BenchmarkKind::Constant;
    double constant_weight = 0.51;
    std::size_t n_total = 0;  // 0: length of the return series

    std::string name() const;
    /// Parses "constant", "buy_and_hold", "w1", "w2", "w3".
    static std::optional<BenchmarkKind> parse_kind(std::string_view text);
};

/// Scheduled weight at step k in [0, n_total], clamped to [0, w_max].
///   w1(k) = log(1 + (k/N)(e - 1))
///   w2(k) = (sin(1 / ((0.02/N) k - 0.01)) + 1) / 2, with 1/2 where the argument is exactly 0
///   w3(k) = f sin(1/f) when that is >= 0 else 0, f = (4/N) k - 2, with 0 at f = 0
/// Buy-and-hold reports 1. Throws std::out_of_range for k > n_total.
double weight_at(const BenchmarkSpec& spec, std::size_t k, double w_max);

/// Drives the accounts with the scheduled weights from v0 split equally.
/// Buy-and-hold keeps the whole capital long: V(k+1) = V(k)(1 + X(k)).
Trajectory run_benchmark(const ReturnSeries& returns, double v0, const BenchmarkSpec& spec, double epsilon_cost = 0.0);

}  // namespace dlp
