#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dlp {

/// Calendar date in ISO-8601 (YYYY-MM-DD) form.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static std::optional<Date> parse(std::string_view text);
    std::string to_string() const;

    auto operator<=>(const Date&) const = default;
};

struct ColumnMapping {
    std::string date_column = "date";
    std::string price_column = "close";
    char delimiter = ',';
};

/// Positive prices on strictly increasing dates.
class PriceSeries {
public:
    PriceSeries() = default;
    /// Throws DataError if a price is not strictly positive or dates are not increasing.
    PriceSeries(std::vector<Date> dates, std::vector<double> prices);

    std::size_t size() const noexcept { return prices_.size(); }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<double>& prices() const noexcept { return prices_; }

    /// Rows whose date lies in [first, last]; either end may be open.
    PriceSeries slice(std::optional<Date> first, std::optional<Date> last) const;

private:
    std::vector<Date> dates_;
    std::vector<double> prices_;
};

struct ReturnBounds {
    double x_min;
    double x_max;
};

/// Per-period returns X(k) = (S(k+1) - S(k)) / S(k) with almost-sure bounds.
class ReturnSeries {
public:
    ReturnSeries() = default;
    /// Validates -1 < x_min < 0 < x_max and x_min <= r <= x_max for every r.
    /// `dates`, when non-empty, holds the price dates (returns.size() + 1 entries).
    ReturnSeries(std::vector<double> returns, ReturnBounds bounds, std::vector<Date> dates = {});

    std::size_t size() const noexcept { return returns_.size(); }
    double operator[](std::size_t k) const { return returns_[k]; }
    const std::vector<double>& values() const noexcept { return returns_; }
    double x_min() const noexcept { return bounds_.x_min; }
    double x_max() const noexcept { return bounds_.x_max; }
    ReturnBounds bounds() const noexcept { return bounds_; }
    const std::vector<Date>& dates() const noexcept { return dates_; }

private:
    std::vector<double> returns_;
    ReturnBounds bounds_{-0.5, 0.5};
    std::vector<Date> dates_;
};

struct RollingEstimate {
    double mu_hat = 0.0;
    double sigma2_hat = 0.0;
    std::size_t window = 2;
};

/// Reads a delimiter-separated file with a header row.
/// Throws DataError on a missing file, missing columns, malformed or
/// non-positive prices (row-indexed) and non-increasing dates.
PriceSeries load_prices(const std::filesystem::path& path, const ColumnMapping& format = {});

/// Parses the same format from an in-memory buffer.
PriceSeries parse_prices(std::string_view text, const ColumnMapping& format = {});

/// Simple returns of `prices`. With explicit `bounds` every return must lie
/// inside them; otherwise the bounds are the sample extremes pushed outward
/// by `margin` (relative), kept strictly inside (-1, 0) and (0, inf).
ReturnSeries to_returns(const PriceSeries& prices, std::optional<ReturnBounds> bounds = std::nullopt,
                        double margin = 0.10);

/// Sample mean and unbiased variance of returns[k-L .. k-1].
/// Throws std::invalid_argument when k < L, L < 2 or k > returns.size().
RollingEstimate rolling_stats(const ReturnSeries& returns, std::size_t k, std::size_t window);

}  // namespace dlp
