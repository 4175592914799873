#include "dlpsmpc/market_data.hpp"

#include "dlpsmpc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dlp {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
        if (ec != std::errc{} || ptr != text.data() + pos + len) return std::nullopt;
        return v;
    };
    const auto y = field(0, 4);
    const auto m = field(5, 2);
    const auto d = field(8, 2);
    if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m)) return std::nullopt;
    return Date{*y, *m, *d};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

PriceSeries::PriceSeries(std::vector<Date> dates, std::vector<double> prices)
    : dates_(std::move(dates)), prices_(std::move(prices)) {
    if (dates_.size() != prices_.size()) throw DataError("date and price columns differ in length");
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i])) throw DataError("price must be positive", i + 1);
        if (i > 0 && !(dates_[i - 1] < dates_[i]))
            throw DataError("timestamps not strictly increasing (" + dates_[i].to_string() + ")", i + 1);
    }
}

PriceSeries PriceSeries::slice(std::optional<Date> first, std::optional<Date> last) const {
    std::vector<Date> d;
    std::vector<double> p;
    for (std::size_t i = 0; i < size(); ++i) {
        if (first && dates_[i] < *first) continue;
        if (last && *last < dates_[i]) continue;
        d.push_back(dates_[i]);
        p.push_back(prices_[i]);
    }
    return PriceSeries(std::move(d), std::move(p));
}

ReturnSeries::ReturnSeries(std::vector<double> returns, ReturnBounds bounds, std::vector<Date> dates)
    : returns_(std::move(returns)), bounds_(bounds), dates_(std::move(dates)) {
    if (!(bounds_.x_min > -1.0 && bounds_.x_min < 0.0)) throw DataError("x_min must lie in (-1, 0)");
    if (!(bounds_.x_max > 0.0) || !std::isfinite(bounds_.x_max)) throw DataError("x_max must be positive");
    if (!dates_.empty() && dates_.size() != returns_.size() + 1)
        throw DataError("dates must have one more entry than returns");
    for (std::size_t k = 0; k < returns_.size(); ++k) {
        const double r = returns_[k];
        if (!(r >= bounds_.x_min && r <= bounds_.x_max)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "return %.6g outside bounds [%.6g, %.6g]", r, bounds_.x_min,
                          bounds_.x_max);
            throw DataError(buf, k + 1);
        }
    }
}

PriceSeries parse_prices(std::string_view text, const ColumnMapping& format) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<Date> dates;
    std::vector<double> prices;
    std::optional<std::size_t> date_col, price_col;
    std::size_t line_no = 0;
    std::size_t row = 0;
    bool header_seen = false;

    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty() || line.front() == '#') continue;

        const auto fields = split(line, format.delimiter);
        if (!header_seen) {
            header_seen = true;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == format.date_column) date_col = i;
                if (fields[i] == format.price_column) price_col = i;
            }
            if (!date_col) throw DataError("missing date column '" + format.date_column + "'");
            if (!price_col) throw DataError("missing price column '" + format.price_column + "'");
            continue;
        }

        ++row;
        if (fields.size() <= std::max(*date_col, *price_col)) throw DataError("too few fields", row);
        const auto date = Date::parse(fields[*date_col]);
        if (!date) throw DataError("malformed date '" + std::string(fields[*date_col]) + "'", row);
        const auto price = parse_double(fields[*price_col]);
        if (!price) throw DataError("malformed price '" + std::string(fields[*price_col]) + "'", row);
        if (!(*price > 0.0)) throw DataError("price must be positive", row);
        if (!dates.empty() && !(dates.back() < *date))
            throw DataError("timestamps not strictly increasing (" + date->to_string() + ")", row);
        dates.push_back(*date);
        prices.push_back(*price);
    }
    if (!header_seen) throw DataError("empty input: no header row");
    return PriceSeries(std::move(dates), std::move(prices));
}

PriceSeries load_prices(const std::filesystem::path& path, const ColumnMapping& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open price file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_prices(buf.str(), format);
}

ReturnSeries to_returns(const PriceSeries& prices, std::optional<ReturnBounds> bounds, double margin) {
    if (prices.size() < 2) throw DataError("at least two prices are required");
    if (!(margin >= 0.0)) throw std::invalid_argument("bound margin must be non-negative");

    const auto& p = prices.prices();
    std::vector<double> r(p.size() - 1);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) r[k] = (p[k + 1] - p[k]) / p[k];

    if (!bounds) {
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        const double r_min = *lo;
        const double r_max = *hi;
        double span = std::max(std::abs(r_min), std::abs(r_max));
        if (span == 0.0) span = 1.0;
        // One-signed samples still need a bound on the other side of zero.
        double x_min = r_min < 0.0 ? r_min * (1.0 + margin) : -margin * span;
        double x_max = r_max > 0.0 ? r_max * (1.0 + margin) : margin * span;
        if (x_min == 0.0) x_min = -1e-6;
        if (x_max == 0.0) x_max = 1e-6;
        // Prices are positive, so r_min > -1 and the midpoint is strictly inside.
        if (x_min <= -1.0) x_min = 0.5 * (r_min - 1.0);
        bounds = ReturnBounds{x_min, x_max};
    } else if (!(bounds->x_min > -1.0)) {
        throw DataError("x_min must exceed -1");
    }
    return ReturnSeries(std::move(r), *bounds, prices.dates());
}

RollingEstimate rolling_stats(const ReturnSeries& returns, std::size_t k, std::size_t window) {
    if (window < 2) throw std::invalid_argument("rolling window must be at least 2");
    if (k < window) throw std::invalid_argument("insufficient history: k < window");
    if (k > returns.size()) throw std::invalid_argument("time index beyond the return series");

    const auto& x = returns.values();
    const auto first = x.begin() + static_cast<std::ptrdiff_t>(k - window);
    const auto last = x.begin() + static_cast<std::ptrdiff_t>(k);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += *it;
    const double mean = sum / static_cast<double>(window);
    double ss = 0.0;
    for (auto it = first; it != last; ++it) ss += (*it - mean) * (*it - mean);
    return {mean, ss / static_cast<double>(window - 1), window};
}

}  // namespace dlp
