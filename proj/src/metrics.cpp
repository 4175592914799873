#include "dlpsmpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dlp {

double max_drawdown_pct(std::span<const double> curve) {
    double peak = curve.empty() ? 0.0 : curve.front();
    double worst = 0.0;
    for (double v : curve) {
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return worst * 100.0;
}

PerformanceReport evaluate(std::span<const double> curve, int ppy, double risk_free) {
    if (curve.size() < 2) throw std::invalid_argument("equity curve needs at least two points");
    if (ppy < 1) throw std::invalid_argument("periods per year must be positive");
    for (double v : curve)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("equity curve values must be positive");

    const std::size_t n = curve.size() - 1;
    const double rf = risk_free / ppy;
    std::vector<double> excess(n);
    for (std::size_t t = 0; t < n; ++t) excess[t] = curve[t + 1] / curve[t] - 1.0 - rf;

    double mean = 0.0;
    for (double r : excess) mean += r;
    mean /= static_cast<double>(n);

    double ss = 0.0, downside = 0.0;
    for (double r : excess) {
        ss += (r - mean) * (r - mean);
        const double neg = std::min(r, 0.0);
        downside += neg * neg;
    }
    const double stdev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const double dd = std::sqrt(downside / static_cast<double>(n));
    const double scale = std::sqrt(static_cast<double>(ppy));

    PerformanceReport rep;
    rep.annualization_factor = ppy;
    rep.total_return = (curve.back() / curve.front() - 1.0) * 100.0;
    if (stdev > 0.0) rep.sharpe_annualized = mean / stdev * scale;
    if (dd > 0.0) rep.sortino_annualized = mean / dd * scale;
    rep.max_drawdown = max_drawdown_pct(curve);
    return rep;
}

}  // namespace dlp
