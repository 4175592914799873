#include "dlpsmpc/oracles/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlp::oracle {

TwoMoments enumerate_wealth(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                            std::span<const double> sigma2) {
    const std::size_t h = w.size();
    if (h > 20) throw std::invalid_argument("enumeration limited to 20 steps");
    const std::size_t paths = std::size_t{1} << h;
    std::vector<long double> y(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        long double up = 1.0L, down = 1.0L;
        for (std::size_t i = 0; i < h; ++i) {
            const long double sd = std::sqrt(static_cast<long double>(sigma2[i]));
            const long double x = static_cast<long double>(mu[i]) + (((p >> i) & 1U) ? sd : -sd);
            up *= 1.0L + w[i] * x;
            down *= 1.0L - w[i] * x;
        }
        y[p] = v_long * up + v_short * down;
    }
    TwoMoments out;
    for (auto v : y) out.mean += v;
    out.mean /= static_cast<long double>(paths);
    for (auto v : y) out.variance += (v - out.mean) * (v - out.mean);
    out.variance /= static_cast<long double>(paths);
    return out;
}

TwoMoments matrix_moments(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                          std::span<const double> sigma2) {
    long double pp = 1.0L, pm = 1.0L, qp = 1.0L, qm = 1.0L, m12 = 1.0L;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const long double wi = w[i], mi = mu[i], si = sigma2[i];
        pp *= 1.0L + wi * mi;
        pm *= 1.0L - wi * mi;
        qp *= (1.0L + wi * mi) * (1.0L + wi * mi) + si * wi * wi;
        qm *= (1.0L - wi * mi) * (1.0L - wi * mi) + si * wi * wi;
        m12 *= 1.0L - wi * wi * (mi * mi + si);
    }
    // Sigma = M - Phi^T c c^T Phi with Phi = diag(pp, pm), c = (1, 1).
    const long double s11 = qp - pp * pp;
    const long double s22 = qm - pm * pm;
    const long double s12 = m12 - pp * pm;
    const long double zl = v_long, zs = v_short;
    return {zl * pp + zs * pm, zl * zl * s11 + 2.0L * zl * zs * s12 + zs * zs * s22};
}

long double matrix_objective(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                             std::span<const double> sigma2, double gamma) {
    const auto m = matrix_moments(v_long, v_short, w, mu, sigma2);
    return m.mean - static_cast<long double>(gamma) * m.variance;
}

long double matrix_gain(double v_long, double v_short, std::span<const double> w, std::span<const double> mu,
                        std::span<const double> sigma2) {
    return matrix_moments(v_long, v_short, w, mu, sigma2).mean - (static_cast<long double>(v_long) + v_short);
}

std::vector<double> central_difference(const ScalarFn& f, std::span<const double> w, double step) {
    std::vector<double> out(w.size());
    std::vector<double> probe(w.begin(), w.end());
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double hi = w[j] + step;
        const double lo = w[j] - step;
        probe[j] = hi;
        const long double up = f(probe);
        probe[j] = lo;
        const long double down = f(probe);
        probe[j] = w[j];
        // Divide by the spacing of the rounded probes actually evaluated.
        const long double spacing = static_cast<long double>(hi) - static_cast<long double>(lo);
        out[j] = static_cast<double>((up - down) / spacing);
    }
    return out;
}

double brute_force_drawdown(std::span<const double> curve) {
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i)
        for (std::size_t j = i; j < curve.size(); ++j) worst = std::max(worst, (curve[i] - curve[j]) / curve[i]);
    return worst * 100.0;
}

std::vector<double> projected_gradient_qp(const std::vector<std::vector<double>>& a, std::span<const double> b,
                                          std::span<const double> lower, std::span<const double> upper, double tol,
                                          std::size_t max_iter) {
    const std::size_t n = b.size();
    double lip = 0.0;
    for (const auto& row : a) {
        double s = 0.0;
        for (double v : row) s += std::abs(v);
        lip = std::max(lip, s);
    }
    const double step = 1.0 / lip;
    std::vector<double> x(n), g(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(0.0, lower[i], upper[i]);
    for (std::size_t it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = b[i];
            for (std::size_t j = 0; j < n; ++j) g[i] += a[i][j] * x[j];
        }
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = std::clamp(x[i] - step * g[i], lower[i], upper[i]);
            moved = std::max(moved, std::abs(next - x[i]));
            x[i] = next;
        }
        if (moved < tol) break;
    }
    return x;
}

GridBest grid_best_2d(const ScalarFn& objective, const ScalarFn& constraint, double w_max, std::size_t n) {
    GridBest best;
    std::vector<double> w(2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w[0] = w_max * static_cast<double>(i) / static_cast<double>(n - 1);
            w[1] = w_max * static_cast<double>(j) / static_cast<double>(n - 1);
            if (constraint(w) < 0.0L) continue;
            const long double v = objective(w);
            if (!best.found || v > best.value) best = {w[0], w[1], v, true};
        }
    }
    return best;
}

double grid_argmax_1d(const ScalarFn& objective, const ScalarFn& constraint, double w_max, std::size_t n) {
    double arg = 0.0;
    long double best = 0.0L;
    bool found = false;
    std::vector<double> w(1);
    for (std::size_t i = 0; i < n; ++i) {
        w[0] = w_max * static_cast<double>(i) / static_cast<double>(n - 1);
        if (constraint(w) < 0.0L) continue;
        const long double v = objective(w);
        if (!found || v > best) {
            best = v;
            arg = w[0];
            found = true;
        }
    }
    return arg;
}

}  // namespace dlp::oracle
