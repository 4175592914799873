#include "dlpsmpc/lbfgsb.hpp"

#include "dlpsmpc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dlp {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Map<const Vec> view(std::span<const double> v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

// Compact form B = theta I - W M W^T with W = [Y, theta S] and
// M = [[-D, L^T], [L, theta S^T S]]^{-1}.
struct CompactModel {
    double theta = 1.0;
    Mat w;  // n x 2k
    Mat m;  // 2k x 2k

    CompactModel(const CurvatureMemory& mem, Eigen::Index n) : theta(mem.theta()) {
        const auto k = static_cast<Eigen::Index>(mem.size());
        w.resize(n, 2 * k);
        m.resize(2 * k, 2 * k);
        if (k == 0) return;
        Mat s(n, k), y(n, k);
        for (Eigen::Index j = 0; j < k; ++j) {
            s.col(j) = view(mem.s()[static_cast<std::size_t>(j)]);
            y.col(j) = view(mem.y()[static_cast<std::size_t>(j)]);
        }
        const Mat sy = s.transpose() * y;
        Mat middle = Mat::Zero(2 * k, 2 * k);
        middle.topLeftCorner(k, k) = -Mat(sy.diagonal().asDiagonal());
        Mat lower = sy.triangularView<Eigen::StrictlyLower>();
        middle.bottomLeftCorner(k, k) = lower;
        middle.topRightCorner(k, k) = lower.transpose();
        middle.bottomRightCorner(k, k) = theta * (s.transpose() * s);
        m = middle.fullPivLu().inverse();
        w.leftCols(k) = y;
        w.rightCols(k) = theta * s;
    }

    bool empty() const noexcept { return w.cols() == 0; }

    Mat dense(Eigen::Index n) const {
        Mat b = theta * Mat::Identity(n, n);
        if (!empty()) b -= w * m * w.transpose();
        return b;
    }
};

struct CauchyPoint {
    Vec xc;
    Vec c;  // W^T (xc - x)
    std::vector<bool> at_bound;
};

// Generalized Cauchy point: first local minimizer of the quadratic model along
// x(t) = P(x - t g), visiting breakpoints in ascending (t, index) order.
CauchyPoint cauchy_point(const Vec& x, const Vec& g, const Vec& lo, const Vec& hi, const CompactModel& model) {
    const Eigen::Index n = x.size();
    const Eigen::Index k2 = model.w.cols();
    const double theta = model.theta;

    std::vector<double> t(static_cast<std::size_t>(n));
    Vec d = Vec::Zero(n);
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i) {
        double ti = kInf;
        if (g[i] < 0.0) ti = (x[i] - hi[i]) / g[i];
        else if (g[i] > 0.0) ti = (x[i] - lo[i]) / g[i];
        t[static_cast<std::size_t>(i)] = ti;
        if (ti > 0.0) {
            d[i] = -g[i];
            if (ti < kInf) order.push_back(i);
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return t[static_cast<std::size_t>(a)] < t[static_cast<std::size_t>(b)];
    });

    CauchyPoint cp{x, Vec::Zero(k2), std::vector<bool>(static_cast<std::size_t>(n), false)};
    for (Eigen::Index i = 0; i < n; ++i)
        if (t[static_cast<std::size_t>(i)] == 0.0) cp.at_bound[static_cast<std::size_t>(i)] = true;

    Vec p = model.empty() ? Vec() : Vec(model.w.transpose() * d);
    double fp = -d.squaredNorm();
    if (fp == 0.0) return cp;
    double fpp = -theta * fp - (model.empty() ? 0.0 : p.dot(model.m * p));
    const double fpp_floor = kEps * (-theta * fp);
    fpp = std::max(fpp, fpp_floor);
    double dt_min = -fp / fpp;
    double t_old = 0.0;

    std::size_t next = 0;
    while (next < order.size()) {
        const Eigen::Index b = order[next];
        const double tb = t[static_cast<std::size_t>(b)];
        const double dt = tb - t_old;
        if (dt_min < dt) break;

        const double bound = d[b] > 0.0 ? hi[b] : lo[b];
        const double zb = bound - x[b];
        cp.xc[b] = bound;
        cp.at_bound[static_cast<std::size_t>(b)] = true;
        const double gb = g[b];
        if (!model.empty()) {
            cp.c += dt * p;
            const Vec wb = model.w.row(b).transpose();
            const Vec mwb = model.m * wb;
            fp += dt * fpp + gb * gb + theta * gb * zb - gb * mwb.dot(cp.c);
            fpp += -theta * gb * gb - 2.0 * gb * mwb.dot(p) - gb * gb * wb.dot(mwb);
            p += gb * wb;
        } else {
            fp += dt * fpp + gb * gb + theta * gb * zb;
            fpp += -theta * gb * gb;
        }
        fpp = std::max(fpp, fpp_floor);
        d[b] = 0.0;
        dt_min = fpp > 0.0 ? -fp / fpp : 0.0;
        t_old = tb;
        ++next;
    }

    dt_min = std::max(dt_min, 0.0);
    t_old += dt_min;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!cp.at_bound[static_cast<std::size_t>(i)]) cp.xc[i] = x[i] + t_old * d[i];
    if (!model.empty()) cp.c += dt_min * p;
    return cp;
}

Vec clamp(const Vec& v, const Vec& lo, const Vec& hi) { return v.cwiseMax(lo).cwiseMin(hi); }

// Newton step of the model restricted to coordinates that are free at the
// Cauchy point, then projected. Returns nullopt-like empty vector when the
// reduced model is not numerically positive definite.
bool subspace_step(const Vec& x, const Vec& g, const Vec& lo, const Vec& hi, const CompactModel& model,
                   const CauchyPoint& cp, Vec& out) {
    const Eigen::Index n = x.size();
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!cp.at_bound[static_cast<std::size_t>(i)] && cp.xc[i] > lo[i] && cp.xc[i] < hi[i]) free.push_back(i);
    out = cp.xc;
    if (free.empty()) return true;

    // Model gradient at the Cauchy point: g + B (xc - x).
    Vec r = g + model.theta * (cp.xc - x);
    if (!model.empty()) r -= model.w * (model.m * cp.c);

    const Mat b = model.dense(n);
    const auto nf = static_cast<Eigen::Index>(free.size());
    Mat bff(nf, nf);
    Vec rf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
        rf[a] = r[free[static_cast<std::size_t>(a)]];
        for (Eigen::Index c = 0; c < nf; ++c)
            bff(a, c) = b(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(c)]);
    }
    Eigen::LLT<Mat> llt(bff);
    if (llt.info() != Eigen::Success) return false;
    const Vec du = llt.solve(-rf);
    if (!du.allFinite()) return false;
    for (Eigen::Index a = 0; a < nf; ++a) out[free[static_cast<std::size_t>(a)]] += du[a];
    out = clamp(out, lo, hi);
    return true;
}

}  // namespace

void SolverConfig::validate() const {
    if (memory < 1 || memory > 50) throw std::invalid_argument("solver memory must lie in [1, 50]");
    if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("solver max_iter must be at least 1");
    if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("armijo constant must lie in (0, 1)");
}

bool CurvatureMemory::push(std::vector<double> s, std::vector<double> y) {
    const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
    const double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
    if (!(sy > kEps * yy) || !(sy > 0.0)) return false;
    s_.push_back(std::move(s));
    y_.push_back(std::move(y));
    while (s_.size() > capacity_) {
        s_.pop_front();
        y_.pop_front();
    }
    theta_ = yy / sy;
    return true;
}

std::vector<double> project(std::span<const double> x, std::span<const double> lower, std::span<const double> upper) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::clamp(x[i], lower[i], upper[i]);
    return out;
}

double free_gradient_norm(std::span<const double> x, std::span<const double> g, std::span<const double> lower,
                          std::span<const double> upper) {
    double norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= lower[i] && g[i] >= 0.0) continue;
        if (x[i] >= upper[i] && g[i] <= 0.0) continue;
        norm = std::max(norm, std::abs(g[i]));
    }
    return norm;
}

SolverResult minimize(const BoxProblem& problem, std::span<const double> x0, const SolverConfig& cfg,
                      const TraceSink& trace) {
    cfg.validate();
    const std::size_t n = problem.dim();
    if (problem.upper.size() != n || x0.size() != n) throw std::invalid_argument("dimension mismatch in box problem");
    for (std::size_t i = 0; i < n; ++i)
        if (!(problem.lower[i] <= problem.upper[i])) throw std::invalid_argument("box requires lower <= upper");
    if (!problem.eval) throw std::invalid_argument("box problem has no objective");

    const Vec lo = view(problem.lower);
    const Vec hi = view(problem.upper);
    SolverResult res;

    auto evaluate = [&](const Vec& at, Vec& grad) {
        grad.resize(static_cast<Eigen::Index>(n));
        const double f = problem.eval(std::span<const double>(at.data(), n), std::span<double>(grad.data(), n));
        ++res.evaluations;
        if (!std::isfinite(f) || !grad.allFinite()) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "non-finite objective or gradient at x = (";
            for (std::size_t i = 0; i < n; ++i) msg << (i ? ", " : "") << at[static_cast<Eigen::Index>(i)];
            msg << ")";
            throw SolverError(msg.str());
        }
        return f;
    };

    Vec x = clamp(view(x0), lo, hi);
    Vec g;
    double f = evaluate(x, g);
    CurvatureMemory memory(cfg.memory);
    res.status = SolverStatus::MaxIter;

    auto pg_of = [&](const Vec& at, const Vec& grad) {
        return free_gradient_norm(std::span<const double>(at.data(), n), std::span<const double>(grad.data(), n),
                                  problem.lower, problem.upper);
    };

    std::size_t iter = 0;
    for (; iter < cfg.max_iter; ++iter) {
        const double pg = pg_of(x, g);
        if (pg <= cfg.tol) {
            res.status = SolverStatus::Converged;
            if (trace) trace({iter, f, pg, 0, memory.size()});
            break;
        }

        const CompactModel model(memory, static_cast<Eigen::Index>(n));
        const CauchyPoint cp = cauchy_point(x, g, lo, hi, model);
        if (trace) {
            const auto active = static_cast<std::size_t>(std::count(cp.at_bound.begin(), cp.at_bound.end(), true));
            trace({iter, f, pg, active, memory.size()});
        }

        Vec target;
        if (!subspace_step(x, g, lo, hi, model, cp, target)) target = clamp(x - g, lo, hi);
        Vec dir = target - x;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            dir = cp.xc - x;
            slope = g.dot(dir);
        }
        if (!(slope < 0.0)) {
            dir = clamp(x - g, lo, hi) - x;
            slope = g.dot(dir);
        }
        if (!(slope < 0.0)) {
            res.status = SolverStatus::NoProgress;
            break;
        }

        // Projected Armijo backtracking. The round-off allowance only admits
        // points that do not increase f.
        const double noise = 8.0 * kEps * std::abs(f);
        double alpha = 1.0;
        bool accepted = false;
        Vec x_new, g_new;
        double f_new = f;
        for (std::size_t ls = 0; ls <= cfg.ls_max; ++ls, alpha *= 0.5) {
            x_new = clamp(x + alpha * dir, lo, hi);
            if (x_new == x) break;
            f_new = evaluate(x_new, g_new);
            if (f_new <= f && f_new <= f + cfg.armijo * g.dot(x_new - x) + noise) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (memory.size() > 0) {
                memory.clear();
                continue;
            }
            res.status = SolverStatus::NoProgress;
            break;
        }

        const Vec s = x_new - x;
        const Vec yv = g_new - g;
        memory.push(std::vector<double>(s.data(), s.data() + n), std::vector<double>(yv.data(), yv.data() + n));
        x = std::move(x_new);
        g = std::move(g_new);
        f = f_new;
    }

    res.x_star.assign(x.data(), x.data() + n);
    res.f_star = f;
    res.iterations = iter;
    res.pg_norm = pg_of(x, g);
    if (res.status == SolverStatus::MaxIter && res.pg_norm <= cfg.tol) res.status = SolverStatus::Converged;
    res.converged = res.status == SolverStatus::Converged;
    return res;
}

}  // namespace dlp
