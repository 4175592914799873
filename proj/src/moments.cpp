#include "dlpsmpc/moments.hpp"

#include "dlpsmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlp {

HorizonSpec::HorizonSpec(double gamma, double w_max, std::vector<double> mus, std::vector<double> sigma2s)
    : gamma_(gamma), w_max_(w_max), mus_(std::move(mus)), sigma2s_(std::move(sigma2s)) {
    if (mus_.empty()) throw std::invalid_argument("horizon must be at least 1");
    if (mus_.size() != sigma2s_.size()) throw std::invalid_argument("mus and sigma2s differ in length");
    if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) throw std::invalid_argument("gamma must be non-negative");
    if (!(w_max_ > 0.0) || !std::isfinite(w_max_)) throw std::invalid_argument("w_max must be positive");
    for (std::size_t i = 0; i < mus_.size(); ++i) {
        if (!std::isfinite(mus_[i])) throw std::invalid_argument("non-finite mu");
        if (!(sigma2s_[i] >= 0.0) || !std::isfinite(sigma2s_[i])) throw std::invalid_argument("sigma2 must be >= 0");
    }
}

HorizonSpec HorizonSpec::uniform(std::size_t h, double gamma, double w_max, double mu, double sigma2) {
    return HorizonSpec(gamma, w_max, std::vector<double>(h, mu), std::vector<double>(h, sigma2));
}

HorizonSpec HorizonSpec::with_gamma(double gamma) const {
    return HorizonSpec(gamma, w_max_, mus_, sigma2s_);
}

bool HorizonSpec::admissible(std::span<const double> w) const noexcept {
    if (w.size() != mus_.size()) return false;
    return std::all_of(w.begin(), w.end(), [this](double wi) { return wi >= 0.0 && wi <= w_max_; });
}

MomentSet predict_moments(const HorizonSpec& spec, std::span<const double> w, const AccountState& state) {
    if (!spec.admissible(w)) throw std::invalid_argument("weight vector outside [0, w_max]^H");
    if (!state.valid()) throw std::invalid_argument("invalid account state");

    const auto mu = spec.mus();
    const auto s2 = spec.sigma2s();
    MomentSet m;
    // Second moments of S = X+ + X- and T = X+ - X-, where X+- are the
    // account growth factors. y = u S + d T with u, d the half sum and half
    // difference of the accounts, so near-equal accounts do not cancel.
    double v_ss = 0.0, v_tt = 0.0, v_st = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double a_plus = 1.0 + w[i] * mu[i];
        const double a_minus = 1.0 - w[i] * mu[i];
        const double noise = s2[i] * w[i] * w[i];
        const double cross = 1.0 - w[i] * w[i] * mu[i] * mu[i];

        // D_i = a^2 D_{i-1} + noise Q_{i-1} tracks Q - P^2 term by term;
        // E_i = cross E_{i-1} - noise M_{i-1} tracks M_12 - P+ P-.
        m.cov_long = a_plus * a_plus * m.cov_long + noise * m.q_plus;
        m.cov_short = a_minus * a_minus * m.cov_short + noise * m.q_minus;
        m.cov_cross = cross * m.cov_cross - noise * m.m_cross;

        const double g = w[i] * mu[i];
        const double m_s = m.p_plus + m.p_minus;
        const double m_t = m.p_plus - m.p_minus;
        const double ss = v_ss + 2.0 * g * v_st + g * g * v_tt + noise * (v_tt + m_t * m_t);
        const double tt = v_tt + 2.0 * g * v_st + g * g * v_ss + noise * (v_ss + m_s * m_s);
        const double st = v_st * (1.0 + g * g) + g * (v_ss + v_tt) + noise * (v_st + m_s * m_t);
        v_ss = ss;
        v_tt = tt;
        v_st = st;

        m.p_plus *= a_plus;
        m.p_minus *= a_minus;
        m.q_plus *= a_plus * a_plus + noise;
        m.q_minus *= a_minus * a_minus + noise;
        m.m_cross *= cross - noise;
    }

    const double vl = state.v_long;
    const double vs = state.v_short;
    m.mean = vl * m.p_plus + vs * m.p_minus;
    const double u = 0.5 * (vl + vs);
    const double d = 0.5 * (vl - vs);
    double var = u * u * v_ss + d * d * v_tt + 2.0 * u * d * v_st;
    if (var < 0.0) {
        const double y = vl + vs;
        if (var < -1e-10 * std::max(1.0, y * y))
            throw InvariantError("predicted variance is negative beyond round-off");
        var = 0.0;
    }
    m.variance = var;
    return m;
}

double objective(const HorizonSpec& spec, std::span<const double> w, const AccountState& state) {
    const auto m = predict_moments(spec, w, state);
    return m.mean - spec.gamma() * m.variance;
}

double expected_gain(const HorizonSpec& spec, std::span<const double> w, const AccountState& state) {
    return predict_moments(spec, w, state).mean - total_value(state);
}

}  // namespace dlp
