#include "dlpsmpc/gradient.hpp"

#include <stdexcept>

namespace dlp {

namespace {

// Running products of one prefix or suffix: P+, P-, Q+, Q-, M and the
// cancellation-free differences D+ = Q+ - P+^2, D- = Q- - P-^2, E = M - P+ P-.
struct Partial {
    double p_plus = 1.0, p_minus = 1.0;
    double q_plus = 1.0, q_minus = 1.0;
    double m = 1.0;
    double d_plus = 0.0, d_minus = 0.0, e = 0.0;

    void absorb(double w, double mu, double s2) {
        const double ap = 1.0 + w * mu;
        const double am = 1.0 - w * mu;
        const double noise = s2 * w * w;
        const double cross = 1.0 - w * w * mu * mu;
        d_plus = ap * ap * d_plus + noise * q_plus;
        d_minus = am * am * d_minus + noise * q_minus;
        e = cross * e - noise * m;
        p_plus *= ap;
        p_minus *= am;
        q_plus *= ap * ap + noise;
        q_minus *= am * am + noise;
        m *= cross - noise;
    }
};

void require(const HorizonSpec& spec, std::span<const double> w) {
    if (!spec.admissible(w)) throw std::invalid_argument("weight vector outside [0, w_max]^H");
}

}  // namespace

LeaveOneOut leave_one_out(const HorizonSpec& spec, std::span<const double> w) {
    require(spec, w);
    const std::size_t h = w.size();
    const auto mu = spec.mus();
    const auto s2 = spec.sigma2s();

    std::vector<Partial> prefix(h), suffix(h);
    Partial run;
    for (std::size_t j = 0; j < h; ++j) {
        prefix[j] = run;
        run.absorb(w[j], mu[j], s2[j]);
    }
    run = Partial{};
    for (std::size_t j = h; j-- > 0;) {
        suffix[j] = run;
        run.absorb(w[j], mu[j], s2[j]);
    }

    LeaveOneOut out;
    for (auto* v : {&out.a_plus, &out.a_minus, &out.b_plus, &out.b_minus, &out.c_cross, &out.d_plus,
                    &out.d_minus, &out.e_cross})
        v->resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        const Partial& l = prefix[j];
        const Partial& r = suffix[j];
        out.a_plus[j] = l.p_plus * r.p_plus;
        out.a_minus[j] = l.p_minus * r.p_minus;
        out.b_plus[j] = l.q_plus * r.q_plus;
        out.b_minus[j] = l.q_minus * r.q_minus;
        out.c_cross[j] = l.m * r.m;
        out.d_plus[j] = l.d_plus * r.q_plus + l.p_plus * l.p_plus * r.d_plus;
        out.d_minus[j] = l.d_minus * r.q_minus + l.p_minus * l.p_minus * r.d_minus;
        out.e_cross[j] = l.e * r.m + l.p_plus * l.p_minus * r.e;
    }
    return out;
}

ValueAndGradient evaluate_with_gradient(const HorizonSpec& spec, std::span<const double> w,
                                        const AccountState& state) {
    const MomentSet mom = predict_moments(spec, w, state);
    const LeaveOneOut loo = leave_one_out(spec, w);
    const auto mu = spec.mus();
    const auto s2 = spec.sigma2s();
    const double vl = state.v_long;
    const double vs = state.v_short;
    const double gamma = spec.gamma();

    ValueAndGradient out;
    out.objective = mom.mean - gamma * mom.variance;
    out.gain = mom.mean - total_value(state);
    out.grad_objective.resize(w.size());
    out.grad_gain.resize(w.size());

    for (std::size_t j = 0; j < w.size(); ++j) {
        const double mj = mu[j];
        const double wj = w[j];
        const double mean_part = mj * (loo.a_plus[j] * vl - loo.a_minus[j] * vs);

        // z^T Sigma'_j z, with Sigma'_j = M'_j - mu_j (D Phi_j c c^T Phi + Phi c c^T D Phi_j),
        // regrouped per entry so the mean-squared derivative cancels analytically.
        const double dd_plus = 2.0 * mj * (1.0 + mj * wj) * loo.d_plus[j] + 2.0 * s2[j] * wj * loo.b_plus[j];
        const double dd_minus = -2.0 * mj * (1.0 - mj * wj) * loo.d_minus[j] + 2.0 * s2[j] * wj * loo.b_minus[j];
        const double de_cross = -2.0 * mj * mj * wj * loo.e_cross[j] - 2.0 * s2[j] * wj * loo.c_cross[j];
        const double var_part = vl * vl * dd_plus + vs * vs * dd_minus + 2.0 * vl * vs * de_cross;

        out.grad_gain[j] = mean_part;
        out.grad_objective[j] = mean_part - gamma * var_part;
    }
    return out;
}

std::vector<double> grad_objective(const HorizonSpec& spec, std::span<const double> w, const AccountState& state) {
    return evaluate_with_gradient(spec, w, state).grad_objective;
}

std::vector<double> grad_expected_gain(const HorizonSpec& spec, std::span<const double> w,
                                       const AccountState& state) {
    return evaluate_with_gradient(spec, w, state).grad_gain;
}

}  // namespace dlp
