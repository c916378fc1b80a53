#include "igf/filters.hpp"

#include <cassert>
#include <cmath>
#include <string>

namespace igf {

namespace {

Eigen::VectorXd observation_mean(const MeasureSpace& space, const DensityVector& pi,
                                 const Eigen::MatrixXd& h) {
    const Eigen::VectorXd q = (space.weights().array() * pi.values().array()).matrix();
    Eigen::VectorXd hbar = h * q;
    // the zero fallback of the conditional-mean definition is unreachable on
    // a finite space; assert rather than branch
    assert(hbar.allFinite());
    return hbar;
}

}  // namespace

FilterTrajectory wonham_filter(const RateGenerator& generator, const Eigen::MatrixXd& h,
                               const DensityVector& p0, const JumpPath& path) {
    const MeasureSpace space = generator.space();
    if (h.cols() != space.size()) throw InvalidInputError("wonham_filter: observation shape mismatch");
    if (path.y_increments.empty() && path.steps() > 0) {
        throw InvalidInputError("wonham_filter: path has no observations attached");
    }
    const double dt = path.dt;
    const int k_steps = static_cast<int>(path.y_increments.size());
    const Eigen::MatrixXd step_matrix = generator.transition_matrix(dt);
    const Eigen::VectorXd half_h_sq =
        0.5 * dt * h.array().square().colwise().sum().transpose().matrix();

    FilterTrajectory traj{space, dt, {}, {}, {}};
    traj.pis.reserve(k_steps + 1);
    traj.hbars.reserve(k_steps + 1);
    traj.innovations.reserve(k_steps);
    traj.pis.push_back(p0);

    for (int k = 0; k < k_steps; ++k) {
        const DensityVector& pi = traj.pis.back();
        const Eigen::VectorXd hbar = observation_mean(space, pi, h);
        traj.hbars.push_back(hbar);
        traj.innovations.push_back(path.y_increments[k] - hbar * dt);

        // prediction: exact generator step on the probability vector
        Eigen::VectorXd q = (space.weights().array() * pi.values().array()).matrix();
        q = step_matrix * q;
        // correction: conjugate likelihood reweighting
        const Eigen::VectorXd log_weight =
            (h.transpose() * path.y_increments[k]) - half_h_sq;
        const Eigen::VectorXd unnormalized =
            ((q.array() / space.weights().array()) * log_weight.array().exp()).matrix();
        if (!unnormalized.allFinite() || unnormalized.minCoeff() < tol::filter_floor) {
            throw StabilityError("wonham_filter: posterior collapsed at step " + std::to_string(k) +
                                 "; use a smaller dt");
        }
        const double mass = space.integrate(unnormalized);
        traj.pis.emplace_back(space, unnormalized / mass);
    }
    traj.hbars.push_back(observation_mean(space, traj.pis.back(), h));
    return traj;
}

ThetaTrajectory exp_coord_filter(const ExponentialFamily& family, const RateGenerator& generator,
                                 const Eigen::MatrixXd& h, const Eigen::VectorXd& y0,
                                 const JumpPath& path, SdeScheme scheme) {
    if (h.cols() != family.space().size()) {
        throw InvalidInputError("exp_coord_filter: observation shape mismatch");
    }
    const double dt = path.dt;
    const int k_steps = static_cast<int>(path.y_increments.size());
    const int d = static_cast<int>(h.rows());

    // constant observation fields; checks center(h_k) in span{xi}
    const Eigen::MatrixXd v_theta = family.field_v(h);

    const auto hbar_of = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        const DensityVector p = family.density_of(y);
        return h * (family.space().weights().array() * p.values().array()).matrix();
    };

    const auto drift = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        const Eigen::VectorXd u = family.field_u(y, generator);
        if (scheme == SdeScheme::euler_ito) {
            return u - family.correction_field(y, h);
        }
        // Stratonovich route: the correction is half the Christoffel
        // contraction of the observation fields
        const Tensor3 gamma = family.christoffel_m1(y);
        const int n = family.dim();
        Eigen::VectorXd corr = Eigen::VectorXd::Zero(n);
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        s += gamma(l, i, j) * v_theta(i, k) * v_theta(j, k);
                    }
                }
            }
            corr[l] = 0.5 * s;
        }
        return u - corr;
    };

    ThetaTrajectory traj;
    traj.dt = dt;
    traj.thetas.reserve(k_steps + 1);
    traj.innovations.reserve(k_steps);
    traj.thetas.push_back(y0);

    for (int k = 0; k < k_steps; ++k) {
        const Eigen::VectorXd& y = traj.thetas.back();
        const Eigen::VectorXd dnu = path.y_increments[k] - hbar_of(y) * dt;
        traj.innovations.push_back(dnu);

        Eigen::VectorXd next;
        const Eigen::VectorXd b0 = drift(y);
        if (scheme == SdeScheme::euler_ito) {
            next = y + b0 * dt + v_theta * dnu;
        } else {
            const Eigen::VectorXd predictor = y + b0 * dt + v_theta * dnu;
            next = y + 0.5 * (b0 + drift(predictor)) * dt + v_theta * dnu;
        }
        if (!next.allFinite()) {
            throw StabilityError("exp_coord_filter: non-finite parameters at step " + std::to_string(k));
        }
        traj.thetas.push_back(std::move(next));
    }
    return traj;
}

KalmanTrajectory kalman_bucy(const LinearGaussianModel& model, const DiffusionPath& path) {
    model.validate();
    const double dt = path.dt;
    const int k_steps = static_cast<int>(path.y_increments.size());
    const int m = model.state_dim();

    const auto riccati = [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd {
        return model.B * r + r * model.B.transpose() + model.A -
               r * model.C.transpose() * model.C * r;
    };
    const auto qv_rate = [&](const Eigen::MatrixXd& r) -> double {
        return (model.C * r * model.C.transpose()).trace();
    };

    KalmanTrajectory traj;
    traj.dt = dt;
    traj.states.reserve(k_steps + 1);
    traj.qv.reserve(k_steps + 1);

    Eigen::VectorXd xbar = model.m0;
    Eigen::MatrixXd r = model.R0;
    double qv = 0.0;
    traj.states.push_back({xbar, r});
    traj.qv.push_back(qv);

    for (int k = 0; k < k_steps; ++k) {
        const Eigen::VectorXd dnu = path.y_increments[k] - model.C * xbar * dt;
        xbar += model.B * xbar * dt + r * model.C.transpose() * dnu;

        const Eigen::MatrixXd k1 = riccati(r);
        const Eigen::MatrixXd r2 = r + 0.5 * dt * k1;
        const Eigen::MatrixXd k2 = riccati(r2);
        const Eigen::MatrixXd r3 = r + 0.5 * dt * k2;
        const Eigen::MatrixXd k3 = riccati(r3);
        const Eigen::MatrixXd r4 = r + dt * k3;
        const Eigen::MatrixXd k4 = riccati(r4);
        r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r = 0.5 * (r + r.transpose()).eval();
        qv += (dt / 6.0) * (qv_rate(traj.states.back().cov) + 2.0 * qv_rate(r2) +
                            2.0 * qv_rate(r3) + qv_rate(r4));

        Eigen::LLT<Eigen::MatrixXd> llt(r);
        if (llt.info() != Eigen::Success || !xbar.allFinite()) {
            throw StabilityError("kalman_bucy: covariance lost positive definiteness at step " +
                                 std::to_string(k));
        }
        traj.states.push_back({xbar, r});
        traj.qv.push_back(qv);
    }
    return traj;
}

FieldTriple field_triple_at(const MeasureSpace& space, const DensityVector& pi,
                            const Eigen::MatrixXd& h, const Eigen::VectorXd& hbar,
                            const RateGenerator& generator) {
    if (h.cols() != space.size() || hbar.size() != h.rows()) {
        throw InvalidInputError("field_triple_at: shape mismatch");
    }
    const Eigen::ArrayXd pv = pi.values().array();
    const Eigen::VectorXd ap = generator.apply(pi.values());
    const Eigen::VectorXd u_raw = ((1.0 + pv.inverse()) * ap.array()).matrix();

    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(space.size());
    for (int k = 0; k < h.rows(); ++k) {
        sq += (h.row(k).transpose().array() - hbar[k]).square();
    }

    FieldTriple out{center(space, u_raw), center(space, (0.5 * sq).matrix()), {}};
    out.v.reserve(h.rows());
    for (int k = 0; k < h.rows(); ++k) {
        out.v.push_back(center(
            space, ((pv + 1.0) * (h.row(k).transpose().array() - hbar[k])).matrix()));
    }
    return out;
}

ResidualSeries chart_consistency_residual(const FilterTrajectory& traj,
                                          const RateGenerator& generator,
                                          const Eigen::MatrixXd& h, bool include_correction) {
    ResidualSeries out;
    const int k_steps = traj.steps();
    out.per_step.reserve(k_steps);
    double sum_sq = 0.0;

    Eigen::VectorXd a_prev = traj.chart_at(0).a.values();
    for (int k = 0; k < k_steps; ++k) {
        const Eigen::VectorXd a_next = traj.chart_at(k + 1).a.values();
        const FieldTriple fields = field_triple_at(traj.space, traj.pis[k], h, traj.hbars[k], generator);

        Eigen::VectorXd predicted = fields.u.values() * traj.dt;
        if (include_correction) predicted -= fields.zeta.values() * traj.dt;
        for (int ch = 0; ch < static_cast<int>(fields.v.size()); ++ch) {
            predicted += fields.v[ch].values() * traj.innovations[k][ch];
        }

        const double r = traj.space.norm(a_next - a_prev - predicted);
        out.per_step.push_back(r);
        sum_sq += r * r;
        out.max = std::max(out.max, r);
        a_prev = a_next;
    }
    out.rms = k_steps > 0 ? std::sqrt(sum_sq / k_steps) : 0.0;
    return out;
}

HypothesisDiagnostics hypothesis_diagnostics(const FilterTrajectory& traj,
                                             const RateGenerator& generator,
                                             const Eigen::MatrixXd& h) {
    HypothesisDiagnostics diag;
    const int n_points = static_cast<int>(traj.pis.size());
    diag.e_pi_sq.reserve(n_points);
    diag.e_log_pi_sq.reserve(n_points);
    diag.e_gain_sq.reserve(n_points);
    diag.e_drift_sq.reserve(n_points);

    for (int k = 0; k < n_points; ++k) {
        const Eigen::ArrayXd pv = traj.pis[k].values().array();
        const Eigen::VectorXd hbar = traj.hbars[k];
        Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(traj.space.size());
        for (int ch = 0; ch < h.rows(); ++ch) {
            sq += (h.row(ch).transpose().array() - hbar[ch]).square();
        }
        const Eigen::ArrayXd ap = generator.apply(traj.pis[k].values()).array();

        diag.e_pi_sq.push_back(traj.space.integrate(pv.square().matrix()));
        diag.e_log_pi_sq.push_back(traj.space.integrate(pv.log().square().matrix()));
        diag.e_gain_sq.push_back(traj.space.integrate(((pv + 1.0).square() * sq).matrix()));
        diag.e_drift_sq.push_back(
            traj.space.integrate(((1.0 + pv.inverse()).square() * ap.square()).matrix()));

        for (double v : {diag.e_pi_sq.back(), diag.e_log_pi_sq.back(), diag.e_gain_sq.back(),
                         diag.e_drift_sq.back()}) {
            if (!std::isfinite(v)) diag.all_finite = false;
        }
    }
    return diag;
}

}  // namespace igf
