#include "igf/info_flow.hpp"

#include <algorithm>
#include <cmath>

#include "igf/parallel.hpp"

namespace igf {

namespace {

double variance_of_h(const MeasureSpace& space, const DensityVector& pi,
                     const Eigen::MatrixXd& h, const Eigen::VectorXd& hbar) {
    double total = 0.0;
    for (int k = 0; k < h.rows(); ++k) {
        total += space.integrate(
            (pi.values().array() * (h.row(k).transpose().array() - hbar[k]).square()).matrix());
    }
    return total;
}

}  // namespace

QvSeries fisher_qv(const FilterTrajectory& traj, const Eigen::MatrixXd& h, CoordinateCheck check) {
    QvSeries out;
    out.dt = traj.dt;
    const int k_steps = traj.steps();
    out.qv.reserve(k_steps + 1);
    out.integrand.reserve(k_steps + 1);

    Eigen::MatrixXd basis;
    if (check == CoordinateCheck::on) basis = orthonormal_basis(traj.space);

    double acc = 0.0;
    out.qv.push_back(0.0);
    for (int k = 0; k <= k_steps; ++k) {
        const double var_h = variance_of_h(traj.space, traj.pis[k], h, traj.hbars[k]);
        out.integrand.push_back(var_h);
        if (check == CoordinateCheck::on) {
            const double coord = qv_integrand_coordinate(traj.space, traj.pis[k], h, basis);
            if (std::abs(coord - var_h) > 1e-8 * std::max(1.0, std::abs(var_h))) {
                throw NumericError("fisher_qv: coordinate and closed forms disagree by " +
                                   std::to_string(coord - var_h));
            }
        }
        if (k < k_steps) {
            acc += var_h * traj.dt;
            out.qv.push_back(acc);
        }
    }
    return out;
}

double qv_integrand_coordinate(const MeasureSpace& space, const DensityVector& pi,
                               const Eigen::MatrixXd& h, const Eigen::MatrixXd& basis) {
    const Eigen::VectorXd q = (space.weights().array() * pi.values().array()).matrix();
    const Eigen::VectorXd hbar = h * q;
    const ChartPoint at = chart_phi(space, pi);
    const Eigen::MatrixXd g = coordinate_metric(space, at, basis);

    double total = 0.0;
    for (int k = 0; k < h.rows(); ++k) {
        const Eigen::VectorXd gain = center(
            space, ((pi.values().array() + 1.0) * (h.row(k).transpose().array() - hbar[k])).matrix())
                                         .values();
        Eigen::VectorXd coords(basis.cols());
        for (int i = 0; i < basis.cols(); ++i) coords[i] = space.inner(basis.col(i), gain);
        total += coords.dot(g * coords);
    }
    return total;
}

namespace {

MiEstimate estimate_from_samples(std::span<const double> samples, double scale,
                                 std::string method) {
    if (samples.size() < 2) throw InvalidInputError("estimator needs at least two replicates");
    MiEstimate est;
    est.value = scale * pairwise_mean(samples);
    est.std_error =
        scale * sample_sd(samples) / std::sqrt(static_cast<double>(samples.size()));
    est.n_replicates = static_cast<int>(samples.size());
    est.method = std::move(method);
    return est;
}

}  // namespace

MiEstimate mi_qv_half(std::span<const double> qv_totals) {
    return estimate_from_samples(qv_totals, 0.5, "qv_half");
}

double path_log_lr(const FilterTrajectory& traj, const Eigen::MatrixXd& h, const JumpPath& path) {
    if (path.steps() != traj.steps()) throw InvalidInputError("path_log_lr: grid mismatch");
    double ito = 0.0, time_int = 0.0;
    for (int k = 0; k < traj.steps(); ++k) {
        const Eigen::VectorXd hx = h.col(path.states[k]);
        const Eigen::VectorXd diff = hx - traj.hbars[k];
        const Eigen::VectorXd db = path.y_increments[k] - hx * traj.dt;
        ito += diff.dot(db);
        time_int += diff.squaredNorm() * traj.dt;
    }
    return ito + 0.5 * time_int;
}

double path_log_lr_martingale(const FilterTrajectory& traj, const Eigen::MatrixXd& h,
                              const JumpPath& path) {
    if (path.steps() != traj.steps()) throw InvalidInputError("path_log_lr_martingale: grid mismatch");
    double ito = 0.0;
    for (int k = 0; k < traj.steps(); ++k) {
        const Eigen::VectorXd hx = h.col(path.states[k]);
        ito += (hx - traj.hbars[k]).dot(path.y_increments[k] - hx * traj.dt);
    }
    return ito;
}

MiEstimate mi_path_lr(std::span<const double> log_lrs) {
    return estimate_from_samples(log_lrs, 1.0, "path_lr");
}

MiEstimate mi_channel_oracle(const MeasureSpace& space, const DensityVector& p0,
                             const Eigen::VectorXd& h, double T) {
    if (h.size() != space.size()) throw InvalidInputError("mi_channel_oracle: shape mismatch");
    if (!(T > 0.0)) throw InvalidInputError("mi_channel_oracle: T must be positive");

    const Eigen::VectorXd prob = (space.weights().array() * p0.values().array()).matrix();
    const Eigen::VectorXd means = h * T;
    const double sd = std::sqrt(T);
    const double lo = means.minCoeff() - 12.0 * sd;
    const double hi = means.maxCoeff() + 12.0 * sd;
    const double log_norm = -0.5 * std::log(2.0 * M_PI * T);

    // integrand of I = sum_x q_x int n(y; m_x, T) log(n(y; m_x, T) / pbar(y)) dy
    const auto f = [&](double y) {
        Eigen::VectorXd log_n(means.size());
        for (int x = 0; x < means.size(); ++x) {
            const double z = y - means[x];
            log_n[x] = log_norm - 0.5 * z * z / T;
        }
        const Eigen::VectorXd log_terms = log_n.array() + prob.array().log();
        const double peak = log_terms.maxCoeff();
        const double log_mix = peak + std::log((log_terms.array() - peak).exp().sum());
        double acc = 0.0;
        for (int x = 0; x < means.size(); ++x) {
            acc += prob[x] * std::exp(log_n[x]) * (log_n[x] - log_mix);
        }
        return acc;
    };

    const auto simpson = [&](int intervals) {
        const double step = (hi - lo) / intervals;
        double s = f(lo) + f(hi);
        for (int i = 1; i < intervals; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * step);
        return s * step / 3.0;
    };

    double prev = simpson(64);
    for (int intervals = 128; intervals <= (1 << 22); intervals *= 2) {
        const double cur = simpson(intervals);
        if (std::abs(cur - prev) <= tol::quadrature_rel * std::max(std::abs(cur), 1e-12)) {
            MiEstimate est;
            est.value = cur;
            est.std_error = 0.0;
            est.n_replicates = 0;
            est.method = "channel_oracle";
            return est;
        }
        prev = cur;
    }
    throw NumericError("mi_channel_oracle: quadrature did not converge");
}

DecompositionReport info_decomposition_check(const Tensor3& joint) {
    const int nu = joint.dim();
    double mass = 0.0;
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nu; ++v)
            for (int w = 0; w < nu; ++w) {
                if (joint(u, v, w) < 0.0) throw InvalidInputError("decomposition: negative cell");
                mass += joint(u, v, w);
            }
    if (std::abs(mass - 1.0) > tol::ci_table) {
        throw InvalidInputError("decomposition: table mass is " + std::to_string(mass));
    }

    Eigen::VectorXd pu = Eigen::VectorXd::Zero(nu), pv = Eigen::VectorXd::Zero(nu);
    Eigen::MatrixXd puv = Eigen::MatrixXd::Zero(nu, nu), puw = Eigen::MatrixXd::Zero(nu, nu),
                    pvw = Eigen::MatrixXd::Zero(nu, nu);
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nu; ++v)
            for (int w = 0; w < nu; ++w) {
                const double c = joint(u, v, w);
                pu[u] += c;
                pv[v] += c;
                puv(u, v) += c;
                puw(u, w) += c;
                pvw(v, w) += c;
            }

    // conditional independence given U: p(v,w|u) = p(v|u) p(w|u)
    for (int u = 0; u < nu; ++u) {
        if (pu[u] <= 0.0) continue;
        for (int v = 0; v < nu; ++v)
            for (int w = 0; w < nu; ++w) {
                const double lhs = joint(u, v, w) / pu[u];
                const double rhs = (puv(u, v) / pu[u]) * (puw(u, w) / pu[u]);
                if (std::abs(lhs - rhs) > tol::ci_table) {
                    throw InvalidInputError("decomposition: V and W are not conditionally independent");
                }
            }
    }

    const auto xlogx_ratio = [](double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; };

    DecompositionReport rep;
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nu; ++v)
            for (int w = 0; w < nu; ++w) {
                const double c = joint(u, v, w);
                if (c > 0.0) rep.mi_joint += xlogx_ratio(c, pu[u] * pvw(v, w));
            }
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nu; ++v) {
            if (puv(u, v) > 0.0) rep.mi_first += xlogx_ratio(puv(u, v), pu[u] * pv[v]);
        }
    for (int v = 0; v < nu; ++v) {
        if (pv[v] <= 0.0) continue;
        for (int u = 0; u < nu; ++u)
            for (int w = 0; w < nu; ++w) {
                const double c = joint(u, v, w);
                if (c <= 0.0) continue;
                // p(u,w|v) log [ p(u,w|v) / (p(u|v) p(w|v)) ], weighted by p(v)
                rep.mi_second_given_first +=
                    c * std::log((c / pv[v]) / ((puv(u, v) / pv[v]) * (pvw(v, w) / pv[v])));
            }
    }
    rep.identity_error = std::abs(rep.mi_joint - rep.mi_first - rep.mi_second_given_first);

    // recursive two-stage posterior vs one-shot posterior
    for (int v = 0; v < nu; ++v)
        for (int w = 0; w < nu; ++w) {
            double norm_joint = 0.0, norm_rec = 0.0;
            Eigen::VectorXd one_shot = Eigen::VectorXd::Zero(nu), recursive = Eigen::VectorXd::Zero(nu);
            for (int u = 0; u < nu; ++u) {
                one_shot[u] = joint(u, v, w);
                norm_joint += one_shot[u];
                const double post_v = pv[v] > 0.0 ? puv(u, v) / pv[v] : pu[u];
                const double lik_w = pu[u] > 0.0 ? puw(u, w) / pu[u] : 0.0;
                recursive[u] = post_v * lik_w;
                norm_rec += recursive[u];
            }
            if (norm_joint <= 0.0 || norm_rec <= 0.0) continue;
            rep.bayes_error = std::max(
                rep.bayes_error,
                (one_shot / norm_joint - recursive / norm_rec).cwiseAbs().maxCoeff());
        }
    return rep;
}

CsBound cs_error_bound(const MeasureSpace& space, const DensityVector& pi,
                       const DensityVector& phat, const Eigen::VectorXd& f) {
    CsBound out;
    const double mean_pi = space.integrate((pi.values().array() * f.array()).matrix());
    const double mean_hat = space.integrate((phat.values().array() * f.array()).matrix());
    out.lhs = (mean_pi - mean_hat) * (mean_pi - mean_hat);
    out.rhs = space.integrate(f.cwiseAbs2()) *
              space.integrate((pi.values() - phat.values()).cwiseAbs2());
    if (out.lhs > out.rhs * (1.0 + 1e-12) + 1e-300) {
        throw NumericError("cs_error_bound: inequality violated, which should be impossible");
    }
    return out;
}

std::vector<double> kl_gain_series(const FilterTrajectory& traj,
                                   const std::vector<DensityVector>& marginals) {
    if (marginals.size() != traj.pis.size()) throw InvalidInputError("kl_gain_series: grid mismatch");
    std::vector<double> out;
    out.reserve(marginals.size());
    for (std::size_t k = 0; k < marginals.size(); ++k) {
        out.push_back(kl_divergence(traj.space, traj.pis[k], marginals[k]));
    }
    return out;
}

}  // namespace igf
