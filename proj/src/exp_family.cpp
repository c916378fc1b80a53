#include "igf/exp_family.hpp"

#include <cmath>
#include <string>

#include "igf/models.hpp"

namespace igf {

ExponentialFamily::ExponentialFamily(MeasureSpace space, Eigen::MatrixXd xi)
    : space_(std::move(space)), xi_(std::move(xi)) {
    if (xi_.cols() != space_.size()) throw InvalidInputError("ExponentialFamily: xi shape mismatch");
    if (xi_.rows() < 1 || xi_.rows() >= space_.size()) {
        throw InvalidInputError("ExponentialFamily: need 1 <= n < n_states statistics");
    }
    for (int i = 0; i < xi_.rows(); ++i) {
        const double mean = space_.integrate(xi_.row(i).transpose());
        if (std::abs(mean) > tol::centering) {
            throw InvalidInputError("ExponentialFamily: row " + std::to_string(i) +
                                    " is not centred (E_mu = " + std::to_string(mean) + ")");
        }
    }
    // rows together with the constant function must be linearly independent
    const int n = dim();
    Eigen::MatrixXd aug(n + 1, space_.size());
    aug.row(0).setOnes();
    aug.bottomRows(n) = xi_;
    Eigen::MatrixXd gram_aug = aug * space_.weights().asDiagonal() * aug.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_aug);
    if (es.eigenvalues().minCoeff() < 1e-12 * es.eigenvalues().maxCoeff()) {
        throw InvalidInputError("ExponentialFamily: statistics with the constant are linearly dependent");
    }
    Eigen::MatrixXd gram = xi_ * space_.weights().asDiagonal() * xi_.transpose();
    gram_ldlt_.compute(gram);
}

ExponentialFamily ExponentialFamily::spanning_basis(const MeasureSpace& space) {
    const int m = space.size();
    if (m < 2) throw InvalidInputError("spanning_basis: need at least two states");
    const int n = m - 1;
    Eigen::MatrixXd raw = Eigen::MatrixXd::Constant(n, m, -1.0 / n);
    for (int i = 0; i < n; ++i) raw(i, i) = 1.0;
    Eigen::MatrixXd xi(n, m);
    for (int i = 0; i < n; ++i) {
        xi.row(i) = center(space, raw.row(i).transpose()).values().transpose();
    }
    return ExponentialFamily(space, std::move(xi));
}

double ExponentialFamily::log_partition(const Eigen::VectorXd& y) const {
    if (y.size() != dim()) throw InvalidInputError("log_partition: dimension mismatch");
    if (!y.allFinite()) throw InvalidInputError("log_partition: non-finite parameters");
    const Eigen::ArrayXd s = (xi_.transpose() * y).array() + space_.weights().array().log();
    const double peak = s.maxCoeff();
    const double c = peak + std::log((s - peak).exp().sum());
    if (!std::isfinite(c)) throw NumericError("log_partition: non-finite value");
    return c;
}

Eigen::VectorXd ExponentialFamily::mean_stats(const Eigen::VectorXd& y) const {
    const DensityVector p = density_of(y);
    return xi_ * (space_.weights().array() * p.values().array()).matrix();
}

DensityVector ExponentialFamily::density_of(const Eigen::VectorXd& y) const {
    const double c = log_partition(y);
    Eigen::VectorXd p = ((xi_.transpose() * y).array() - c).exp().matrix();
    return DensityVector(space_, std::move(p));
}

Eigen::VectorXd ExponentialFamily::params_of(const Eigen::VectorXd& target_mean) const {
    if (target_mean.size() != dim()) throw InvalidInputError("params_of: dimension mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim());
    double res = (mean_stats(y) - target_mean).norm();
    for (int it = 0; it < 100; ++it) {
        if (res <= 1e-12) return y;
        const Eigen::MatrixXd g = fisher_matrix(y);
        const Eigen::VectorXd grad = mean_stats(y) - target_mean;
        const Eigen::VectorXd dir = g.ldlt().solve(-grad);
        double alpha = 1.0;
        for (int back = 0; back < 60; ++back) {
            const Eigen::VectorXd trial = y + alpha * dir;
            const double trial_res = (mean_stats(trial) - target_mean).norm();
            if (trial_res < res) {
                y = trial;
                res = trial_res;
                break;
            }
            alpha *= 0.5;
            if (back == 59) throw NumericError("params_of: line search failed");
        }
    }
    if (res > 1e-10) throw NumericError("params_of: Newton stalled at residual " + std::to_string(res));
    return y;
}

Eigen::VectorXd ExponentialFamily::params_from_density(const DensityVector& p) const {
    const Eigen::VectorXd e_rep = center(space_, p.values().array().log().matrix()).values();
    auto [coeff, residual] = project_onto_span(e_rep);
    if (residual > tol::span_residual) {
        throw HypothesisError("params_from_density: density outside the family, residual " +
                              std::to_string(residual));
    }
    return coeff;
}

std::pair<Eigen::VectorXd, double> ExponentialFamily::project_onto_span(
    const Eigen::VectorXd& centered) const {
    if (centered.size() != space_.size()) throw InvalidInputError("project_onto_span: dimension mismatch");
    const Eigen::VectorXd rhs = xi_ * (space_.weights().array() * centered.array()).matrix();
    const Eigen::VectorXd coeff = gram_ldlt_.solve(rhs);
    const Eigen::VectorXd residual_vec = centered - xi_.transpose() * coeff;
    return {coeff, space_.norm(residual_vec)};
}

Eigen::MatrixXd ExponentialFamily::fisher_matrix(const Eigen::VectorXd& y) const {
    const DensityVector p = density_of(y);
    const Eigen::VectorXd q = (space_.weights().array() * p.values().array()).matrix();
    const Eigen::VectorXd mean = xi_ * q;
    Eigen::MatrixXd centered = xi_.colwise() - mean;
    Eigen::MatrixXd g = centered * q.asDiagonal() * centered.transpose();
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
        throw GeometryError("fisher_matrix: covariance of the statistics is numerically singular");
    }
    return g;
}

Tensor3 ExponentialFamily::third_moments(const Eigen::VectorXd& y) const {
    const DensityVector p = density_of(y);
    const Eigen::VectorXd q = (space_.weights().array() * p.values().array()).matrix();
    const Eigen::VectorXd mean = xi_ * q;
    const Eigen::MatrixXd centered = xi_.colwise() - mean;
    const int n = dim();
    Tensor3 t(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const Eigen::ArrayXd pair = centered.row(i).array() * centered.row(j).array();
            for (int k = j; k < n; ++k) {
                const double v = (q.array() * pair * centered.row(k).array().transpose()).sum();
                t(i, j, k) = t(i, k, j) = t(j, i, k) = t(j, k, i) = t(k, i, j) = t(k, j, i) = v;
            }
        }
    }
    return t;
}

Tensor3 ExponentialFamily::christoffel_m1(const Eigen::VectorXd& y) const {
    const GeometryAt geo = geometry_at(y);
    const int n = dim();
    Tensor3 gamma(n);
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int m = 0; m < n; ++m) s += geo.g_inv(l, m) * geo.third(i, j, m);
                gamma(l, i, j) = s;
            }
        }
    }
    return gamma;
}

GeometryAt ExponentialFamily::geometry_at(const Eigen::VectorXd& y) const {
    GeometryAt geo;
    geo.y = y;
    geo.g = fisher_matrix(y);
    geo.third = third_moments(y);
    geo.g_inv = geo.g.llt().solve(Eigen::MatrixXd::Identity(dim(), dim()));
    return geo;
}

Eigen::VectorXd ExponentialFamily::field_u(const Eigen::VectorXd& y,
                                           const RateGenerator& generator) const {
    const DensityVector p = density_of(y);
    const Eigen::VectorXd ap = generator.apply(p.values());
    const Eigen::VectorXd target = center(space_, (ap.array() / p.values().array()).matrix()).values();
    auto [coeff, residual] = project_onto_span(target);
    if (residual > tol::span_residual) {
        throw HypothesisError("field_u: center(p^{-1} A p) leaves span{xi}, residual " +
                              std::to_string(residual));
    }
    return coeff;
}

Eigen::MatrixXd ExponentialFamily::field_v(const Eigen::MatrixXd& h) const {
    if (h.cols() != space_.size()) throw InvalidInputError("field_v: observation shape mismatch");
    Eigen::MatrixXd v(dim(), h.rows());
    for (int k = 0; k < h.rows(); ++k) {
        auto [coeff, residual] = project_onto_span(center(space_, h.row(k).transpose()).values());
        if (residual > tol::span_residual) {
            throw HypothesisError("field_v: center(h_" + std::to_string(k) +
                                  ") leaves span{xi}, residual " + std::to_string(residual));
        }
        v.col(k) = coeff;
    }
    return v;
}

Eigen::VectorXd ExponentialFamily::correction_field(const Eigen::VectorXd& y,
                                                    const Eigen::MatrixXd& h) const {
    if (h.cols() != space_.size()) throw InvalidInputError("correction_field: observation shape mismatch");
    const DensityVector p = density_of(y);
    const Eigen::VectorXd q = (space_.weights().array() * p.values().array()).matrix();
    const Eigen::VectorXd hbar = h * q;
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(space_.size());
    for (int k = 0; k < h.rows(); ++k) {
        sq.array() += (h.row(k).transpose().array() - hbar[k]).square();
    }
    auto [coeff, residual] = project_onto_span(center(space_, (0.5 * sq).eval()).values());
    if (residual > tol::span_residual) {
        throw HypothesisError("correction_field: center(|h - E_P h|^2)/2 leaves span{xi}, residual " +
                              std::to_string(residual));
    }
    return coeff;
}

}  // namespace igf
