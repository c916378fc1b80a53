#ifndef IGF_EXP_FAMILY_HPP
#define IGF_EXP_FAMILY_HPP

#include <vector>

#include <Eigen/Dense>

#include "igf/manifold.hpp"
#include "igf/measure_space.hpp"

namespace igf {

class RateGenerator;  // models.hpp

/// Dense symmetric rank-3 tensor, sized for natural-parameter dimensions at
/// desk scale.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }
    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    int n_ = 0;
    std::vector<double> data_;
};

/// Local geometry bundle at one natural-parameter point.
struct GeometryAt {
    Eigen::VectorXd y;
    Eigen::MatrixXd g;       // Fisher matrix, symmetric positive definite
    Tensor3 third;           // central third moments, fully symmetric
    Eigen::MatrixXd g_inv;
};

/// Finite-dimensional exponential family over a finite state space: densities
/// exp(sum_i y^i xi_i - c(y)) with centred sufficient statistics in the rows
/// of `xi`.  The natural-parameter domain is all of R^n on a finite space.
class ExponentialFamily {
public:
    ExponentialFamily(MeasureSpace space, Eigen::MatrixXd xi);

    /// Statistics xi_i = indicator(i) - (1/n) sum_{j != i} indicator(j),
    /// centred under mu; spans every strictly positive density on the space.
    static ExponentialFamily spanning_basis(const MeasureSpace& space);

    const MeasureSpace& space() const { return space_; }
    int dim() const { return static_cast<int>(xi_.rows()); }
    const Eigen::MatrixXd& stats() const { return xi_; }

    /// c(y) = log E_mu exp(sum y^i xi_i), evaluated by log-sum-exp.
    double log_partition(const Eigen::VectorXd& y) const;

    /// grad c(y) = E_{P_y} xi.
    Eigen::VectorXd mean_stats(const Eigen::VectorXd& y) const;

    DensityVector density_of(const Eigen::VectorXd& y) const;

    /// Moment matching: solves grad c(y) = target by damped Newton (the
    /// Hessian is the Fisher matrix, positive definite).
    Eigen::VectorXd params_of(const Eigen::VectorXd& target_mean) const;

    /// Natural parameters of a family member recovered from its density by
    /// projecting e(P) onto the statistics; HypothesisError if the density
    /// does not lie in the family (projection residual above tolerance).
    Eigen::VectorXd params_from_density(const DensityVector& p) const;

    /// g_ij(y) = Cov_{P_y}(xi_i, xi_j); GeometryError if numerically singular.
    Eigen::MatrixXd fisher_matrix(const Eigen::VectorXd& y) const;

    /// Central third-moment tensor E_P prod (xi - E_P xi).
    Tensor3 third_moments(const Eigen::VectorXd& y) const;

    /// Christoffel symbols of the -1-covariant derivative:
    /// Gamma^l_ij = g^{lm} T_ijm.
    Tensor3 christoffel_m1(const Eigen::VectorXd& y) const;

    GeometryAt geometry_at(const Eigen::VectorXd& y) const;

    /// Natural-parameter velocity of the signal-generator field: coefficients
    /// of center((Ap)/p) in the statistics.  HypothesisError (with the
    /// residual) if that vector leaves the span.
    Eigen::VectorXd field_u(const Eigen::VectorXd& y, const RateGenerator& generator) const;

    /// Per-channel observation fields: column k holds the coefficients of
    /// center(h_k).  Constant in y.  Observation matrix h is d x n_states.
    Eigen::MatrixXd field_v(const Eigen::MatrixXd& h) const;

    /// Correction field with e-representation center(|h - E_P h|^2) / 2,
    /// in natural coordinates; satisfies sum_k Gamma(V_k, V_k) = 2 W.
    Eigen::VectorXd correction_field(const Eigen::VectorXd& y, const Eigen::MatrixXd& h) const;

    /// Coefficients of a centred vector in span{xi_i} via the Gram system;
    /// also returns the H-norm residual of the projection.
    std::pair<Eigen::VectorXd, double> project_onto_span(const Eigen::VectorXd& centered) const;

private:
    MeasureSpace space_;
    Eigen::MatrixXd xi_;            // n x n_states, rows centred
    Eigen::LDLT<Eigen::MatrixXd> gram_ldlt_;  // Gram matrix of the rows under <.,.>_H
};

}  // namespace igf

#endif
