#ifndef IGF_MANIFOLD_HPP
#define IGF_MANIFOLD_HPP

#include <span>

#include <Eigen/Dense>

#include "igf/measure_space.hpp"

namespace igf {

/// Chart image a = center(p + log p) of a density.  The chart is a bijection
/// between densities and H, so a ChartPoint identifies a point on the
/// manifold of finite-state probability measures.
struct ChartPoint {
    CenteredVector a;
};

/// Tangent vector in chart representation, carried together with its base
/// point; metric evaluations require matching bases.
struct TangentVector {
    ChartPoint base;
    CenteredVector u;
};

bool same_point(const ChartPoint& lhs, const ChartPoint& rhs);

/// Projection onto H: f - E_mu f.  Idempotent; rejects non-finite input.
CenteredVector center(const MeasureSpace& space, const Eigen::VectorXd& f);

/// Mixture representation m(P) = center(p).
CenteredVector m_map(const MeasureSpace& space, const DensityVector& p);
/// Exponential representation e(P) = center(log p).
CenteredVector e_map(const MeasureSpace& space, const DensityVector& p);
/// Chart map phi(P) = m(P) + e(P) = center(p + log p).
ChartPoint chart_phi(const MeasureSpace& space, const DensityVector& p);

/// Inverse of z -> z + log z on (0, infinity).  Safeguarded Newton seeded at
/// max(w, e^{w-1}); the returned z satisfies |z + log z - w| <= tol::psi_residual.
double psi(double w);

/// Derivative of psi expressed through its value: psi'(w) = z / (1 + z).
inline double psi_prime_from_value(double z) { return z / (1.0 + z); }

struct PhiInverse {
    DensityVector density;
    double normalizer;  // Z(a): E_mu psi(a + Z) = 1
};

/// Inverse chart: density x -> psi(a(x) + Z(a)) with the normaliser solved by
/// bracketed Newton grown geometrically from Z = 1.  Throws NumericError if
/// the solve does not reach tol::normalizer_residual.
PhiInverse phi_inverse(const MeasureSpace& space, const ChartPoint& a);

/// Directional derivative of the normaliser:
/// DZ_a u = -E_mu[psi'(a+Z) u] / E_mu[psi'(a+Z)].
double dz_derivative(const MeasureSpace& space, const ChartPoint& a, const CenteredVector& u);

/// D(Q | P) = E_mu[q log(q/p)] for densities of mutually absolutely
/// continuous measures; evaluated in the Bregman form
/// E_mu[q log(q/p) - q + p], whose terms are individually nonnegative.
double kl_divergence(const MeasureSpace& space, const DensityVector& q, const DensityVector& p);

/// Fisher metric in the chart:
/// <U, V>_P = E_mu[ p/(1+p)^2 (u + DZ_a u)(v + DZ_a v) ].
/// Both tangent vectors must be based at `at`.
double fisher_inner(const MeasureSpace& space, const ChartPoint& at,
                    const TangentVector& u, const TangentVector& v);

/// Orthonormal basis of H under the mu-weighted inner product, as columns of
/// an n x (n-1) matrix.  `state_order` permutes the seed vectors; results
/// contracted through the metric must not depend on it.
Eigen::MatrixXd orthonormal_basis(const MeasureSpace& space,
                                  std::span<const int> state_order = {});

/// Coordinate form of the Fisher metric: G_ij = <D_i, D_j>_P for the tangent
/// frame matching the given H-basis columns.
Eigen::MatrixXd coordinate_metric(const MeasureSpace& space, const ChartPoint& at,
                                  const Eigen::MatrixXd& basis);

}  // namespace igf

#endif
