#ifndef IGF_INFO_FLOW_HPP
#define IGF_INFO_FLOW_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "igf/exp_family.hpp"
#include "igf/filters.hpp"

namespace igf {

/// Quadratic variation of the posterior in the Fisher metric: the cumulative
/// posterior variance of the observation function.
struct QvSeries {
    double dt = 0.0;
    std::vector<double> qv;         // K+1, nondecreasing, qv[0] = 0
    std::vector<double> integrand;  // K+1: Var_{Pi_t}(h) summed over channels
};

struct MiEstimate {
    double value = 0.0;      // nats
    double std_error = 0.0;  // nats
    int n_replicates = 0;
    std::string method;      // qv_half | path_lr | channel_oracle | decomposition
};

enum class CoordinateCheck { off, on };

/// Left-point Riemann sum of E_mu pi |h - hbar|^2 along the trajectory.
/// With CoordinateCheck::on the integrand is recomputed at every step by
/// contracting the coordinate metric with the gain coordinates in an
/// orthonormal H-basis, and the two routes must agree to 1e-8 (intended for
/// small state spaces).
QvSeries fisher_qv(const FilterTrajectory& traj, const Eigen::MatrixXd& h,
                   CoordinateCheck check = CoordinateCheck::off);

/// Coordinate route to the quadratic-variation integrand: G_ij contracted
/// with the basis coordinates of the gain columns.
double qv_integrand_coordinate(const MeasureSpace& space, const DensityVector& pi,
                               const Eigen::MatrixXd& h, const Eigen::MatrixXd& basis);

/// Half the replicate mean of terminal quadratic variations.
MiEstimate mi_qv_half(std::span<const double> qv_totals);

/// Discretised log likelihood ratio of one replicate:
/// sum (h(X_k) - hbar_k)' dB_k + 1/2 sum |h(X_k) - hbar_k|^2 dt, where the
/// noise increments dB are recovered from the retained signal path.
double path_log_lr(const FilterTrajectory& traj, const Eigen::MatrixXd& h, const JumpPath& path);

/// Martingale part of the same functional (mean-zero across replicates).
double path_log_lr_martingale(const FilterTrajectory& traj, const Eigen::MatrixXd& h,
                              const JumpPath& path);

MiEstimate mi_path_lr(std::span<const double> log_lrs);

/// Deterministic quadrature value of I(X0; Y_T) for a static signal observed
/// through one scalar channel: Y_T | X0 = x is N(h(x) T, T).  Adaptive
/// composite Simpson to relative tolerance tol::quadrature_rel.
MiEstimate mi_channel_oracle(const MeasureSpace& space, const DensityVector& p0,
                             const Eigen::VectorXd& h, double T);

/// Exact-summation check of the chain rule I(U;(V,W)) = I(U;V) + E I(U;W|V)
/// for a finite joint table with U-conditionally independent V and W, plus
/// the equality of the recursive two-stage posterior with the one-shot one.
struct DecompositionReport {
    double mi_joint = 0.0;
    double mi_first = 0.0;
    double mi_second_given_first = 0.0;
    double identity_error = 0.0;
    double bayes_error = 0.0;
};

DecompositionReport info_decomposition_check(const Tensor3& joint);

/// Both sides of the mean-square error bound
/// (E_pi f - E_phat f)^2 <= E_mu f^2 * E_mu (pi - phat)^2.
struct CsBound {
    double lhs = 0.0;
    double rhs = 0.0;
};

CsBound cs_error_bound(const MeasureSpace& space, const DensityVector& pi,
                       const DensityVector& phat, const Eigen::VectorXd& f);

/// D(Pi_t | P_t) along the grid against a supplied marginal sequence.
std::vector<double> kl_gain_series(const FilterTrajectory& traj,
                                   const std::vector<DensityVector>& marginals);

}  // namespace igf

#endif
