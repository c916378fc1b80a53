#ifndef IGF_FILTERS_HPP
#define IGF_FILTERS_HPP

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "igf/exp_family.hpp"
#include "igf/manifold.hpp"
#include "igf/models.hpp"

namespace igf {

/// Posterior densities along one observation path, with the conditional
/// observation means and innovation increments used to produce them.
struct FilterTrajectory {
    MeasureSpace space;
    double dt = 0.0;
    std::vector<DensityVector> pis;            // K+1
    std::vector<Eigen::VectorXd> hbars;        // K+1
    std::vector<Eigen::VectorXd> innovations;  // K

    int steps() const { return static_cast<int>(pis.size()) - 1; }
    /// Chart image of the posterior at grid index k (computed on demand).
    ChartPoint chart_at(int k) const { return chart_phi(space, pis.at(k)); }
};

/// The drift, correction and gain processes of the chart-level filter
/// equation, evaluated at one posterior.
struct FieldTriple {
    CenteredVector u;                 // center((1 + pi^{-1}) A pi)
    CenteredVector zeta;              // center(|h - hbar|^2) / 2
    std::vector<CenteredVector> v;    // per channel: center((pi + 1)(h_k - hbar_k))
};

struct KalmanState {
    Eigen::VectorXd xbar;
    Eigen::MatrixXd cov;
};

struct KalmanTrajectory {
    double dt = 0.0;
    std::vector<KalmanState> states;  // K+1
    std::vector<double> qv;           // K+1: integral of tr(C R C') up to t_k
};

/// Finite-state filter driven by the path's observation increments.  Each
/// step splits into an exact generator step on probabilities followed by the
/// conjugate likelihood reweighting exp(h dY - |h|^2 dt / 2) and
/// renormalisation, which keeps the posterior strictly positive.
FilterTrajectory wonham_filter(const RateGenerator& generator, const Eigen::MatrixXd& h,
                               const DensityVector& p0, const JumpPath& path);

/// Natural-parameter trajectory of the exponential filter.
struct ThetaTrajectory {
    double dt = 0.0;
    std::vector<Eigen::VectorXd> thetas;       // K+1
    std::vector<Eigen::VectorXd> innovations;  // K, from the trajectory's own hbar
};

enum class SdeScheme {
    euler_ito,           // dy = (u - w) dt + v dnu with w from the moment form
    heun_stratonovich,   // midpoint drift with w from the Christoffel contraction
};

/// Exponential filter in natural coordinates.  Span hypotheses for the
/// generator and observation fields are enforced at every evaluation point.
ThetaTrajectory exp_coord_filter(const ExponentialFamily& family, const RateGenerator& generator,
                                 const Eigen::MatrixXd& h, const Eigen::VectorXd& y0,
                                 const JumpPath& path, SdeScheme scheme = SdeScheme::euler_ito);

/// Kalman-Bucy filter: covariance by a deterministic Riccati RK4 sweep
/// (independent of the observations), mean by Euler-Maruyama in the
/// innovations.  The qv series accumulates tr(C R C') inside the RK4 stages.
KalmanTrajectory kalman_bucy(const LinearGaussianModel& model, const DiffusionPath& path);

/// u, zeta, v evaluated at one posterior by weighted sums.
FieldTriple field_triple_at(const MeasureSpace& space, const DensityVector& pi,
                            const Eigen::MatrixXd& h, const Eigen::VectorXd& hbar,
                            const RateGenerator& generator);

struct ResidualSeries {
    std::vector<double> per_step;  // H-norm of the one-step defect
    double rms = 0.0;
    double max = 0.0;
};

/// One-step defect of the chart-level equation
/// phi(Pi_{k+1}) - phi(Pi_k) - (u - zeta) dt - v . dnu along a trajectory.
/// `include_correction=false` drops the zeta term (the deliberately wrong
/// equation, for ablation).
ResidualSeries chart_consistency_residual(const FilterTrajectory& traj,
                                          const RateGenerator& generator,
                                          const Eigen::MatrixXd& h,
                                          bool include_correction = true);

/// Time series of the integrability quantities behind the filter hypotheses;
/// purely diagnostic.
struct HypothesisDiagnostics {
    std::vector<double> e_pi_sq;        // E_mu pi^2
    std::vector<double> e_log_pi_sq;    // E_mu log^2 pi
    std::vector<double> e_gain_sq;      // E_mu (pi+1)^2 |h - hbar|^2
    std::vector<double> e_drift_sq;     // E_mu (1 + pi^{-1})^2 (A pi)^2
    bool all_finite = true;
};

HypothesisDiagnostics hypothesis_diagnostics(const FilterTrajectory& traj,
                                             const RateGenerator& generator,
                                             const Eigen::MatrixXd& h);

}  // namespace igf

#endif
