#ifndef IGF_BRIDGE_HPP
#define IGF_BRIDGE_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "igf/parallel.hpp"
#include "igf/rng.hpp"

namespace igf {

/// Cached antiderivative of a scalar function from 0, built once on a uniform
/// table with per-cell Simpson quadrature; arbitrary points are finished with
/// a partial-cell Simpson rule.
class CachedAntiderivative {
public:
    CachedAntiderivative(std::function<double(double)> f, double half_width, int cells_per_unit);
    double operator()(double x) const;

private:
    double simpson_cell(double a, double b) const;
    std::function<double(double)> f_;
    double x0_, h_;
    std::vector<double> cumulative_;
};

/// Scalar diffusion dX = b(X) dt + dW with bounded coefficients, observed as
/// dY = h(X) dt + dB, prior N(0, R).  The stated bound on |b|, |b'| and |h|
/// is verified numerically on a wide grid at construction.
class ScalarDiffusionModel {
public:
    ScalarDiffusionModel(std::function<double(double)> drift,
                         std::function<double(double)> drift_prime,
                         std::function<double(double)> obs, double bound, double prior_variance);

    double drift(double x) const { return drift_(x); }
    double drift_prime(double x) const { return drift_prime_(x); }
    double obs(double x) const { return obs_(x); }
    double bound() const { return bound_; }
    double prior_variance() const { return prior_variance_; }
    /// B(x) = integral of the drift from 0 to x.
    double drift_antiderivative(double x) const { return (*b_int_)(x); }

private:
    std::function<double(double)> drift_, drift_prime_, obs_;
    double bound_, prior_variance_;
    std::shared_ptr<const CachedAntiderivative> b_int_;
};

/// Pinned path on a sub-grid of [0, t]: value y at 0 and x at t, with exact
/// Brownian-bridge interior increments.
struct BridgeSample {
    std::vector<double> times;   // n_sub + 1 points
    std::vector<double> values;  // endpoints exact
};

BridgeSample sample_bridge(double y, double x, double t, int n_sub, CounterRng& rng);

/// Unnormalised path weight exponent along the pinned path:
/// B(x) - B(y) + sum h dY - 1/2 sum (h^2 + b^2 + b') ds, left-point rule.
/// Observation increments must live on a grid refining the bridge sub-grid.
double likelihood_functional(const BridgeSample& bridge, const ScalarDiffusionModel& model,
                             std::span<const double> y_increments, double obs_dt);

/// Posterior density of X_t against Lebesgue on an evaluation grid.
struct DensityEstimate {
    Eigen::VectorXd x_grid;
    Eigen::VectorXd values;      // renormalised to unit trapezoid mass
    Eigen::VectorXd raw_values;  // Monte Carlo mean before renormalisation
    Eigen::VectorXd std_errors;  // pointwise, scaled like raw_values
    Eigen::VectorXd ess;         // effective sample size per point (0 for exact)
    bool variance_warning = false;  // some point had ESS < 10
};

/// Monte Carlo estimate of the posterior density: for each grid point x the
/// initial point is importance-sampled from its conditional Gaussian and the
/// pinned path weight is averaged over bridges.  Deterministic for a fixed
/// seed regardless of execution policy.
DensityEstimate posterior_density_mc(const ScalarDiffusionModel& model,
                                     std::span<const double> y_increments, double obs_dt,
                                     const Eigen::VectorXd& x_grid, int n_bridges, int n_substeps,
                                     RngConfig rng, Exec exec = Exec::openmp);

/// Deterministic reference: operator-split solve of the filtering density on
/// a truncated refined grid (Crank-Nicolson diffusion step, pointwise
/// likelihood reweighting, renormalisation).  DomainError if the truncation
/// leaks more than tol::boundary_mass.
DensityEstimate grid_reference_filter(const ScalarDiffusionModel& model,
                                      std::span<const double> y_increments, double obs_dt,
                                      const Eigen::VectorXd& x_grid, int refine = 16,
                                      double margin = 2.0);

/// Signal/observation simulator for the scalar diffusion (kept here: the
/// general-purpose simulators cover jump and linear-Gaussian signals only).
struct ScalarPath {
    double dt = 0.0;
    std::vector<double> xs;            // K+1
    std::vector<double> y_increments;  // K
};

ScalarPath simulate_scalar_diffusion(const ScalarDiffusionModel& model, double T, double dt,
                                     RngConfig rng);

/// L1 distance between two renormalised densities on the same grid.
double l1_distance(const DensityEstimate& a, const DensityEstimate& b);

}  // namespace igf

#endif
