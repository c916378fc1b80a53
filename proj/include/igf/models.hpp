#ifndef IGF_MODELS_HPP
#define IGF_MODELS_HPP

#include <vector>

#include <Eigen/Dense>

#include "igf/measure_space.hpp"
#include "igf/rng.hpp"

namespace igf {

/// Markov jump-process generator acting on densities with respect to the
/// reference weights r.  The stored matrix uses the target convention:
/// rates(to, from) is the jump rate from `from` to `to`, so columns sum to
/// zero and probability vectors evolve as dq/dt = rates * q.
class RateGenerator {
public:
    RateGenerator(Eigen::MatrixXd rates, Eigen::VectorXd r);

    int states() const { return static_cast<int>(r_.size()); }
    const Eigen::MatrixXd& rates() const { return rates_; }
    const Eigen::VectorXd& reference_weights() const { return r_; }
    MeasureSpace space() const { return MeasureSpace(r_); }

    /// Forward action on densities: (A p)(x) = r(x)^{-1} [rates (r .* p)](x).
    Eigen::VectorXd apply(const Eigen::VectorXd& p) const;

    /// exp(rates * dt): maps probability vectors over one step exactly.
    Eigen::MatrixXd transition_matrix(double dt) const;

private:
    Eigen::MatrixXd rates_;
    Eigen::VectorXd r_;
};

/// Linear-Gaussian signal/observation model: dX = B X dt + sqrt(A) dW,
/// observations h(x) = C x, initial law N(m0, R0).
struct LinearGaussianModel {
    Eigen::MatrixXd B;
    Eigen::MatrixXd A;   // diffusion matrix, positive semidefinite
    Eigen::MatrixXd C;
    Eigen::VectorXd m0;
    Eigen::MatrixXd R0;  // positive definite

    void validate() const;
    int state_dim() const { return static_cast<int>(B.rows()); }
    int obs_dim() const { return static_cast<int>(C.rows()); }
};

/// Signal sampled on a uniform grid together with observation increments
/// dY_k = h(X_{t_k}) dt + sqrt(dt) N(0, I) over [t_k, t_{k+1}).
template <class State>
struct SamplePath {
    double dt = 0.0;
    std::vector<State> states;                    // size K+1
    std::vector<Eigen::VectorXd> y_increments;    // size K (empty until observed)

    int steps() const { return static_cast<int>(states.size()) - 1; }
    double horizon() const { return dt * steps(); }
    double time(int k) const { return dt * k; }
};

using JumpPath = SamplePath<int>;
using DiffusionPath = SamplePath<Eigen::VectorXd>;

/// Exact event-time simulation of the jump process, sampled onto the grid;
/// the initial state is drawn from p0 against the reference weights.
JumpPath simulate_jump_path(const RateGenerator& generator, const DensityVector& p0,
                            double T, double dt, RngConfig rng);

/// Euler-Maruyama path of the linear-Gaussian signal with an exact draw of
/// the initial Gaussian.
DiffusionPath simulate_linear_diffusion(const LinearGaussianModel& model, double T, double dt,
                                        RngConfig rng);

/// Attach observation increments for a finite-state path; h is d x n_states.
/// The noise stream is independent of the signal stream.
void attach_observations(JumpPath& path, const Eigen::MatrixXd& h, RngConfig rng);

/// Attach observation increments for the linear-Gaussian path, h(x) = C x.
void attach_observations(DiffusionPath& path, const Eigen::MatrixXd& C, RngConfig rng);

/// Marginal law of X_t as a density against the reference weights, via the
/// matrix exponential of the generator.
DensityVector forward_marginal(const RateGenerator& generator, const DensityVector& p0, double t);

/// Subsample a path onto a grid coarsened by an integer factor, summing the
/// observation increments within each coarse step.  Used for step-halving
/// studies that must share one underlying observation record.
JumpPath coarsen_path(const JumpPath& path, int factor);

struct GaussianMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Mean and covariance of X_t for the linear-Gaussian model (mean ODE and
/// Lyapunov covariance ODE).
GaussianMoments forward_marginal(const LinearGaussianModel& model, double t);

}  // namespace igf

#endif
