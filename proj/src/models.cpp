#include "igf/models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace igf {

namespace {

int grid_steps(double T, double dt) {
    if (!(dt > 0.0) || !(T >= 0.0)) throw InvalidInputError("grid: need dt > 0 and T >= 0");
    const int k = static_cast<int>(std::llround(T / dt));
    if (k < 1 || std::abs(k * dt - T) > 1e-9 * std::max(1.0, T)) {
        throw InvalidInputError("grid: T must be an integer multiple of dt");
    }
    return k;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& a, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff())) {
        throw InvalidInputError(std::string(what) + ": matrix is not positive semidefinite");
    }
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

RateGenerator::RateGenerator(Eigen::MatrixXd rates, Eigen::VectorXd r)
    : rates_(std::move(rates)), r_(std::move(r)) {
    if (rates_.rows() != rates_.cols()) throw InvalidInputError("RateGenerator: rate matrix must be square");
    if (rates_.rows() != r_.size()) throw InvalidInputError("RateGenerator: weight dimension mismatch");
    if (!rates_.allFinite()) throw InvalidInputError("RateGenerator: non-finite rates");
    MeasureSpace check(r_);  // validates positivity and total mass
    for (int j = 0; j < rates_.cols(); ++j) {
        for (int i = 0; i < rates_.rows(); ++i) {
            if (i != j && rates_(i, j) < 0.0) {
                throw InvalidInputError("RateGenerator: negative off-diagonal rate");
            }
        }
        const double colsum = rates_.col(j).sum();
        if (std::abs(colsum) > tol::generator_column_sum) {
            throw InvalidInputError("RateGenerator: column " + std::to_string(j) +
                                    " sums to " + std::to_string(colsum));
        }
    }
}

Eigen::VectorXd RateGenerator::apply(const Eigen::VectorXd& p) const {
    if (p.size() != r_.size()) throw InvalidInputError("RateGenerator::apply: dimension mismatch");
    return (rates_ * (r_.array() * p.array()).matrix()).array() / r_.array();
}

Eigen::MatrixXd RateGenerator::transition_matrix(double dt) const {
    return (rates_ * dt).exp();
}

void LinearGaussianModel::validate() const {
    const int m = state_dim();
    if (B.cols() != m || A.rows() != m || A.cols() != m || R0.rows() != m || R0.cols() != m ||
        m0.size() != m || C.cols() != m) {
        throw InvalidInputError("LinearGaussianModel: inconsistent dimensions");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(R0);
    if (llt.info() != Eigen::Success) throw InvalidInputError("LinearGaussianModel: R0 is not positive definite");
    matrix_sqrt_psd(A, "LinearGaussianModel");
}

JumpPath simulate_jump_path(const RateGenerator& generator, const DensityVector& p0,
                            double T, double dt, RngConfig rng) {
    const int k_steps = grid_steps(T, dt);
    CounterRng gen(rng, RngRole::signal);

    const Eigen::VectorXd q0 =
        (generator.reference_weights().array() * p0.values().array()).matrix();
    int state = gen.categorical(q0);

    JumpPath path;
    path.dt = dt;
    path.states.assign(k_steps + 1, state);

    double t = 0.0;
    int next_grid = 0;
    while (next_grid <= k_steps) {
        const double out_rate = -generator.rates()(state, state);
        double t_jump = (out_rate > 0.0) ? t + gen.exponential(out_rate)
                                         : std::numeric_limits<double>::infinity();
        while (next_grid <= k_steps && next_grid * dt < t_jump) {
            path.states[next_grid++] = state;
        }
        if (t_jump > T) break;
        Eigen::VectorXd out = generator.rates().col(state);
        out[state] = 0.0;
        state = gen.categorical(out);
        t = t_jump;
    }
    return path;
}

DiffusionPath simulate_linear_diffusion(const LinearGaussianModel& model, double T, double dt,
                                        RngConfig rng) {
    model.validate();
    const int k_steps = grid_steps(T, dt);
    const int m = model.state_dim();
    CounterRng gen(rng, RngRole::signal);

    const Eigen::MatrixXd l0 = Eigen::LLT<Eigen::MatrixXd>(model.R0).matrixL();
    const Eigen::MatrixXd diff_sqrt = matrix_sqrt_psd(model.A, "simulate_linear_diffusion");

    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z[i] = gen.normal();
    Eigen::VectorXd x = model.m0 + l0 * z;

    DiffusionPath path;
    path.dt = dt;
    path.states.reserve(k_steps + 1);
    path.states.push_back(x);
    const double sqrt_dt = std::sqrt(dt);
    for (int k = 0; k < k_steps; ++k) {
        for (int i = 0; i < m; ++i) z[i] = gen.normal();
        x += model.B * x * dt + diff_sqrt * (sqrt_dt * z);
        path.states.push_back(x);
    }
    return path;
}

namespace {

template <class State, class ObsFn>
void attach_observations_impl(SamplePath<State>& path, int d, ObsFn&& h_of, RngConfig rng) {
    CounterRng gen(rng, RngRole::obs_noise);
    const double sqrt_dt = std::sqrt(path.dt);
    path.y_increments.clear();
    path.y_increments.reserve(path.steps());
    for (int k = 0; k < path.steps(); ++k) {
        Eigen::VectorXd dy = h_of(path.states[k]) * path.dt;
        for (int i = 0; i < d; ++i) dy[i] += sqrt_dt * gen.normal();
        path.y_increments.push_back(std::move(dy));
    }
}

}  // namespace

void attach_observations(JumpPath& path, const Eigen::MatrixXd& h, RngConfig rng) {
    attach_observations_impl(path, static_cast<int>(h.rows()),
                             [&](int x) -> Eigen::VectorXd { return h.col(x); }, rng);
}

void attach_observations(DiffusionPath& path, const Eigen::MatrixXd& C, RngConfig rng) {
    attach_observations_impl(path, static_cast<int>(C.rows()),
                             [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return C * x; }, rng);
}

JumpPath coarsen_path(const JumpPath& path, int factor) {
    if (factor < 1 || path.steps() % factor != 0) {
        throw InvalidInputError("coarsen_path: factor must divide the step count");
    }
    JumpPath out;
    out.dt = path.dt * factor;
    const int coarse_steps = path.steps() / factor;
    out.states.reserve(coarse_steps + 1);
    for (int k = 0; k <= coarse_steps; ++k) out.states.push_back(path.states[k * factor]);
    if (!path.y_increments.empty()) {
        out.y_increments.reserve(coarse_steps);
        for (int k = 0; k < coarse_steps; ++k) {
            Eigen::VectorXd dy = path.y_increments[k * factor];
            for (int j = 1; j < factor; ++j) dy += path.y_increments[k * factor + j];
            out.y_increments.push_back(std::move(dy));
        }
    }
    return out;
}

DensityVector forward_marginal(const RateGenerator& generator, const DensityVector& p0, double t) {
    if (t < 0.0) throw InvalidInputError("forward_marginal: t must be nonnegative");
    const MeasureSpace space = generator.space();
    const Eigen::VectorXd q0 = (space.weights().array() * p0.values().array()).matrix();
    const Eigen::VectorXd qt = generator.transition_matrix(t) * q0;
    return DensityVector(space, (qt.array() / space.weights().array()).matrix());
}

GaussianMoments forward_marginal(const LinearGaussianModel& model, double t) {
    model.validate();
    if (t < 0.0) throw InvalidInputError("forward_marginal: t must be nonnegative");
    GaussianMoments out;
    out.mean = (model.B * t).exp() * model.m0;

    // Lyapunov covariance ODE dS = B S + S B' + A by classical RK4 substeps
    const int n_sub = std::max(100, static_cast<int>(std::ceil(t / 1e-3)));
    const double h = t / n_sub;
    Eigen::MatrixXd s = model.R0;
    const auto f = [&](const Eigen::MatrixXd& m) -> Eigen::MatrixXd {
        return model.B * m + m * model.B.transpose() + model.A;
    };
    for (int k = 0; k < n_sub && t > 0.0; ++k) {
        const Eigen::MatrixXd k1 = f(s);
        const Eigen::MatrixXd k2 = f(s + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = f(s + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = f(s + h * k3);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s = 0.5 * (s + s.transpose()).eval();
    }
    out.cov = s;
    return out;
}

}  // namespace igf
