#include "igf/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "igf/errors.hpp"
#include "igf/tolerances.hpp"

namespace igf {

namespace {

double gaussian_pdf(double x, double mean, double var) {
    const double z = x - mean;
    return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * M_PI * var);
}

double trapezoid_mass(const Eigen::VectorXd& values, double step) {
    double s = 0.5 * (values[0] + values[values.size() - 1]);
    for (int i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * step;
}

}  // namespace

CachedAntiderivative::CachedAntiderivative(std::function<double(double)> f, double half_width,
                                           int cells_per_unit)
    : f_(std::move(f)), x0_(-half_width), h_(1.0 / cells_per_unit) {
    const int cells = static_cast<int>(std::llround(2.0 * half_width * cells_per_unit));
    cumulative_.resize(cells + 1);
    cumulative_[0] = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double a = x0_ + i * h_;
        cumulative_[i + 1] = cumulative_[i] + simpson_cell(a, a + h_);
    }
}

double CachedAntiderivative::simpson_cell(double a, double b) const {
    return (b - a) / 6.0 * (f_(a) + 4.0 * f_(0.5 * (a + b)) + f_(b));
}

double CachedAntiderivative::operator()(double x) const {
    const auto value_from_zero = [&](double xx) {
        const double last = x0_ + h_ * (static_cast<double>(cumulative_.size()) - 1.0);
        double base, start;
        if (xx <= x0_ || xx >= last) {
            // outside the table: composite Simpson from the nearest edge
            const double edge = xx <= x0_ ? x0_ : last;
            base = xx <= x0_ ? cumulative_.front() : cumulative_.back();
            const int n = 64;
            const double step = (xx - edge) / n;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += simpson_cell(edge + i * step, edge + (i + 1) * step);
            return base + acc;
        }
        const int cell = std::min(static_cast<int>((xx - x0_) / h_),
                                  static_cast<int>(cumulative_.size()) - 2);
        start = x0_ + cell * h_;
        base = cumulative_[cell];
        return base + simpson_cell(start, xx);
    };
    // cumulative_ integrates from the left edge; shift so the origin is 0
    return value_from_zero(x) - value_from_zero(0.0);
}

ScalarDiffusionModel::ScalarDiffusionModel(std::function<double(double)> drift,
                                           std::function<double(double)> drift_prime,
                                           std::function<double(double)> obs, double bound,
                                           double prior_variance)
    : drift_(std::move(drift)),
      drift_prime_(std::move(drift_prime)),
      obs_(std::move(obs)),
      bound_(bound),
      prior_variance_(prior_variance) {
    if (!(prior_variance_ > 0.0)) throw InvalidInputError("ScalarDiffusionModel: prior variance must be positive");
    if (!(bound_ >= 0.0)) throw InvalidInputError("ScalarDiffusionModel: bound must be nonnegative");
    for (double x = -20.0; x <= 20.0; x += 0.01) {
        const double fd_prime = (drift_(x + 5e-6) - drift_(x - 5e-6)) / 1e-5;
        if (std::abs(drift_(x)) > bound_ + 1e-9 || std::abs(obs_(x)) > bound_ + 1e-9 ||
            std::abs(drift_prime_(x)) > bound_ + 1e-9 ||
            std::abs(fd_prime - drift_prime_(x)) > 1e-4 * std::max(1.0, bound_)) {
            throw InvalidInputError("ScalarDiffusionModel: coefficient bound violated near x = " +
                                    std::to_string(x));
        }
    }
    b_int_ = std::make_shared<const CachedAntiderivative>(drift_, 32.0, 1024);
}

BridgeSample sample_bridge(double y, double x, double t, int n_sub, CounterRng& rng) {
    if (!(t > 0.0)) throw InvalidInputError("sample_bridge: t must be positive");
    if (n_sub < 2) throw InvalidInputError("sample_bridge: need at least two sub-intervals");

    BridgeSample out;
    out.times.resize(n_sub + 1);
    out.values.resize(n_sub + 1);
    const double ds = t / n_sub;

    // standard bridge pinned to 0 at both ends, by the conditional recursion
    double w = 0.0;
    for (int j = 0; j <= n_sub; ++j) {
        const double s = j * ds;
        out.times[j] = s;
        if (j > 0 && j < n_sub) {
            const double remain_prev = t - (j - 1) * ds;
            const double mean = w * (t - s) / remain_prev;
            const double var = ds * (t - s) / remain_prev;
            w = mean + std::sqrt(var) * rng.normal();
        } else if (j == n_sub) {
            w = 0.0;
        }
        out.values[j] = (s * x + (t - s) * y) / t + w;
    }
    out.values[0] = y;  // endpoints exact by construction
    out.values[n_sub] = x;
    return out;
}

double likelihood_functional(const BridgeSample& bridge, const ScalarDiffusionModel& model,
                             std::span<const double> y_increments, double obs_dt) {
    const int n_sub = static_cast<int>(bridge.values.size()) - 1;
    const int n_obs = static_cast<int>(y_increments.size());
    const double t = bridge.times.back();
    if (n_obs % n_sub != 0) {
        throw InvalidInputError("likelihood_functional: observation grid must refine the bridge grid");
    }
    if (std::abs(n_obs * obs_dt - t) > 1e-9 * std::max(1.0, t)) {
        throw InvalidInputError("likelihood_functional: observation horizon mismatch");
    }
    const int per_sub = n_obs / n_sub;
    const double ds = t / n_sub;

    double obs_term = 0.0, time_term = 0.0;
    for (int j = 0; j < n_sub; ++j) {
        const double xj = bridge.values[j];
        double dy = 0.0;
        for (int i = 0; i < per_sub; ++i) dy += y_increments[j * per_sub + i];
        const double h = model.obs(xj);
        const double b = model.drift(xj);
        obs_term += h * dy;
        time_term += (h * h + b * b + model.drift_prime(xj)) * ds;
    }
    return model.drift_antiderivative(bridge.values.back()) -
           model.drift_antiderivative(bridge.values.front()) + obs_term - 0.5 * time_term;
}

DensityEstimate posterior_density_mc(const ScalarDiffusionModel& model,
                                     std::span<const double> y_increments, double obs_dt,
                                     const Eigen::VectorXd& x_grid, int n_bridges, int n_substeps,
                                     RngConfig rng, Exec exec) {
    if (n_bridges < 2) throw InvalidInputError("posterior_density_mc: need at least two bridges");
    const double t = static_cast<double>(y_increments.size()) * obs_dt;
    const double r_prior = model.prior_variance();
    const double alpha = r_prior / (r_prior + t);
    const double sigma_sq = r_prior * t / (r_prior + t);
    const int n_points = static_cast<int>(x_grid.size());

    DensityEstimate out;
    out.x_grid = x_grid;
    out.raw_values.resize(n_points);
    out.std_errors.resize(n_points);
    out.ess.resize(n_points);

    std::vector<char> warn(n_points, 0);
    parallel_for(n_points, exec, [&](std::ptrdiff_t gi) {
        const double x = x_grid[gi];
        // one stream per grid point keeps results independent of scheduling
        CounterRng point_rng(RngConfig{rng.seed, rng.stream_id + static_cast<std::uint64_t>(gi)},
                             RngRole::bridge);
        std::vector<double> weights(n_bridges);
        for (int i = 0; i < n_bridges; ++i) {
            const double y0 = alpha * x + std::sqrt(sigma_sq) * point_rng.normal();
            const BridgeSample bridge = sample_bridge(y0, x, t, n_substeps, point_rng);
            weights[i] = std::exp(likelihood_functional(bridge, model, y_increments, obs_dt));
        }
        const double mean_w = pairwise_mean(weights);
        const double sd_w = sample_sd(weights);
        const double prior_term = gaussian_pdf(x, 0.0, r_prior + t);
        out.raw_values[gi] = prior_term * mean_w;
        out.std_errors[gi] = prior_term * sd_w / std::sqrt(static_cast<double>(n_bridges));

        double sum_w = 0.0, sum_w2 = 0.0;
        for (double w : weights) {
            sum_w += w;
            sum_w2 += w * w;
        }
        out.ess[gi] = sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 : 0.0;
        if (out.ess[gi] < 10.0) warn[gi] = 1;
    });

    out.variance_warning = std::any_of(warn.begin(), warn.end(), [](char c) { return c != 0; });
    const double step = x_grid[1] - x_grid[0];
    const double mass = trapezoid_mass(out.raw_values, step);
    if (!(mass > 0.0)) throw NumericError("posterior_density_mc: zero estimated mass");
    out.values = out.raw_values / mass;
    return out;
}

DensityEstimate grid_reference_filter(const ScalarDiffusionModel& model,
                                      std::span<const double> y_increments, double obs_dt,
                                      const Eigen::VectorXd& x_grid, int refine, double margin) {
    const int n_eval = static_cast<int>(x_grid.size());
    if (n_eval < 2) throw InvalidInputError("grid_reference_filter: need at least two grid points");
    const double eval_step = x_grid[1] - x_grid[0];
    for (int i = 1; i < n_eval; ++i) {
        if (std::abs((x_grid[i] - x_grid[i - 1]) - eval_step) > 1e-9 * eval_step) {
            throw InvalidInputError("grid_reference_filter: evaluation grid must be uniform");
        }
    }
    const double h = eval_step / refine;
    const int pad = static_cast<int>(std::ceil(margin / h));
    const double lo = x_grid[0] - pad * h;
    const int n = (n_eval - 1) * refine + 2 * pad + 1;

    Eigen::VectorXd xs(n), b(n), hx(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = lo + i * h;
        b[i] = model.drift(xs[i]);
        hx[i] = model.obs(xs[i]);
    }

    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = gaussian_pdf(xs[i], 0.0, model.prior_variance());
    f /= trapezoid_mass(f, h);

    // Crank-Nicolson for df/dt = f''/2 - (b f)', Dirichlet-zero beyond the ends
    const double dt = obs_dt;
    const double diff = dt / (4.0 * h * h);          // (dt/2) * 1/(2 h^2)
    const double adv = dt / (4.0 * h);               // (dt/2) * 1/(2 h)
    Eigen::VectorXd dl(n), dc(n), du(n);             // implicit tridiagonal
    Eigen::VectorXd el(n), ec(n), eu(n);             // explicit tridiagonal
    for (int i = 0; i < n; ++i) {
        const double bl = i > 0 ? b[i - 1] : 0.0;
        const double bu = i + 1 < n ? b[i + 1] : 0.0;
        dl[i] = -(diff + adv * bl);
        dc[i] = 1.0 + 2.0 * diff;
        du[i] = -(diff - adv * bu);
        el[i] = diff + adv * bl;
        ec[i] = 1.0 - 2.0 * diff;
        eu[i] = diff - adv * bu;
    }

    Eigen::VectorXd rhs(n), cp(n), dp(n);
    const auto thomas_solve = [&](Eigen::VectorXd& target) {
        cp[0] = du[0] / dc[0];
        dp[0] = target[0] / dc[0];
        for (int i = 1; i < n; ++i) {
            const double m = dc[i] - dl[i] * cp[i - 1];
            cp[i] = du[i] / m;
            dp[i] = (target[i] - dl[i] * dp[i - 1]) / m;
        }
        target[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) target[i] = dp[i] - cp[i] * target[i + 1];
    };

    for (std::size_t k = 0; k < y_increments.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            rhs[i] = ec[i] * f[i];
            if (i > 0) rhs[i] += el[i] * f[i - 1];
            if (i + 1 < n) rhs[i] += eu[i] * f[i + 1];
        }
        thomas_solve(rhs);
        f = rhs;
        for (int i = 0; i < n; ++i) {
            f[i] = std::max(f[i], 0.0) *
                   std::exp(hx[i] * y_increments[k] - 0.5 * hx[i] * hx[i] * dt);
        }
        f /= trapezoid_mass(f, h);
        const double edge = 0.5 * h * (f[0] + f[1] + f[n - 1] + f[n - 2]);
        if (edge > tol::boundary_mass) {
            throw DomainError("grid_reference_filter: boundary mass " + std::to_string(edge) +
                              " exceeds tolerance; widen the margin");
        }
    }

    DensityEstimate out;
    out.x_grid = x_grid;
    out.values.resize(n_eval);
    for (int i = 0; i < n_eval; ++i) out.values[i] = f[pad + i * refine];
    out.values /= trapezoid_mass(out.values, eval_step);
    out.raw_values = out.values;
    out.std_errors = Eigen::VectorXd::Zero(n_eval);
    out.ess = Eigen::VectorXd::Zero(n_eval);
    return out;
}

ScalarPath simulate_scalar_diffusion(const ScalarDiffusionModel& model, double T, double dt,
                                     RngConfig rng) {
    const int k_steps = static_cast<int>(std::llround(T / dt));
    if (k_steps < 1 || std::abs(k_steps * dt - T) > 1e-9 * std::max(1.0, T)) {
        throw InvalidInputError("simulate_scalar_diffusion: T must be a multiple of dt");
    }
    CounterRng signal(rng, RngRole::signal);
    CounterRng noise(rng, RngRole::obs_noise);

    ScalarPath path;
    path.dt = dt;
    path.xs.reserve(k_steps + 1);
    path.y_increments.reserve(k_steps);
    double x = std::sqrt(model.prior_variance()) * signal.normal();
    path.xs.push_back(x);
    const double sqrt_dt = std::sqrt(dt);
    for (int k = 0; k < k_steps; ++k) {
        path.y_increments.push_back(model.obs(x) * dt + sqrt_dt * noise.normal());
        x += model.drift(x) * dt + sqrt_dt * signal.normal();
        path.xs.push_back(x);
    }
    return path;
}

double l1_distance(const DensityEstimate& a, const DensityEstimate& b) {
    if (a.x_grid.size() != b.x_grid.size()) throw InvalidInputError("l1_distance: grid mismatch");
    const double step = a.x_grid[1] - a.x_grid[0];
    Eigen::VectorXd diff = (a.values - b.values).cwiseAbs();
    return trapezoid_mass(diff, step);
}

}  // namespace igf
