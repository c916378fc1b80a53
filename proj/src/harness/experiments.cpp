#include "igf/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "igf/bridge.hpp"
#include "igf/filters.hpp"
#include "igf/info_flow.hpp"
#include "igf/manifold.hpp"
#include "igf/models.hpp"
#include "igf/version.hpp"

namespace igf::harness {

using nlohmann::json;

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct WonhamSetup {
    MeasureSpace space;
    RateGenerator generator;
    Eigen::MatrixXd h;
    DensityVector p0;
};

WonhamSetup wonham_setup(const json& model) {
    const Eigen::VectorXd weights = json_to_vector(model.at("weights"));
    MeasureSpace space(weights);
    RateGenerator gen(json_to_matrix(model.at("rates")), weights);
    Eigen::MatrixXd h = json_to_matrix(model.at("h"));
    DensityVector p0(space, json_to_vector(model.at("p0")));
    return WonhamSetup{std::move(space), std::move(gen), std::move(h), std::move(p0)};
}

std::function<double(double)> scalar_fn(const std::string& name) {
    if (name == "tanh") return [](double x) { return std::tanh(x); };
    if (name == "zero") return [](double) { return 0.0; };
    if (name.rfind("const:", 0) == 0) {
        const double c = std::stod(name.substr(6));
        return [c](double) { return c; };
    }
    throw InvalidInputError("unknown scalar function name: " + name);
}

std::function<double(double)> scalar_fn_prime(const std::string& name) {
    if (name == "tanh") return [](double x) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
    };
    return [](double) { return 0.0; };  // zero and const:<v>
}

ScalarDiffusionModel scalar_model(const json& model) {
    return ScalarDiffusionModel(scalar_fn(model.at("drift").get<std::string>()),
                                scalar_fn_prime(model.at("drift").get<std::string>()),
                                scalar_fn(model.at("obs").get<std::string>()),
                                model.at("bound").get<double>(),
                                model.at("prior_variance").get<double>());
}

std::map<std::string, ResultTable> run_geometry_check(const ExperimentConfig& cfg, Exec exec) {
    const auto sizes = cfg.numerics.at("sizes").get<std::vector<int>>();
    const int n_pairs = cfg.numerics.at("n_pairs").get<int>();

    double psi_residual_max = 0.0;
    for (double w = -30.0; w <= 30.0; w += 0.01) {
        const double z = psi(w);
        psi_residual_max = std::max(psi_residual_max, std::abs(z + std::log(z) - w));
    }

    ResultTable summary;
    summary.columns = {"size",        "n_pairs",         "max_identity_error",
                       "max_roundtrip_error", "bound_violations", "half_bound_violations",
                       "max_psi_residual"};

    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const int n = sizes[si];
        std::vector<double> identity_err(n_pairs), roundtrip_err(n_pairs);
        std::vector<char> bound_bad(n_pairs, 0), half_bad(n_pairs, 0);

        parallel_for(n_pairs, exec, [&](std::ptrdiff_t i) {
            CounterRng rng({cfg.seed, (static_cast<std::uint64_t>(si) << 32) |
                                          static_cast<std::uint64_t>(i)},
                           RngRole::scenario);
            Eigen::VectorXd mu(n);
            for (int x = 0; x < n; ++x) mu[x] = std::exp(0.3 * rng.normal());
            mu /= mu.sum();
            const MeasureSpace space(mu);

            const auto random_density = [&]() {
                Eigen::VectorXd raw(n);
                for (int x = 0; x < n; ++x) raw[x] = std::exp(rng.normal());
                return DensityVector(space, raw / space.integrate(raw));
            };
            const DensityVector p = random_density();
            const DensityVector q = random_density();

            const Eigen::VectorXd dm = m_map(space, p).values() - m_map(space, q).values();
            const Eigen::VectorXd de = e_map(space, p).values() - e_map(space, q).values();
            const Eigen::VectorXd dphi =
                chart_phi(space, p).a.values() - chart_phi(space, q).a.values();
            const double sym_kl = kl_divergence(space, p, q) + kl_divergence(space, q, p);

            identity_err[i] = std::abs(sym_kl - space.inner(dm, de));
            const double phi_sq = space.inner(dphi, dphi);
            const double slack = 1e-12 * std::max(1.0, phi_sq);
            if (space.inner(dm, dm) + space.inner(de, de) > phi_sq + slack) bound_bad[i] = 1;
            if (sym_kl > 0.5 * phi_sq + slack) half_bad[i] = 1;

            const DensityVector rt = phi_inverse(space, chart_phi(space, p)).density;
            roundtrip_err[i] = (rt.values() - p.values()).cwiseAbs().maxCoeff();
        });

        summary.add_row({static_cast<std::int64_t>(n), static_cast<std::int64_t>(n_pairs),
                         *std::max_element(identity_err.begin(), identity_err.end()),
                         *std::max_element(roundtrip_err.begin(), roundtrip_err.end()),
                         static_cast<std::int64_t>(std::count(bound_bad.begin(), bound_bad.end(), 1)),
                         static_cast<std::int64_t>(std::count(half_bad.begin(), half_bad.end(), 1)),
                         psi_residual_max});
    }
    return {{"summary.csv", std::move(summary)}};
}

std::map<std::string, ResultTable> run_wonham(const ExperimentConfig& cfg) {
    WonhamSetup setup = wonham_setup(cfg.model);
    const double T = cfg.numerics.at("T").get<double>();
    const double dt = cfg.numerics.at("dt").get<double>();

    JumpPath path = simulate_jump_path(setup.generator, setup.p0, T, dt, {cfg.seed, 0});
    attach_observations(path, setup.h, {cfg.seed, 0});
    const FilterTrajectory traj = wonham_filter(setup.generator, setup.h, setup.p0, path);
    const ResidualSeries residuals = chart_consistency_residual(traj, setup.generator, setup.h);
    const HypothesisDiagnostics diag = hypothesis_diagnostics(traj, setup.generator, setup.h);

    const int m = setup.space.size();
    const int d = static_cast<int>(setup.h.rows());

    ResultTable trajectory;
    trajectory.columns = {"t"};
    for (int x = 0; x < m; ++x) trajectory.columns.push_back("pi_" + std::to_string(x));
    for (int k = 0; k < d; ++k) trajectory.columns.push_back("hbar_" + std::to_string(k));
    for (int k = 0; k <= traj.steps(); ++k) {
        std::vector<Cell> row{traj.dt * k};
        for (int x = 0; x < m; ++x) row.emplace_back(traj.pis[k].values()[x]);
        for (int ch = 0; ch < d; ++ch) row.emplace_back(traj.hbars[k][ch]);
        trajectory.add_row(std::move(row));
    }

    ResultTable res_table;
    res_table.columns = {"t", "residual_h_norm"};
    for (int ch = 0; ch < d; ++ch) res_table.columns.push_back("innovation_" + std::to_string(ch));
    for (int k = 0; k < traj.steps(); ++k) {
        std::vector<Cell> row{traj.dt * k, residuals.per_step[k]};
        for (int ch = 0; ch < d; ++ch) row.emplace_back(traj.innovations[k][ch]);
        res_table.add_row(std::move(row));
    }

    double mass_err = 0.0;
    for (const auto& pi : traj.pis) {
        mass_err = std::max(mass_err, std::abs(setup.space.integrate(pi.values()) - 1.0));
    }
    ResultTable summary;
    summary.columns = {"metric", "value"};
    summary.add_row({std::string("rms_chart_residual"), residuals.rms});
    summary.add_row({std::string("max_chart_residual"), residuals.max});
    summary.add_row({std::string("max_mass_error"), mass_err});
    summary.add_row({std::string("diagnostics_all_finite"),
                     static_cast<std::int64_t>(diag.all_finite ? 1 : 0)});
    summary.add_row({std::string("max_e_pi_sq"),
                     *std::max_element(diag.e_pi_sq.begin(), diag.e_pi_sq.end())});
    summary.add_row({std::string("max_e_log_pi_sq"),
                     *std::max_element(diag.e_log_pi_sq.begin(), diag.e_log_pi_sq.end())});
    summary.add_row({std::string("max_e_gain_sq"),
                     *std::max_element(diag.e_gain_sq.begin(), diag.e_gain_sq.end())});
    summary.add_row({std::string("max_e_drift_sq"),
                     *std::max_element(diag.e_drift_sq.begin(), diag.e_drift_sq.end())});

    return {{"trajectory.csv", std::move(trajectory)},
            {"residuals.csv", std::move(res_table)},
            {"summary.csv", std::move(summary)}};
}

std::map<std::string, ResultTable> run_exp_filter(const ExperimentConfig& cfg) {
    WonhamSetup setup = wonham_setup(cfg.model);
    const double T = cfg.numerics.at("T").get<double>();
    const double dt = cfg.numerics.at("dt").get<double>();

    JumpPath path = simulate_jump_path(setup.generator, setup.p0, T, dt, {cfg.seed, 0});
    attach_observations(path, setup.h, {cfg.seed, 0});

    const ExponentialFamily family = ExponentialFamily::spanning_basis(setup.space);
    const FilterTrajectory won = wonham_filter(setup.generator, setup.h, setup.p0, path);
    const ThetaTrajectory theta = exp_coord_filter(family, setup.generator, setup.h,
                                                   family.params_from_density(setup.p0), path);

    const int m = setup.space.size();
    ResultTable trajectory;
    trajectory.columns = {"t"};
    for (int x = 0; x < m; ++x) trajectory.columns.push_back("wonham_pi_" + std::to_string(x));
    for (int x = 0; x < m; ++x) trajectory.columns.push_back("exp_pi_" + std::to_string(x));
    trajectory.columns.push_back("gap_sup");

    double gap_max = 0.0;
    for (int k = 0; k <= won.steps(); ++k) {
        const DensityVector exp_density = family.density_of(theta.thetas[k]);
        const double gap =
            (exp_density.values() - won.pis[k].values()).cwiseAbs().maxCoeff();
        gap_max = std::max(gap_max, gap);
        std::vector<Cell> row{won.dt * k};
        for (int x = 0; x < m; ++x) row.emplace_back(won.pis[k].values()[x]);
        for (int x = 0; x < m; ++x) row.emplace_back(exp_density.values()[x]);
        row.emplace_back(gap);
        trajectory.add_row(std::move(row));
    }

    ResultTable summary;
    summary.columns = {"metric", "value"};
    summary.add_row({std::string("sup_density_gap"), gap_max});
    summary.add_row({std::string("steps"), static_cast<std::int64_t>(won.steps())});

    return {{"trajectory.csv", std::move(trajectory)}, {"summary.csv", std::move(summary)}};
}

std::map<std::string, ResultTable> run_kalman(const ExperimentConfig& cfg) {
    LinearGaussianModel model{json_to_matrix(cfg.model.at("B")), json_to_matrix(cfg.model.at("A")),
                              json_to_matrix(cfg.model.at("C")), json_to_vector(cfg.model.at("m0")),
                              json_to_matrix(cfg.model.at("R0"))};
    const double T = cfg.numerics.at("T").get<double>();
    const double dt = cfg.numerics.at("dt").get<double>();

    DiffusionPath path = simulate_linear_diffusion(model, T, dt, {cfg.seed, 0});
    attach_observations(path, model.C, {cfg.seed, 0});
    const KalmanTrajectory traj = kalman_bucy(model, path);

    const int m = model.state_dim();
    ResultTable trajectory;
    trajectory.columns = {"t"};
    for (int i = 0; i < m; ++i) trajectory.columns.push_back("xbar_" + std::to_string(i));
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            trajectory.columns.push_back("r_" + std::to_string(i) + "_" + std::to_string(j));
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        std::vector<Cell> row{traj.dt * static_cast<double>(k)};
        for (int i = 0; i < m; ++i) row.emplace_back(traj.states[k].xbar[i]);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) row.emplace_back(traj.states[k].cov(i, j));
        trajectory.add_row(std::move(row));
    }

    ResultTable qv_table;
    qv_table.columns = {"t", "qv", "integrand"};
    for (std::size_t k = 0; k < traj.qv.size(); ++k) {
        qv_table.add_row({traj.dt * static_cast<double>(k), traj.qv[k],
                          (model.C * traj.states[k].cov * model.C.transpose()).trace()});
    }

    ResultTable summary;
    summary.columns = {"metric", "value"};
    summary.add_row({std::string("qv_final"), traj.qv.back()});
    summary.add_row({std::string("r_final_trace"), traj.states.back().cov.trace()});

    return {{"trajectory.csv", std::move(trajectory)},
            {"qv.csv", std::move(qv_table)},
            {"summary.csv", std::move(summary)}};
}

std::map<std::string, ResultTable> run_qv_info(const ExperimentConfig& cfg, Exec exec) {
    const Eigen::VectorXd h_values = json_to_vector(cfg.model.at("h_values"));
    const int m = static_cast<int>(h_values.size());
    const Eigen::VectorXd weights =
        cfg.model.contains("weights") ? json_to_vector(cfg.model.at("weights"))
                                      : Eigen::VectorXd::Constant(m, 1.0 / m);
    const MeasureSpace space(weights);
    const RateGenerator generator(Eigen::MatrixXd::Zero(m, m), weights);
    const Eigen::MatrixXd h = h_values.transpose();
    const DensityVector p0(space, json_to_vector(cfg.model.at("p0")));

    const double T = cfg.numerics.at("T").get<double>();
    const double dt = cfg.numerics.at("dt").get<double>();
    const int n_rep = cfg.numerics.at("n_replicates").get<int>();
    const int k_steps = static_cast<int>(std::llround(T / dt));
    const int stride = std::max(1, k_steps / 100);

    std::vector<int> thin;
    for (int k = 0; k < k_steps; k += stride) thin.push_back(k);
    thin.push_back(k_steps);

    std::vector<double> qv_totals(n_rep), log_lrs(n_rep);
    std::vector<std::vector<double>> qv_thin(thin.size(), std::vector<double>(n_rep));

    parallel_for(n_rep, exec, [&](std::ptrdiff_t i) {
        JumpPath path = simulate_jump_path(generator, p0, T, dt,
                                           {cfg.seed, static_cast<std::uint64_t>(i)});
        attach_observations(path, h, {cfg.seed, static_cast<std::uint64_t>(i)});
        const FilterTrajectory traj = wonham_filter(generator, h, p0, path);
        const QvSeries qv = fisher_qv(traj, h);
        qv_totals[i] = qv.qv.back();
        log_lrs[i] = path_log_lr(traj, h, path);
        for (std::size_t j = 0; j < thin.size(); ++j) qv_thin[j][i] = qv.qv[thin[j]];
    });

    const MiEstimate est_qv = mi_qv_half(qv_totals);
    const MiEstimate est_lr = mi_path_lr(log_lrs);
    const MiEstimate est_oracle = mi_channel_oracle(space, p0, h_values, T);

    ResultTable mi;
    mi.columns = {"method", "value", "std_error", "n_replicates"};
    for (const MiEstimate* est : {&est_qv, &est_lr, &est_oracle}) {
        mi.add_row({est->method, est->value, est->std_error,
                    static_cast<std::int64_t>(est->n_replicates)});
    }

    ResultTable qv_table;
    qv_table.columns = {"t", "mean_qv", "se_qv"};
    for (std::size_t j = 0; j < thin.size(); ++j) {
        qv_table.add_row({dt * thin[j], pairwise_mean(qv_thin[j]),
                          sample_sd(qv_thin[j]) / std::sqrt(static_cast<double>(n_rep))});
    }

    const auto sigma_gap = [](const MiEstimate& a, const MiEstimate& b) {
        const double joint = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
        return joint > 0.0 ? std::abs(a.value - b.value) / joint : 0.0;
    };
    ResultTable summary;
    summary.columns = {"metric", "value"};
    summary.add_row({std::string("mi_qv_half"), est_qv.value});
    summary.add_row({std::string("mi_path_lr"), est_lr.value});
    summary.add_row({std::string("mi_channel_oracle"), est_oracle.value});
    summary.add_row({std::string("sigma_gap_qv_lr"), sigma_gap(est_qv, est_lr)});
    summary.add_row({std::string("sigma_gap_qv_oracle"), sigma_gap(est_qv, est_oracle)});
    summary.add_row({std::string("sigma_gap_lr_oracle"), sigma_gap(est_lr, est_oracle)});

    return {{"mi.csv", std::move(mi)},
            {"qv.csv", std::move(qv_table)},
            {"summary.csv", std::move(summary)}};
}

std::map<std::string, ResultTable> run_bridge(const ExperimentConfig& cfg, Exec exec) {
    const ScalarDiffusionModel model = scalar_model(cfg.model);
    const double t = cfg.numerics.at("t").get<double>();
    const double dt = cfg.numerics.at("dt").get<double>();
    const auto& grid_spec = cfg.numerics.at("x_grid");
    const int points = grid_spec.at("points").get<int>();
    const Eigen::VectorXd x_grid = Eigen::VectorXd::LinSpaced(
        points, grid_spec.at("min").get<double>(), grid_spec.at("max").get<double>());
    const int n_bridges = cfg.numerics.at("n_bridges").get<int>();
    const int n_substeps = cfg.numerics.at("n_substeps").get<int>();

    const ScalarPath path = simulate_scalar_diffusion(model, t, dt, {cfg.seed, 0});
    const DensityEstimate mc = posterior_density_mc(model, path.y_increments, dt, x_grid,
                                                    n_bridges, n_substeps, {cfg.seed, 1}, exec);
    const DensityEstimate ref = grid_reference_filter(model, path.y_increments, dt, x_grid);

    ResultTable density;
    density.columns = {"x", "mc_density", "mc_std_error", "reference", "ess"};
    const double step = x_grid[1] - x_grid[0];
    double raw_mass = 0.0;
    for (int i = 0; i < points; ++i) {
        const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
        raw_mass += w * mc.raw_values[i] * step;
    }
    double aggregate_se = 0.0;
    for (int i = 0; i < points; ++i) {
        const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
        aggregate_se += w * (mc.std_errors[i] / raw_mass) * step;
        density.add_row(
            {x_grid[i], mc.values[i], mc.std_errors[i] / raw_mass, ref.values[i], mc.ess[i]});
    }

    ResultTable summary;
    summary.columns = {"metric", "value"};
    summary.add_row({std::string("l1_distance"), l1_distance(mc, ref)});
    summary.add_row({std::string("aggregate_std_error"), aggregate_se});
    summary.add_row({std::string("min_ess"), mc.ess.minCoeff()});
    summary.add_row({std::string("variance_warning"),
                     static_cast<std::int64_t>(mc.variance_warning ? 1 : 0)});

    return {{"density.csv", std::move(density)}, {"summary.csv", std::move(summary)}};
}

std::map<std::string, ResultTable> run_decomposition(const ExperimentConfig& cfg, Exec exec) {
    const int a = cfg.model.at("alphabet").get<int>();
    const int n_tables = cfg.numerics.at("n_tables").get<int>();

    std::vector<DecompositionReport> reports(n_tables);
    parallel_for(n_tables, exec, [&](std::ptrdiff_t i) {
        CounterRng rng({cfg.seed, static_cast<std::uint64_t>(i)}, RngRole::scenario);
        const auto random_dist = [&](int n) {
            Eigen::VectorXd v(n);
            for (int x = 0; x < n; ++x) v[x] = -std::log(rng.uniform());
            return (v / v.sum()).eval();
        };
        const Eigen::VectorXd pu = random_dist(a);
        Tensor3 joint(a);
        for (int u = 0; u < a; ++u) {
            const Eigen::VectorXd pv = random_dist(a);
            const Eigen::VectorXd pw = random_dist(a);
            for (int v = 0; v < a; ++v)
                for (int w = 0; w < a; ++w) joint(u, v, w) = pu[u] * pv[v] * pw[w];
        }
        reports[i] = info_decomposition_check(joint);
    });

    ResultTable summary;
    summary.columns = {"table_id", "mi_joint", "mi_first", "mi_second_given_first",
                       "identity_error", "bayes_error"};
    for (int i = 0; i < n_tables; ++i) {
        summary.add_row({static_cast<std::int64_t>(i), reports[i].mi_joint, reports[i].mi_first,
                         reports[i].mi_second_given_first, reports[i].identity_error,
                         reports[i].bayes_error});
    }
    return {{"summary.csv", std::move(summary)}};
}

}  // namespace

Metadata base_metadata(const ExperimentConfig& cfg) {
    Metadata meta;
    meta.emplace_back("experiment", cfg.experiment);
    meta.emplace_back("config_hash", hash_hex(cfg.config_hash));
    meta.emplace_back("seed", std::to_string(cfg.seed));
    meta.emplace_back("library_version", library_version);
    meta.emplace_back("model", cfg.model.dump());
    meta.emplace_back("numerics", cfg.numerics.dump());
    return meta;
}

std::map<std::string, ResultTable> run_experiment(const ExperimentConfig& cfg, Exec exec) {
    if (cfg.experiment == "geometry-check") return run_geometry_check(cfg, exec);
    if (cfg.experiment == "wonham") return run_wonham(cfg);
    if (cfg.experiment == "exp-filter") return run_exp_filter(cfg);
    if (cfg.experiment == "kalman-bucy") return run_kalman(cfg);
    if (cfg.experiment == "qv-info") return run_qv_info(cfg, exec);
    if (cfg.experiment == "bridge-density") return run_bridge(cfg, exec);
    if (cfg.experiment == "decomposition") return run_decomposition(cfg, exec);
    throw ConfigError("unknown experiment: " + cfg.experiment);
}

std::vector<std::filesystem::path> run_and_write(const ExperimentConfig& cfg,
                                                 const std::string& output_override, Exec exec) {
    const std::filesystem::path dir =
        output_override.empty() ? cfg.output_directory : output_override;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("run_and_write: cannot create " + dir.string() + ": " + ec.message());

    const auto tables = run_experiment(cfg, exec);
    const Metadata meta = base_metadata(cfg);
    std::vector<std::filesystem::path> written;
    for (const auto& [name, table] : tables) {
        const auto path = dir / name;
        write_csv(path, table, meta);
        written.push_back(path);
    }
    return written;
}

}  // namespace igf::harness
