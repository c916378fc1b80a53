// Wall-clock comparison of the serial reference sweeps against the OpenMP
// kernels on the two replicate-heavy workloads.  The outputs must agree
// bit-for-bit; this tool reports timings and verifies that equality.

#include <chrono>
#include <cstdio>
#include <vector>

#include "igf/bridge.hpp"
#include "igf/filters.hpp"
#include "igf/info_flow.hpp"
#include "igf/models.hpp"
#include "igf/parallel.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Timing {
    double serial = 0.0;
    double openmp = 0.0;
    bool identical = false;
};

Timing bench_replicates(int n_rep) {
    using namespace igf;
    const MeasureSpace space = MeasureSpace::uniform(2);
    const RateGenerator generator(Eigen::MatrixXd::Zero(2, 2), space.weights());
    const Eigen::MatrixXd h = (Eigen::MatrixXd(1, 2) << 1.0, -1.0).finished();
    const DensityVector p0(space, Eigen::VectorXd::Ones(2));

    const auto sweep = [&](Exec exec) {
        std::vector<double> totals(n_rep);
        parallel_for(n_rep, exec, [&](std::ptrdiff_t i) {
            JumpPath path = simulate_jump_path(generator, p0, 1.0, 1e-3,
                                               {99, static_cast<std::uint64_t>(i)});
            attach_observations(path, h, {99, static_cast<std::uint64_t>(i)});
            const FilterTrajectory traj = wonham_filter(generator, h, p0, path);
            totals[i] = fisher_qv(traj, h).qv.back();
        });
        return totals;
    };

    Timing t;
    auto start = std::chrono::steady_clock::now();
    const auto serial = sweep(Exec::serial);
    t.serial = seconds_since(start);
    start = std::chrono::steady_clock::now();
    const auto parallel = sweep(Exec::openmp);
    t.openmp = seconds_since(start);
    t.identical = serial == parallel;
    return t;
}

Timing bench_bridge(int n_bridges) {
    using namespace igf;
    const ScalarDiffusionModel model(
        [](double x) { return std::tanh(x); },
        [](double x) {
            const double v = std::tanh(x);
            return 1.0 - v * v;
        },
        [](double x) { return std::tanh(x); }, 1.0, 1.0);
    const ScalarPath path = simulate_scalar_diffusion(model, 0.5, 1e-2, {99, 0});
    const Eigen::VectorXd x_grid = Eigen::VectorXd::LinSpaced(61, -6.0, 6.0);

    Timing t;
    auto start = std::chrono::steady_clock::now();
    const DensityEstimate serial = posterior_density_mc(model, path.y_increments, 1e-2, x_grid,
                                                        n_bridges, 50, {99, 1}, Exec::serial);
    t.serial = seconds_since(start);
    start = std::chrono::steady_clock::now();
    const DensityEstimate parallel = posterior_density_mc(model, path.y_increments, 1e-2, x_grid,
                                                          n_bridges, 50, {99, 1}, Exec::openmp);
    t.openmp = seconds_since(start);
    t.identical = serial.values == parallel.values && serial.std_errors == parallel.std_errors;
    return t;
}

void report(const char* name, const Timing& t) {
    std::printf("%-28s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   bitwise %s\n", name,
                t.serial, t.openmp, t.serial / t.openmp, t.identical ? "equal" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
    int n_rep = 4000, n_bridges = 2000;
    if (argc > 1) n_rep = std::atoi(argv[1]);
    if (argc > 2) n_bridges = std::atoi(argv[2]);

    const Timing filters = bench_replicates(n_rep);
    const Timing bridge = bench_bridge(n_bridges);
    std::printf("replicates=%d bridges/point=%d\n", n_rep, n_bridges);
    report("filter replicate sweep", filters);
    report("bridge density estimate", bridge);
    return (filters.identical && bridge.identical) ? 0 : 1;
}
