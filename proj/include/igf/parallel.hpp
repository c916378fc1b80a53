#ifndef IGF_PARALLEL_HPP
#define IGF_PARALLEL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace igf {

/// Execution policy for embarrassingly parallel sweeps (replicates, grid
/// points, random pairs).  The serial path is the reference implementation:
/// results must be bit-identical between the two, which every kernel in this
/// library achieves by giving each work item its own RNG stream and output
/// slot and by reducing with a fixed pairwise order.
enum class Exec { serial, openmp };

template <class F>
void parallel_for(std::ptrdiff_t n, Exec exec, F&& body) {
    if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            body(i);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            body(i);
        }
    }
}

/// Pairwise (cascade) summation: deterministic reduction order independent of
/// the execution policy and thread count.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_mean(std::span<const double> x) {
    return x.empty() ? 0.0 : pairwise_sum(x) / static_cast<double>(x.size());
}

/// Unbiased sample standard deviation with the same deterministic reduction.
inline double sample_sd(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = pairwise_mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(x.size() - 1));
}

}  // namespace igf

#endif
