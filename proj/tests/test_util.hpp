#ifndef IGF_TESTS_TEST_UTIL_HPP
#define IGF_TESTS_TEST_UTIL_HPP

#include <Eigen/Dense>

#include "igf/manifold.hpp"
#include "igf/measure_space.hpp"
#include "igf/rng.hpp"

namespace igf_test {

inline igf::MeasureSpace random_space(int n, igf::CounterRng& rng, double spread = 0.3) {
    Eigen::VectorXd mu(n);
    for (int x = 0; x < n; ++x) mu[x] = std::exp(spread * rng.normal());
    return igf::MeasureSpace(mu / mu.sum());
}

inline igf::DensityVector random_density(const igf::MeasureSpace& space, igf::CounterRng& rng,
                                         double spread = 1.0) {
    Eigen::VectorXd raw(space.size());
    for (int x = 0; x < space.size(); ++x) raw[x] = std::exp(spread * rng.normal());
    return igf::DensityVector(space, raw / space.integrate(raw));
}

inline igf::CenteredVector random_centered(const igf::MeasureSpace& space, igf::CounterRng& rng) {
    Eigen::VectorXd raw(space.size());
    for (int x = 0; x < space.size(); ++x) raw[x] = rng.normal();
    return igf::center(space, raw);
}

inline igf::CenteredVector unit_centered(const igf::MeasureSpace& space, igf::CounterRng& rng) {
    const igf::CenteredVector c = random_centered(space, rng);
    return igf::CenteredVector(space, c.values() / space.norm(c.values()));
}

}  // namespace igf_test

#endif
