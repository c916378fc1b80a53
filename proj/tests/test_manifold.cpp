#include <cmath>

#include <doctest.h>

#include "igf/manifold.hpp"
#include "test_util.hpp"

using namespace igf;
using igf_test::random_density;
using igf_test::random_space;
using igf_test::unit_centered;

namespace {

// independent oracle: plain bisection for the inverse of z + log z
double oracle_psi(double w) {
    double lo = 1e-300, hi = std::max(2.0, w);
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid + std::log(mid) < w) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("manifold") {

TEST_CASE("center kills constants and is idempotent") {
    const MeasureSpace space = MeasureSpace::uniform(4);
    const CenteredVector zero = center(space, Eigen::VectorXd::Constant(4, 3.7));
    CHECK(zero.values().cwiseAbs().maxCoeff() < 1e-14);

    MeasureSpace two(Eigen::VectorXd::Constant(2, 0.5));
    const CenteredVector c = center(two, (Eigen::VectorXd(2) << 1.0, 3.0).finished());
    CHECK(c.values()[0] == doctest::Approx(-1.0));
    CHECK(c.values()[1] == doctest::Approx(1.0));

    CounterRng rng({11, 0}, RngRole::scenario);
    const MeasureSpace sp = random_space(7, rng);
    Eigen::VectorXd f(7);
    for (int i = 0; i < 7; ++i) f[i] = 5.0 * rng.normal();
    const Eigen::VectorXd once = center(sp, f).values();
    const Eigen::VectorXd twice = center(sp, once).values();
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::VectorXd bad(7);
    bad.setOnes();
    bad[3] = std::nan("");
    CHECK_THROWS_AS(center(sp, bad), InvalidInputError);
}

TEST_CASE("psi solves z + log z = w") {
    CHECK(psi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(psi(std::exp(1.0) + 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

    // frozen from the bisection oracle
    CHECK(psi(-5.0) == doctest::Approx(0.006693000497730992).epsilon(1e-13));
    CHECK(psi(-5.0) == doctest::Approx(oracle_psi(-5.0)).epsilon(1e-12));

    double worst = 0.0;
    for (double w = -30.0; w <= 30.0; w += 0.25) {
        const double z = psi(w);
        worst = std::max(worst, std::abs(z + std::log(z) - w));
        CHECK(z > 0.0);
    }
    CHECK(worst <= 1e-12);

    // strictly increasing on a grid
    double prev = psi(-30.0);
    for (double w = -29.5; w <= 30.0; w += 0.5) {
        const double z = psi(w);
        CHECK(z > prev);
        prev = z;
    }
}

TEST_CASE("chart of the reference measure is the origin") {
    const MeasureSpace space = MeasureSpace::uniform(5);
    const DensityVector p(space, Eigen::VectorXd::Ones(5));
    CHECK(chart_phi(space, p).a.values().cwiseAbs().maxCoeff() < 1e-15);
    CHECK(m_map(space, p).values().cwiseAbs().maxCoeff() < 1e-15);
    CHECK(e_map(space, p).values().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("chart values match direct summation on two states") {
    const MeasureSpace space = MeasureSpace::uniform(2);
    const DensityVector p(space, (Eigen::VectorXd(2) << 1.2, 0.8).finished());
    // oracle: evaluate p + log p and subtract its mean by hand
    const double f0 = 1.2 + std::log(1.2), f1 = 0.8 + std::log(0.8);
    const double mean = 0.5 * (f0 + f1);
    const ChartPoint a = chart_phi(space, p);
    CHECK(a.a.values()[0] == doctest::Approx(f0 - mean).epsilon(1e-15));
    CHECK(a.a.values()[1] == doctest::Approx(f1 - mean).epsilon(1e-15));
}

TEST_CASE("phi_inverse at the origin and against the scalar-root oracle") {
    const MeasureSpace space = MeasureSpace::uniform(3);
    const PhiInverse at0 = phi_inverse(space, ChartPoint{center(space, Eigen::VectorXd::Zero(3))});
    CHECK((at0.density.values().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK(at0.normalizer == doctest::Approx(1.0).epsilon(1e-14));

    // a = (2, -2) on two uniform states; oracle solves E_mu psi(a + Z) = 1 by
    // bisection built on the bisection psi
    const MeasureSpace two = MeasureSpace::uniform(2);
    const ChartPoint a{center(two, (Eigen::VectorXd(2) << 2.0, -2.0).finished())};
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (0.5 * (oracle_psi(2.0 + mid) + oracle_psi(-2.0 + mid)) < 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double z_oracle = 0.5 * (lo + hi);
    const PhiInverse inv = phi_inverse(two, a);
    CHECK(inv.normalizer == doctest::Approx(z_oracle).epsilon(1e-12));
    CHECK(inv.normalizer == doctest::Approx(0.42759980376368234).epsilon(1e-12));  // frozen
    CHECK(inv.density.values()[0] == doctest::Approx(1.8256588617463367).epsilon(1e-12));
    CHECK(inv.density.values()[1] == doctest::Approx(0.17434113825366312).epsilon(1e-12));
}

TEST_CASE("chart roundtrips both ways") {
    CounterRng rng({12, 0}, RngRole::scenario);
    for (int trial = 0; trial < 40; ++trial) {
        const MeasureSpace space = random_space(2 + trial % 9, rng);
        const DensityVector p = random_density(space, rng);
        const ChartPoint a = chart_phi(space, p);
        const DensityVector back = phi_inverse(space, a).density;
        CHECK((back.values() - p.values()).cwiseAbs().maxCoeff() < 1e-10);
        const ChartPoint again = chart_phi(space, back);
        CHECK((again.a.values() - a.a.values()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("normalizer derivative matches central differences") {
    CounterRng rng({13, 0}, RngRole::scenario);
    const MeasureSpace space = random_space(6, rng);
    const ChartPoint a = chart_phi(space, random_density(space, rng));
    const CenteredVector zero(space, Eigen::VectorXd::Zero(6));
    CHECK(dz_derivative(space, a, zero) == 0.0);

    const ChartPoint origin{center(space, Eigen::VectorXd::Zero(6))};
    const CenteredVector u = unit_centered(space, rng);
    CHECK(std::abs(dz_derivative(space, origin, u)) < 1e-14);

    const double eps = 1e-5;
    const auto z_at = [&](double s) {
        return phi_inverse(space,
                           ChartPoint{CenteredVector(space, a.a.values() + s * u.values())})
            .normalizer;
    };
    const double fd = (z_at(eps) - z_at(-eps)) / (2.0 * eps);
    CHECK(dz_derivative(space, a, u) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("KL divergence values and bounds") {
    const MeasureSpace space = MeasureSpace::uniform(2);
    const DensityVector p(space, (Eigen::VectorXd(2) << 1.2, 0.8).finished());
    const DensityVector q(space, (Eigen::VectorXd(2) << 0.8, 1.2).finished());
    CHECK(kl_divergence(space, p, p) == 0.0);
    // direct summation: 0.5*(0.8 log(0.8/1.2) + 1.2 log(1.2/0.8)) = 0.2 log 1.5
    CHECK(kl_divergence(space, q, p) == doctest::Approx(0.2 * std::log(1.5)).epsilon(1e-14));

    CounterRng rng({14, 0}, RngRole::scenario);
    for (int trial = 0; trial < 200; ++trial) {
        const MeasureSpace sp = random_space(2 + trial % 49, rng);
        const DensityVector a = random_density(sp, rng);
        const DensityVector b = random_density(sp, rng);
        const double sym = kl_divergence(sp, a, b) + kl_divergence(sp, b, a);
        CHECK(kl_divergence(sp, a, b) >= 0.0);

        const Eigen::VectorXd dm = m_map(sp, a).values() - m_map(sp, b).values();
        const Eigen::VectorXd de = e_map(sp, a).values() - e_map(sp, b).values();
        const Eigen::VectorXd dphi = chart_phi(sp, a).a.values() - chart_phi(sp, b).a.values();

        // bi-orthogonality identity
        CHECK(std::abs(sym - sp.inner(dm, de)) < 1e-10);
        // Lipschitz bound and the half bound
        const double phi_sq = sp.inner(dphi, dphi);
        CHECK(sp.inner(dm, dm) + sp.inner(de, de) <= phi_sq * (1.0 + 1e-12) + 1e-15);
        CHECK(sym <= 0.5 * phi_sq * (1.0 + 1e-12) + 1e-15);
    }
}

TEST_CASE("fisher inner product at the reference weights") {
    const MeasureSpace space = MeasureSpace::uniform(6);
    CounterRng rng({15, 0}, RngRole::scenario);
    const ChartPoint at{center(space, Eigen::VectorXd::Zero(6))};
    const CenteredVector u = unit_centered(space, rng);
    const CenteredVector v = unit_centered(space, rng);

    const double got = fisher_inner(space, at, {at, u}, {at, v});
    CHECK(got == doctest::Approx(0.25 * space.inner(u.values(), v.values())).epsilon(1e-13));

    const CenteredVector zero(space, Eigen::VectorXd::Zero(6));
    CHECK(fisher_inner(space, at, {at, zero}, {at, zero}) == 0.0);
}

TEST_CASE("fisher norm is dominated by the model-space norm") {
    CounterRng rng({16, 0}, RngRole::scenario);
    for (int trial = 0; trial < 50; ++trial) {
        const MeasureSpace space = random_space(2 + trial % 9, rng);
        const ChartPoint at = chart_phi(space, random_density(space, rng));
        const CenteredVector u = igf_test::random_centered(space, rng);
        const double fisher_sq = fisher_inner(space, at, {at, u}, {at, u});
        CHECK(fisher_sq >= -1e-14);
        CHECK(fisher_sq <= space.inner(u.values(), u.values()) * (1.0 + 1e-12));
    }
}

TEST_CASE("mismatched tangent bases are rejected") {
    const MeasureSpace space = MeasureSpace::uniform(3);
    CounterRng rng({17, 0}, RngRole::scenario);
    const ChartPoint a = chart_phi(space, random_density(space, rng));
    const ChartPoint b = chart_phi(space, random_density(space, rng));
    const CenteredVector u = unit_centered(space, rng);
    CHECK_THROWS_AS(fisher_inner(space, a, {b, u}, {a, u}), ContractError);
}

TEST_CASE("metric equals the mixed second derivative of KL") {
    CounterRng rng({18, 0}, RngRole::scenario);
    const double eps = 1e-4;
    for (int trial = 0; trial < 8; ++trial) {
        const MeasureSpace space = MeasureSpace::uniform(2 + trial % 5);
        const DensityVector p = random_density(space, rng);
        const ChartPoint at = chart_phi(space, p);
        const CenteredVector u = unit_centered(space, rng);
        const CenteredVector v = unit_centered(space, rng);

        const auto density_at = [&](double s, const CenteredVector& dir) {
            return phi_inverse(space,
                               ChartPoint{CenteredVector(space, at.a.values() + s * dir.values())})
                .density;
        };
        const auto kl_at = [&](double s, double t) {
            return kl_divergence(space, density_at(s, u), density_at(t, v));
        };
        const double mixed =
            -(kl_at(eps, eps) - kl_at(eps, -eps) - kl_at(-eps, eps) + kl_at(-eps, -eps)) /
            (4.0 * eps * eps);
        const double exact = fisher_inner(space, at, {at, u}, {at, v});
        CHECK(mixed == doctest::Approx(exact).epsilon(1e-5));
    }
}

TEST_CASE("orthonormal basis spans H and the coordinate metric represents the inner product") {
    CounterRng rng({19, 0}, RngRole::scenario);
    const MeasureSpace space = random_space(5, rng);
    const Eigen::MatrixXd basis = orthonormal_basis(space);
    REQUIRE(basis.cols() == 4);

    for (int i = 0; i < basis.cols(); ++i) {
        CHECK(std::abs(space.integrate(basis.col(i))) < 1e-13);
        for (int j = 0; j <= i; ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            CHECK(std::abs(space.inner(basis.col(i), basis.col(j)) - expected) < 1e-12);
        }
    }

    // completeness on centred vectors
    const CenteredVector w = igf_test::random_centered(space, rng);
    Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(5);
    for (int i = 0; i < basis.cols(); ++i) rebuilt += space.inner(basis.col(i), w.values()) * basis.col(i);
    CHECK((rebuilt - w.values()).cwiseAbs().maxCoeff() < 1e-12);

    const ChartPoint at = chart_phi(space, random_density(space, rng));
    const CenteredVector u = igf_test::random_centered(space, rng);
    const CenteredVector v = igf_test::random_centered(space, rng);
    const Eigen::MatrixXd g = coordinate_metric(space, at, basis);
    Eigen::VectorXd cu(4), cv(4);
    for (int i = 0; i < 4; ++i) {
        cu[i] = space.inner(basis.col(i), u.values());
        cv[i] = space.inner(basis.col(i), v.values());
    }
    const double via_coords = cu.dot(g * cv);
    const double direct = fisher_inner(space, at, {at, u}, {at, v});
    CHECK(via_coords == doctest::Approx(direct).epsilon(1e-10));

    // contraction results do not depend on the basis construction order
    const std::vector<int> perm = {3, 0, 4, 1, 2};
    const Eigen::MatrixXd basis2 = orthonormal_basis(space, perm);
    const Eigen::MatrixXd g2 = coordinate_metric(space, at, basis2);
    Eigen::VectorXd du(4), dv(4);
    for (int i = 0; i < 4; ++i) {
        du[i] = space.inner(basis2.col(i), u.values());
        dv[i] = space.inner(basis2.col(i), v.values());
    }
    CHECK(du.dot(g2 * dv) == doctest::Approx(direct).epsilon(1e-10));
}

}  // TEST_SUITE
