#include "igf/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace igf {

bool same_point(const ChartPoint& lhs, const ChartPoint& rhs) {
    return lhs.a.values().size() == rhs.a.values().size() &&
           (lhs.a.values().array() == rhs.a.values().array()).all();
}

CenteredVector center(const MeasureSpace& space, const Eigen::VectorXd& f) {
    if (!f.allFinite()) throw InvalidInputError("center: non-finite entries");
    Eigen::VectorXd v = (f.array() - space.integrate(f)).matrix();
    // second pass removes the O(eps * |f|) rounding residue of the first
    v.array() -= space.integrate(v);
    return CenteredVector(space, std::move(v));
}

CenteredVector m_map(const MeasureSpace& space, const DensityVector& p) {
    return center(space, p.values());
}

CenteredVector e_map(const MeasureSpace& space, const DensityVector& p) {
    return center(space, p.values().array().log().matrix());
}

ChartPoint chart_phi(const MeasureSpace& space, const DensityVector& p) {
    return ChartPoint{center(space, (p.values().array() + p.values().array().log()).matrix())};
}

double psi(double w) {
    if (!std::isfinite(w)) throw InvalidInputError("psi: non-finite argument");
    // z + log z is increasing and concave; bracket then run safeguarded Newton.
    double lo, hi;
    if (w >= 1.0) {
        lo = 1.0;
        hi = w;
    } else {
        lo = std::max(std::exp(w - 1.0), std::numeric_limits<double>::min());
        hi = 1.0;
    }
    double z = std::clamp(std::max(w, std::exp(w - 1.0)), lo, hi);
    // iterate to the rounding floor, well inside tol::psi_residual
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(w));
    for (int it = 0; it < 200; ++it) {
        const double f = z + std::log(z) - w;
        if (std::abs(f) <= floor) break;
        if (f > 0.0) {
            hi = z;
        } else {
            lo = z;
        }
        double next = z - f * z / (z + 1.0);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (next == z) break;
        z = next;
    }
    return z;
}

PhiInverse phi_inverse(const MeasureSpace& space, const ChartPoint& a) {
    const Eigen::VectorXd& av = a.a.values();
    const auto mass_at = [&](double z_try, Eigen::VectorXd& p) {
        for (int x = 0; x < av.size(); ++x) p[x] = psi(av[x] + z_try);
        return space.integrate(p);
    };

    Eigen::VectorXd p(av.size());
    double z = 1.0;
    double g = mass_at(z, p) - 1.0;

    // grow a bracket geometrically around Z0 = 1; E_mu psi(a+Z) is increasing in Z
    double lo = z, hi = z, g_lo = g, g_hi = g;
    double step = 1.0;
    int grow = 0;
    while (g_lo > 0.0) {
        lo -= step;
        step *= 2.0;
        g_lo = mass_at(lo, p) - 1.0;
        if (++grow > 200) throw NumericError("phi_inverse: bracket growth failed (lower)");
    }
    step = 1.0;
    while (g_hi < 0.0) {
        hi += step;
        step *= 2.0;
        g_hi = mass_at(hi, p) - 1.0;
        if (++grow > 400) throw NumericError("phi_inverse: bracket growth failed (upper)");
    }

    z = std::clamp(z, lo, hi);
    g = mass_at(z, p) - 1.0;
    // drive the residual to its rounding floor; the contract only needs
    // tol::normalizer_residual but downstream difference quotients benefit
    const double floor = 8.0 * std::numeric_limits<double>::epsilon();
    int stalled = 0;
    double best = std::abs(g);
    for (int it = 0; it < 200 && std::abs(g) > floor && stalled < 3; ++it) {
        if (g > 0.0) {
            hi = z;
        } else {
            lo = z;
        }
        double slope = 0.0;  // E_mu psi'(a+Z) with psi' = p/(1+p)
        for (int x = 0; x < av.size(); ++x) {
            slope += space.weights()[x] * psi_prime_from_value(p[x]);
        }
        double next = z - g / slope;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (next == z) break;
        z = next;
        g = mass_at(z, p) - 1.0;
        if (std::abs(g) < best) {
            best = std::abs(g);
            stalled = 0;
        } else {
            ++stalled;
        }
    }
    if (std::abs(g) > tol::normalizer_residual) {
        throw NumericError("phi_inverse: normaliser solve stalled at residual " + std::to_string(g));
    }
    return PhiInverse{DensityVector(space, std::move(p)), z};
}

double dz_derivative(const MeasureSpace& space, const ChartPoint& a, const CenteredVector& u) {
    const Eigen::VectorXd& p = phi_inverse(space, a).density.values();
    const Eigen::ArrayXd w = p.array() / (1.0 + p.array());  // psi'(a + Z)
    const double denom = (space.weights().array() * w).sum();
    const double numer = (space.weights().array() * w * u.values().array()).sum();
    return -numer / denom;
}

double kl_divergence(const MeasureSpace& space, const DensityVector& q, const DensityVector& p) {
    const auto& qa = q.values().array();
    const auto& pa = p.values().array();
    return (space.weights().array() * (qa * (qa / pa).log() - qa + pa)).sum();
}

double fisher_inner(const MeasureSpace& space, const ChartPoint& at,
                    const TangentVector& u, const TangentVector& v) {
    if (!same_point(u.base, at) || !same_point(v.base, at)) {
        throw ContractError("fisher_inner: tangent vectors are not based at the evaluation point");
    }
    const Eigen::VectorXd& p = phi_inverse(space, at).density.values();
    const Eigen::ArrayXd psi_p = p.array() / (1.0 + p.array());
    const double denom = (space.weights().array() * psi_p).sum();
    const double du = -(space.weights().array() * psi_p * u.u.values().array()).sum() / denom;
    const double dv = -(space.weights().array() * psi_p * v.u.values().array()).sum() / denom;
    const Eigen::ArrayXd weight = p.array() / (1.0 + p.array()).square();
    return (space.weights().array() * weight * (u.u.values().array() + du) *
            (v.u.values().array() + dv))
        .sum();
}

Eigen::MatrixXd orthonormal_basis(const MeasureSpace& space, std::span<const int> state_order) {
    const int n = space.size();
    std::vector<int> order(state_order.begin(), state_order.end());
    if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
    }
    if (static_cast<int>(order.size()) != n) {
        throw InvalidInputError("orthonormal_basis: state_order must list every state once");
    }

    Eigen::MatrixXd basis(n, n - 1);
    for (int i = 0; i < n - 1; ++i) {
        Eigen::VectorXd seed = Eigen::VectorXd::Zero(n);
        seed[order[i]] = 1.0;
        Eigen::VectorXd v = center(space, seed).values();
        for (int pass = 0; pass < 2; ++pass) {  // MGS with re-orthogonalisation
            for (int j = 0; j < i; ++j) {
                v -= space.inner(basis.col(j), v) * basis.col(j);
            }
        }
        const double len = space.norm(v);
        if (len < 1e-14) throw NumericError("orthonormal_basis: degenerate seed system");
        basis.col(i) = v / len;
    }
    return basis;
}

Eigen::MatrixXd coordinate_metric(const MeasureSpace& space, const ChartPoint& at,
                                  const Eigen::MatrixXd& basis) {
    if (basis.rows() != space.size()) throw InvalidInputError("coordinate_metric: basis shape mismatch");
    const Eigen::VectorXd& p = phi_inverse(space, at).density.values();
    const Eigen::ArrayXd psi_p = p.array() / (1.0 + p.array());
    const double denom = (space.weights().array() * psi_p).sum();
    const Eigen::ArrayXd metric_w = space.weights().array() * p.array() / (1.0 + p.array()).square();

    const int k = static_cast<int>(basis.cols());
    Eigen::MatrixXd shifted(basis.rows(), k);
    for (int i = 0; i < k; ++i) {
        const double dz = -(space.weights().array() * psi_p * basis.col(i).array()).sum() / denom;
        shifted.col(i) = basis.col(i).array() + dz;
    }
    return shifted.transpose() * metric_w.matrix().asDiagonal() * shifted;
}

}  // namespace igf
