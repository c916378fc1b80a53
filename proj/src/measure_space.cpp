#include "igf/measure_space.hpp"

#include <cmath>
#include <string>

namespace igf {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite()) throw InvalidInputError(std::string(what) + ": non-finite entries");
}

}  // namespace

MeasureSpace::MeasureSpace(Eigen::VectorXd mu) : mu_(std::move(mu)) {
    if (mu_.size() < 1) throw InvalidInputError("MeasureSpace: empty state space");
    require_finite(mu_, "MeasureSpace");
    if ((mu_.array() <= 0.0).any()) throw InvalidInputError("MeasureSpace: weights must be strictly positive");
    const double mass = mu_.sum();
    if (std::abs(mass - 1.0) > tol::mu_mass) {
        throw InvalidInputError("MeasureSpace: weights sum to " + std::to_string(mass) + ", expected 1");
    }
}

MeasureSpace MeasureSpace::uniform(int n_states) {
    if (n_states < 1) throw InvalidInputError("MeasureSpace::uniform: n_states must be positive");
    return MeasureSpace(Eigen::VectorXd::Constant(n_states, 1.0 / n_states));
}

double MeasureSpace::integrate(const Eigen::VectorXd& f) const {
    if (f.size() != mu_.size()) throw InvalidInputError("integrate: dimension mismatch");
    return mu_.dot(f);
}

double MeasureSpace::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    if (u.size() != mu_.size() || v.size() != mu_.size()) {
        throw InvalidInputError("inner: dimension mismatch");
    }
    return (mu_.array() * u.array() * v.array()).sum();
}

double MeasureSpace::norm(const Eigen::VectorXd& u) const {
    return std::sqrt(inner(u, u));
}

DensityVector::DensityVector(const MeasureSpace& space, Eigen::VectorXd p) : p_(std::move(p)) {
    if (p_.size() != space.size()) throw InvalidInputError("DensityVector: dimension mismatch");
    require_finite(p_, "DensityVector");
    if ((p_.array() <= 0.0).any()) throw InvalidInputError("DensityVector: density must be strictly positive");
    const double mass = space.integrate(p_);
    if (std::abs(mass - 1.0) > tol::density_mass) {
        throw InvalidInputError("DensityVector: E_mu p = " + std::to_string(mass) + ", expected 1");
    }
}

CenteredVector::CenteredVector(const MeasureSpace& space, Eigen::VectorXd v) : v_(std::move(v)) {
    if (v_.size() != space.size()) throw InvalidInputError("CenteredVector: dimension mismatch");
    require_finite(v_, "CenteredVector");
    const double mean = space.integrate(v_);
    if (std::abs(mean) > tol::centering) {
        throw InvalidInputError("CenteredVector: E_mu v = " + std::to_string(mean) + ", expected 0");
    }
}

}  // namespace igf
