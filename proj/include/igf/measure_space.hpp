#ifndef IGF_MEASURE_SPACE_HPP
#define IGF_MEASURE_SPACE_HPP

#include <Eigen/Dense>

#include "igf/errors.hpp"
#include "igf/tolerances.hpp"

namespace igf {

/// Finite base space with a strictly positive reference probability measure.
/// All densities, centred vectors and inner products below are taken with
/// respect to these weights.
class MeasureSpace {
public:
    explicit MeasureSpace(Eigen::VectorXd mu);

    static MeasureSpace uniform(int n_states);

    int size() const { return static_cast<int>(mu_.size()); }
    const Eigen::VectorXd& weights() const { return mu_; }

    /// E_mu f.
    double integrate(const Eigen::VectorXd& f) const;
    /// <u, v>_H = E_mu[u v].
    double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    double norm(const Eigen::VectorXd& u) const;

private:
    Eigen::VectorXd mu_;
};

/// Strictly positive density p with E_mu p = 1.
class DensityVector {
public:
    DensityVector(const MeasureSpace& space, Eigen::VectorXd p);

    const Eigen::VectorXd& values() const { return p_; }
    int size() const { return static_cast<int>(p_.size()); }

private:
    Eigen::VectorXd p_;
};

/// Element of H: mean-zero under the reference weights.
class CenteredVector {
public:
    CenteredVector(const MeasureSpace& space, Eigen::VectorXd v);

    const Eigen::VectorXd& values() const { return v_; }
    int size() const { return static_cast<int>(v_.size()); }

private:
    Eigen::VectorXd v_;
};

}  // namespace igf

#endif
