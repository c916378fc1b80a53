#ifndef IGF_TOLERANCES_HPP
#define IGF_TOLERANCES_HPP

namespace igf::tol {

// All fixed tolerances live here; nothing is tuned at call sites.

inline constexpr double mu_mass = 1e-12;          // |sum mu - 1|
inline constexpr double density_mass = 1e-10;     // |E_mu p - 1|
inline constexpr double centering = 1e-12;        // |E_mu v| for elements of H
inline constexpr double psi_residual = 1e-12;     // |psi(w) + log psi(w) - w|
inline constexpr double normalizer_residual = 1e-12;  // |E_mu psi(a+Z) - 1|
inline constexpr double chart_roundtrip = 1e-8;   // sup-norm of phi^-1 o phi - id
inline constexpr double span_residual = 1e-8;     // hypothesis checks for fields
inline constexpr double identity_check = 1e-10;   // bi-orthogonality and friends
inline constexpr double generator_column_sum = 1e-12;
inline constexpr double filter_floor = 1e-300;    // collapse threshold pre-renormalisation
inline constexpr double ci_table = 1e-12;         // conditional-independence slack
inline constexpr double quadrature_rel = 1e-9;    // channel-oracle quadrature
inline constexpr double boundary_mass = 1e-8;     // grid filter domain check

}  // namespace igf::tol

#endif
