#ifndef OTTO_OPERATOR_HPP
#define OTTO_OPERATOR_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace otto {

using Complex = std::complex<double>;

// Two-spin operators live in the product basis |s1 s2>, index 2*s1 + s2,
// so the ordering is |00>, |01>, |10>, |11>.
using Operator = Eigen::Matrix4cd;
using Ket = Eigen::Vector4cd;

inline constexpr Complex kI{0.0, 1.0};

namespace pauli {

// |0> is the sigma_z = -1 state: the product state |00> carries field energy -2B.
inline Eigen::Matrix2cd x() {
  Eigen::Matrix2cd m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Eigen::Matrix2cd y() {
  Eigen::Matrix2cd m;
  m << 0.0, kI, -kI, 0.0;
  return m;
}

inline Eigen::Matrix2cd z() {
  Eigen::Matrix2cd m;
  m << -1.0, 0.0, 0.0, 1.0;
  return m;
}

}  // namespace pauli

inline Operator kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Operator out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline Operator on_spin1(const Eigen::Matrix2cd& a) { return kron(a, Eigen::Matrix2cd::Identity()); }
inline Operator on_spin2(const Eigen::Matrix2cd& a) { return kron(Eigen::Matrix2cd::Identity(), a); }

inline Ket basis_ket(int index) {
  Ket k = Ket::Zero();
  k(index) = 1.0;
  return k;
}

inline Operator outer(const Ket& a, const Ket& b) { return a * b.adjoint(); }

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

/// Largest entry modulus.
template <typename Derived>
double max_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

inline double expectation(const Operator& rho, const Operator& observable) {
  return (rho * observable).trace().real();
}

inline double unitarity_residual(const Operator& u) {
  return max_norm(u.adjoint() * u - Operator::Identity());
}

inline double hermiticity_residual(const Operator& m) { return max_norm(m - m.adjoint()); }

/// Smallest eigenvalue of the Hermitian part.
inline double min_eigenvalue(const Operator& m) {
  const Operator h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

struct DensityCheck {
  double trace_error = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;

  bool within(double trace_tol, double herm_tol, double eig_floor) const {
    return trace_error <= trace_tol && hermiticity <= herm_tol && min_eigenvalue >= eig_floor;
  }
};

inline DensityCheck check_density(const Operator& rho) {
  return {std::abs(rho.trace() - Complex(1.0, 0.0)), hermiticity_residual(rho), min_eigenvalue(rho)};
}

}  // namespace otto

#endif  // OTTO_OPERATOR_HPP
