#ifndef OTTO_SPIN_SYSTEM_HPP
#define OTTO_SPIN_SYSTEM_HPP

// Two spins with anisotropic XY exchange in a transverse field:
//
//   H(B) = B (sz1 + sz2) + J [(1 + gamma) sx1 sx2 + (1 - gamma) sy1 sy2]
//
// Units: hbar = k_B = 1, energies in units of J.

#include "otto/error.hpp"
#include "otto/operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace otto {

/// All cycle parameters. Defaults follow the reference configuration
/// B1 = 1, B2 = 2, J = 1, T = 1.
struct EngineParams {
  double b1 = 1.0;
  double b2 = 2.0;
  double coupling = 1.0;
  double gamma = 1.0;
  double temperature = 1.0;
  double tau = 1.0;

  double beta() const { return 1.0 / temperature; }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(b1) || !finite(b2) || !finite(coupling) || !finite(gamma) || !finite(tau))
      throw Error(ErrorCode::InvalidParams, "engine parameters must be finite");
    if (b1 < 0.0 || b2 < 0.0) throw Error(ErrorCode::InvalidParams, "fields must be non-negative");
    if (coupling <= 0.0) throw Error(ErrorCode::InvalidParams, "coupling must be positive");
    if (gamma < -1.0 || gamma > 1.0) throw Error(ErrorCode::InvalidParams, "gamma must lie in [-1, 1]");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
      throw Error(ErrorCode::NonpositiveTemperature, "temperature must be positive and finite");
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidParams, "stroke duration must be positive");
  }
};

/// K = sqrt(B^2 + gamma^2 J^2), half the gap of the field-dependent pair.
inline double k_factor(double b, double j, double gamma) { return std::hypot(b, gamma * j); }

inline Operator hamiltonian(double b, double j, double gamma) {
  using namespace pauli;
  const Operator free = b * (on_spin1(z()) + on_spin2(z()));
  const Operator exchange = j * ((1.0 + gamma) * kron(x(), x()) + (1.0 - gamma) * kron(y(), y()));
  return free + exchange;
}

/// dH/dB: the operator multiplying the field.
inline Operator field_generator() { return on_spin1(pauli::z()) + on_spin2(pauli::z()); }

/// Eigenpairs labelled psi_0..psi_3 with energies -2K, -2J, 2J, 2K.
///
/// The labels are fixed by eigenvector identity, not by energy: when K < J
/// the energy order differs from the label order. `ascending()` gives the
/// energy-sorted view.
struct EigenSystem {
  std::array<double, 4> energies{};
  std::array<Ket, 4> vectors{};
  double k = 0.0;
  /// True when the gamma -> 0 product-state forms were used for psi_0, psi_3.
  bool product_branch = false;

  std::array<int, 4> ascending() const {
    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return energies[a] < energies[b]; });
    return order;
  }

  std::array<double, 4> sorted_energies() const {
    std::array<double, 4> e = energies;
    std::sort(e.begin(), e.end());
    return e;
  }

  Operator projector(int label) const { return outer(vectors[label], vectors[label]); }

  /// Reassembles sum_i E_i |psi_i><psi_i|.
  Operator reconstruct() const {
    Operator h = Operator::Zero();
    for (int i = 0; i < 4; ++i) h += energies[i] * projector(i);
    return h;
  }
};

namespace detail {

inline constexpr double kProductBranchThreshold = 1e-24;

/// Coefficients of psi_0 and psi_3 on (|00>, |11>), each scaled by sqrt(2).
/// Uses K - B = gamma^2 J^2 / (K + B) so that nothing cancels as gamma -> 0.
struct FieldPairCoefficients {
  double psi0_00, psi0_11, psi3_00, psi3_11;
  bool product_branch;
};

inline FieldPairCoefficients field_pair(double b, double j, double gamma) {
  const double gj = gamma * j;
  const double k = std::hypot(b, gj);
  const double s2 = std::sqrt(2.0);
  if (k == 0.0 || gj * gj < kProductBranchThreshold * k * k) {
    return {s2, 0.0, 0.0, s2, true};
  }
  const double k_minus_b = gj * gj / (k + b);
  const double big = std::sqrt((k + b) / k);
  const double small = std::sqrt(k_minus_b / k);
  const double sign = gj > 0.0 ? 1.0 : -1.0;
  return {big, -sign * small, small, sign * big, false};
}

}  // namespace detail

inline EigenSystem eigensystem(double b, double j, double gamma) {
  if (!std::isfinite(b) || !std::isfinite(j) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidParams, "eigensystem inputs must be finite");
  if (b < 0.0) throw Error(ErrorCode::InvalidParams, "field must be non-negative");
  if (b == 0.0 && j == 0.0)
    throw Error(ErrorCode::DegenerateSpectrum, "B = 0 and J = 0: every state is an eigenstate");

  const auto c = detail::field_pair(b, j, gamma);
  const double inv_s2 = 1.0 / std::sqrt(2.0);

  EigenSystem es;
  es.k = k_factor(b, j, gamma);
  es.product_branch = c.product_branch;
  es.energies = {-2.0 * es.k, -2.0 * j, 2.0 * j, 2.0 * es.k};

  Ket psi0 = Ket::Zero(), psi1 = Ket::Zero(), psi2 = Ket::Zero(), psi3 = Ket::Zero();
  psi0(0) = c.psi0_00 * inv_s2;
  psi0(3) = c.psi0_11 * inv_s2;
  psi1(1) = inv_s2;
  psi1(2) = -inv_s2;
  psi2(1) = inv_s2;
  psi2(2) = inv_s2;
  psi3(0) = c.psi3_00 * inv_s2;
  psi3(3) = c.psi3_11 * inv_s2;
  es.vectors = {psi0, psi1, psi2, psi3};
  return es;
}

/// Closed form 2 cosh(2K beta) + 2 cosh(2J beta).
inline double partition_function(double k, double j, double beta) {
  return 2.0 * std::cosh(2.0 * k * beta) + 2.0 * std::cosh(2.0 * j * beta);
}

struct ThermalState {
  Operator rho;
  double partition = 0.0;
  /// Gibbs weights in label order.
  std::array<double, 4> populations{};
};

inline ThermalState thermal_state(const EigenSystem& es, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error(ErrorCode::NonpositiveTemperature, "inverse temperature must be positive and finite");
  const double e_min = *std::min_element(es.energies.begin(), es.energies.end());
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) w[i] = std::exp(-beta * (es.energies[i] - e_min));
  const double norm = std::accumulate(w.begin(), w.end(), 0.0);

  ThermalState out;
  out.rho = Operator::Zero();
  for (int i = 0; i < 4; ++i) {
    out.populations[i] = w[i] / norm;
    out.rho += out.populations[i] * es.projector(i);
  }
  out.partition = norm * std::exp(-beta * e_min);
  return out;
}

inline ThermalState thermal_state(double b, double j, double gamma, double beta) {
  return thermal_state(eigensystem(b, j, gamma), beta);
}

/// Zero-temperature preparation; requires a unique lowest level.
inline Operator ground_state(double b, double j, double gamma) {
  const EigenSystem es = eigensystem(b, j, gamma);
  const auto order = es.ascending();
  if (es.energies[order[1]] - es.energies[order[0]] < 1e-12)
    throw Error(ErrorCode::DegenerateSpectrum, "ground level is degenerate");
  return es.projector(order[0]);
}

/// Bell kets psi+- = (|00> +- |11>)/sqrt2, phi+- = (|01> +- |10>)/sqrt2.
struct MeasurementBasis {
  Ket psi_plus, psi_minus, phi_plus, phi_minus;

  std::array<Ket, 4> kets() const { return {psi_plus, psi_minus, phi_plus, phi_minus}; }
  Operator projector(int alpha) const {
    const auto k = kets();
    return outer(k[alpha], k[alpha]);
  }
};

inline MeasurementBasis measurement_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  MeasurementBasis m;
  m.psi_plus = (basis_ket(0) + basis_ket(3)) * s;
  m.psi_minus = (basis_ket(0) - basis_ket(3)) * s;
  m.phi_plus = (basis_ket(1) + basis_ket(2)) * s;
  m.phi_minus = (basis_ket(1) - basis_ket(2)) * s;
  return m;
}

}  // namespace otto

#endif  // OTTO_SPIN_SYSTEM_HPP
