#ifndef OTTO_OTTO_CYCLE_HPP
#define OTTO_OTTO_CYCLE_HPP

// The measurement-fuelled four-stroke cycle:
//   A -> B  unitary expansion U (B1 -> B2)
//   B -> C  non-selective Bell-basis measurement
//   C -> D  unitary compression V (B2 -> B1)
//   D -> A  full re-thermalization at B1
// Work and heat are energy changes of the working system, so an engine has
// W < 0 and Q_M > 0.

#include "otto/error.hpp"
#include "otto/operator.hpp"
#include "otto/propagation.hpp"
#include "otto/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace otto {

/// Mean energies at the four cycle vertices.
struct CycleEnergies {
  double e_a = 0.0;
  double e_b = 0.0;
  double e_c = 0.0;
  double e_d = 0.0;
};

struct CycleResult {
  double w1 = 0.0;
  double w2 = 0.0;
  double w_total = 0.0;
  double q_m = 0.0;
  double q_l = 0.0;
  /// |W| / Q_M, present only when is_engine.
  std::optional<double> efficiency;
  bool is_engine = false;

  double first_law_residual() const { return std::abs(w_total + q_m + q_l); }
};

struct Cycle {
  CycleResult result;
  CycleEnergies energies;
};

inline CycleResult finalize(double w1, double w2, double q_m, double q_l) {
  CycleResult r;
  r.w1 = w1;
  r.w2 = w2;
  r.w_total = w1 + w2;
  r.q_m = q_m;
  r.q_l = q_l;
  r.is_engine = r.w_total < 0.0 && r.q_m > 0.0;
  if (r.is_engine) r.efficiency = std::abs(r.w_total) / r.q_m;
  return r;
}

inline CycleResult result_from_energies(const CycleEnergies& e) {
  return finalize(e.e_b - e.e_a, e.e_d - e.e_c, e.e_c - e.e_b, e.e_a - e.e_d);
}

/// rho -> sum_alpha M_alpha rho M_alpha over the Bell projectors.
inline Operator measurement_channel(const Operator& rho) {
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-8)
    throw Error(ErrorCode::InvalidState, "measurement input must have unit trace");
  const MeasurementBasis m = measurement_basis();
  Operator out = Operator::Zero();
  for (int alpha = 0; alpha < 4; ++alpha) {
    const Operator p = m.projector(alpha);
    out += p * rho * p;
  }
  return out;
}

struct CycleStates {
  Operator rho_a, rho_b, rho_c, rho_d;
  Operator u, v;
  Operator h1, h2;

  CycleEnergies energies() const {
    return {expectation(rho_a, h1), expectation(rho_b, h2), expectation(rho_c, h2), expectation(rho_d, h1)};
  }
};

/// Runs the three explicit strokes from an arbitrary state at A.
inline CycleStates cycle_states(const EngineParams& params, const Operator& rho_a,
                                const PropagatorOptions& opt = {}) {
  params.validate();
  CycleStates s;
  s.h1 = hamiltonian(params.b1, params.coupling, params.gamma);
  s.h2 = hamiltonian(params.b2, params.coupling, params.gamma);
  s.u = propagator(params, RampDirection::Expansion, opt);
  s.v = propagator(params, RampDirection::Compression, opt);
  s.rho_a = rho_a;
  s.rho_b = s.u * rho_a * s.u.adjoint();
  s.rho_c = measurement_channel(s.rho_b);
  s.rho_d = s.v * s.rho_c * s.v.adjoint();
  return s;
}

inline CycleStates cycle_states(const EngineParams& params, const PropagatorOptions& opt = {}) {
  params.validate();
  const Operator rho_a = thermal_state(params.b1, params.coupling, params.gamma, params.beta()).rho;
  return cycle_states(params, rho_a, opt);
}

inline Cycle run_cycle(const EngineParams& params, const PropagatorOptions& opt = {}) {
  const CycleStates s = cycle_states(params, opt);
  const CycleEnergies e = s.energies();
  return {result_from_energies(e), e};
}

inline Cycle run_cycle(const EngineParams& params, std::int64_t n_steps) {
  PropagatorOptions opt;
  opt.n_steps = n_steps;
  return run_cycle(params, opt);
}

namespace detail {

/// sinh(2 K beta) / Z and sinh(2 J beta) / Z without overflow at large beta.
struct GibbsRatios {
  double field_pair;
  double exchange_pair;
};

inline GibbsRatios gibbs_ratios(double k, double j, double beta) {
  const double x = 2.0 * k * beta;
  const double y = 2.0 * std::abs(j) * beta;
  const double m = std::max(x, y);
  const double z = std::exp(x - m) + std::exp(-x - m) + std::exp(y - m) + std::exp(-y - m);
  const double sx = 0.5 * (std::exp(x - m) - std::exp(-x - m));
  const double sy = std::copysign(0.5 * (std::exp(y - m) - std::exp(-y - m)), j);
  return {sx / z, sy / z};
}

}  // namespace detail

/// Vertex energies and cycle quantities in closed form from the four
/// transition probabilities.
inline Cycle cycle_from_probs(const EngineParams& params, const TransitionProbs& p) {
  params.validate();
  const double j = params.coupling;
  const double k1 = k_factor(params.b1, j, params.gamma);
  const double k2 = k_factor(params.b2, j, params.gamma);
  const auto g = detail::gibbs_ratios(k1, j, params.beta());

  const double heat_bracket = (1.0 - 2.0 * p.xi) - (1.0 - 2.0 * p.delta) * (1.0 - 2.0 * p.chi);
  if (std::abs(k2 * heat_bracket) < 1e-14)
    throw Error(ErrorCode::ZeroHeat, "measurement heat vanishes; efficiency undefined");

  const double exchange = -4.0 * j * g.exchange_pair;
  CycleEnergies e;
  e.e_a = -4.0 * k1 * g.field_pair + exchange;
  e.e_b = -4.0 * k2 * (1.0 - 2.0 * p.xi) * g.field_pair + exchange;
  e.e_c = -4.0 * k2 * (1.0 - 2.0 * p.delta) * (1.0 - 2.0 * p.chi) * g.field_pair + exchange;
  e.e_d = -4.0 * k1 * (1.0 - 2.0 * p.delta) * (1.0 - 2.0 * p.lam) * g.field_pair + exchange;
  return {result_from_energies(e), e};
}

/// Quasistatic or sudden cycle in closed form.
inline CycleResult limit_cycle(const EngineParams& params, Limit limit) {
  params.validate();
  const double j = params.coupling;
  const double k1 = k_factor(params.b1, j, params.gamma);
  const double k2 = k_factor(params.b2, j, params.gamma);
  const double s = detail::gibbs_ratios(k1, j, params.beta()).field_pair;

  double w1 = 0.0, w2 = 0.0, q_m = 0.0;
  if (limit == Limit::Adiabatic) {
    const double chi = k2 > 0.0 ? 0.5 - params.gamma * j / (2.0 * k2) : 0.5;
    const double c = 1.0 - 2.0 * chi;
    w1 = 4.0 * (k1 - k2) * s;
    w2 = 4.0 * (k2 - k1) * c * c * s;
    q_m = 16.0 * k2 * chi * (1.0 - chi) * s;
  } else if (k1 > 0.0) {
    w1 = -4.0 * params.b1 * (params.b2 - params.b1) / k1 * s;
    q_m = 4.0 * params.b1 * params.b2 / k1 * s;
  }
  return finalize(w1, w2, q_m, -(w1 + w2 + q_m));
}

}  // namespace otto

#endif  // OTTO_OTTO_CYCLE_HPP
