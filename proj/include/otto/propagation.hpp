#ifndef OTTO_PROPAGATION_HPP
#define OTTO_PROPAGATION_HPP

// Time-ordered propagators for the linear field ramps and the transition
// probabilities built from them.

#include "otto/error.hpp"
#include "otto/operator.hpp"
#include "otto/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace otto {

enum class RampDirection { Expansion, Compression };

/// Linear ramp between b1 and b2. Expansion runs b1 -> b2; compression runs
/// the same ramp backwards in time, B(duration - t).
struct RampProfile {
  double b1 = 1.0;
  double b2 = 2.0;
  double duration = 1.0;
  RampDirection direction = RampDirection::Expansion;

  static RampProfile expansion(double b1, double b2, double duration) {
    return {b1, b2, duration, RampDirection::Expansion};
  }
  static RampProfile compression(double b1, double b2, double duration) {
    return {b1, b2, duration, RampDirection::Compression};
  }
  /// Constant field for the given duration.
  static RampProfile hold(double b, double duration) { return {b, b, duration, RampDirection::Expansion}; }

  double b_start() const { return direction == RampDirection::Expansion ? b1 : b2; }
  double b_end() const { return direction == RampDirection::Expansion ? b2 : b1; }

  /// dB/dt, constant along the ramp.
  double slope() const { return (b_end() - b_start()) / duration; }

  /// No range check; callers inside the integrators stay within [0, duration].
  double field_at(double t) const {
    const double s = direction == RampDirection::Expansion ? t : duration - t;
    return b1 + (b2 - b1) * (s / duration);
  }
};

inline double ramp_field(double t, const RampProfile& profile) {
  if (!(t >= 0.0 && t <= profile.duration))
    throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside the ramp");
  if (t == 0.0) return profile.b_start();
  if (t == profile.duration) return profile.b_end();
  return profile.field_at(t);
}

inline RampProfile stroke_profile(const EngineParams& p, RampDirection direction) {
  return {p.b1, p.b2, p.tau, direction};
}

namespace detail {

// The Hamiltonian is block diagonal: the field acts only on span{|00>, |11>},
// where H = -2B Z + 2 gamma J X (Z = diag(1, -1) on that pair), while
// span{|01>, |10>} carries the constant 2J X. Each midpoint exponential on the
// field block is an SU(2) element [[a, -conj(b)], [b, conj(a)]], stored as (a, b).
struct Su2 {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};

  Su2 operator*(const Su2& r) const { return {a * r.a - std::conj(b) * r.b, b * r.a + std::conj(a) * r.b}; }

  void renormalize() {
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    a /= n;
    b /= n;
  }
};

/// exp(-i dt (z Z + x X)).
inline Su2 su2_exp(double z, double x, double dt) {
  const double r = std::hypot(z, x);
  if (r == 0.0) return {};
  const double c = std::cos(r * dt);
  const double s = std::sin(r * dt) / r;
  return {Complex(c, -s * z), Complex(0.0, -s * x)};
}

inline Operator assemble(const Su2& field_block, double exchange_phase) {
  Operator u = Operator::Zero();
  u(0, 0) = field_block.a;
  u(0, 3) = -std::conj(field_block.b);
  u(3, 0) = field_block.b;
  u(3, 3) = std::conj(field_block.a);
  const double c = std::cos(exchange_phase);
  const double s = std::sin(exchange_phase);
  u(1, 1) = c;
  u(2, 2) = c;
  u(1, 2) = Complex(0.0, -s);
  u(2, 1) = Complex(0.0, -s);
  return u;
}

}  // namespace detail

/// Product of `n_steps` exact exponentials of the Hamiltonian sampled at the
/// midpoint of each sub-interval (second-order Magnus).
inline Operator time_ordered_product(const RampProfile& profile, double j, double gamma, std::int64_t n_steps) {
  if (n_steps < 1) throw Error(ErrorCode::InvalidParams, "n_steps must be >= 1");
  if (!(profile.duration >= 0.0)) throw Error(ErrorCode::InvalidParams, "duration must be non-negative");
  const double dt = profile.duration / static_cast<double>(n_steps);
  const double x = 2.0 * gamma * j;
  detail::Su2 u;
  for (std::int64_t i = 0; i < n_steps; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * dt;
    const double b = profile.field_at(t);
    u = detail::su2_exp(-2.0 * b, x, dt) * u;
  }
  u.renormalize();
  return detail::assemble(u, 2.0 * j * profile.duration);
}

struct PropagatorOptions {
  std::int64_t n_steps = 256;
  /// Entrywise agreement required between n and 2n steps.
  double tolerance = 1e-9;
  std::int64_t max_steps = std::int64_t{1} << 24;
};

struct Propagation {
  Operator u;
  std::int64_t n_steps = 0;
  /// Max entry change at the last doubling.
  double change = 0.0;
};

/// Doubles the step count until two successive products agree.
inline Propagation propagate(const RampProfile& profile, double j, double gamma, const PropagatorOptions& opt = {}) {
  if (opt.n_steps < 1) throw Error(ErrorCode::InvalidParams, "n_steps must be >= 1");
  std::int64_t n = opt.n_steps;
  Operator prev = time_ordered_product(profile, j, gamma, n);
  for (;;) {
    if (2 * n > opt.max_steps)
      throw Error(ErrorCode::NotConverged, "propagator did not converge within " + std::to_string(opt.max_steps) +
                                               " steps (duration " + std::to_string(profile.duration) + ")");
    Operator cur = time_ordered_product(profile, j, gamma, 2 * n);
    const double change = max_norm(cur - prev);
    n *= 2;
    if (change < opt.tolerance) return {cur, n, change};
    prev = cur;
  }
}

inline Operator propagator(const EngineParams& params, RampDirection direction, const PropagatorOptions& opt = {}) {
  return propagate(stroke_profile(params, direction), params.coupling, params.gamma, opt).u;
}

inline Operator propagator(const EngineParams& params, RampDirection direction, std::int64_t n_steps) {
  PropagatorOptions opt;
  opt.n_steps = n_steps;
  return propagator(params, direction, opt);
}

/// xi: psi_3 -> psi_0 across the expansion; delta: psi_0 -> psi+ across the
/// expansion; chi: static psi_0(B2) / psi+ overlap; lam: psi- -> psi_3 across
/// the compression.
struct TransitionProbs {
  double xi = 0.0;
  double delta = 0.0;
  double chi = 0.0;
  double lam = 0.0;
};

namespace detail {

inline double amp2(const Ket& bra, const Operator& op, const Ket& ket) { return std::norm(bra.dot(op * ket)); }
inline double amp2(const Ket& bra, const Ket& ket) { return std::norm(bra.dot(ket)); }

}  // namespace detail

inline TransitionProbs transition_probabilities(const EngineParams& params, const Operator& u, const Operator& v) {
  const EigenSystem e1 = eigensystem(params.b1, params.coupling, params.gamma);
  const EigenSystem e2 = eigensystem(params.b2, params.coupling, params.gamma);
  const MeasurementBasis m = measurement_basis();
  TransitionProbs p;
  p.xi = detail::amp2(e2.vectors[0], u, e1.vectors[3]);
  p.delta = detail::amp2(m.psi_plus, u, e1.vectors[0]);
  p.chi = detail::amp2(e2.vectors[0], m.psi_plus);
  p.lam = detail::amp2(e1.vectors[3], v, m.psi_minus);
  return p;
}

enum class Limit { Sudden, Adiabatic };

inline TransitionProbs limit_probabilities(const EngineParams& params, Limit limit) {
  if (limit == Limit::Sudden) {
    const Operator id = Operator::Identity();
    return transition_probabilities(params, id, id);
  }
  const double k2 = k_factor(params.b2, params.coupling, params.gamma);
  const double overlap = k2 > 0.0 ? 0.5 - params.gamma * params.coupling / (2.0 * k2) : 0.5;
  return {0.0, overlap, overlap, overlap};
}

/// Residuals of the probability identities that make the closed-form cycle
/// energies exact.
struct MicroreversibilityReport {
  double eigen_swap = 0.0;         // |<0_2|U|3_1>|^2 vs |<3_2|U|0_1>|^2
  double bell_swap_forward = 0.0;  // |<+|U|0_1>|^2 vs |<-|U|3_1>|^2
  double bell_swap_backward = 0.0; // |<0_1|V|+>|^2 vs |<3_1|V|->|^2
  double conservation = 0.0;       // |<0_2|U|3_1>|^2 + |<3_2|U|3_1>|^2 - 1
  double decoupled = 0.0;          // max |<1|U|0_1>|, |<2|U|0_1>|
  double delta_lambda = 0.0;

  double max() const {
    return std::max({eigen_swap, bell_swap_forward, bell_swap_backward, conservation, decoupled, delta_lambda});
  }
};

inline MicroreversibilityReport microreversibility(const EngineParams& params, const Operator& u, const Operator& v) {
  using detail::amp2;
  const EigenSystem e1 = eigensystem(params.b1, params.coupling, params.gamma);
  const EigenSystem e2 = eigensystem(params.b2, params.coupling, params.gamma);
  const MeasurementBasis m = measurement_basis();
  const auto& a = e1.vectors;
  const auto& b = e2.vectors;

  MicroreversibilityReport r;
  r.eigen_swap = std::abs(amp2(b[0], u, a[3]) - amp2(b[3], u, a[0]));
  r.bell_swap_forward = std::abs(amp2(m.psi_plus, u, a[0]) - amp2(m.psi_minus, u, a[3]));
  r.bell_swap_backward = std::abs(amp2(a[0], v, m.psi_plus) - amp2(a[3], v, m.psi_minus));
  r.conservation = std::abs(amp2(b[0], u, a[3]) + amp2(b[3], u, a[3]) - 1.0);
  r.decoupled = std::max(std::abs(b[1].dot(u * a[0])), std::abs(b[2].dot(u * a[0])));
  const TransitionProbs p = transition_probabilities(params, u, v);
  r.delta_lambda = std::abs(p.delta - p.lam);
  return r;
}

}  // namespace otto

#endif  // OTTO_PROPAGATION_HPP
