#ifndef OTTO_OPEN_SYSTEM_HPP
#define OTTO_OPEN_SYSTEM_HPP

// Always-on bath: the first spin couples to an Ohmic bath through sx, giving
// the time-dependent master equation
//
//   drho/dt = i[rho, H(t)] + sum_i Gamma_i (n_i + 1) D[X_i] rho + Gamma_i n_i D[X_i^+] rho
//
// with jump operators X_i built in the instantaneous eigenbasis of H(B(t)).

#include "otto/error.hpp"
#include "otto/operator.hpp"
#include "otto/otto_cycle.hpp"
#include "otto/propagation.hpp"
#include "otto/spin_system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace otto {

struct BathConfig {
  double temperature = 1.0;
  /// Spectral cutoff omega_c.
  double cutoff = 1000.0;
  double rate_prefactor = 0.1;
  bool enabled = true;

  void validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
      throw Error(ErrorCode::NonpositiveTemperature, "bath temperature must be positive and finite");
    if (!(cutoff > 0.0)) throw Error(ErrorCode::InvalidParams, "bath cutoff must be positive");
    if (!(rate_prefactor >= 0.0) || !std::isfinite(rate_prefactor))
      throw Error(ErrorCode::InvalidParams, "rate prefactor must be non-negative");
  }
};

inline double bose_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidFrequency, "Bose occupation needs omega > 0");
  if (!(temperature > 0.0)) throw Error(ErrorCode::NonpositiveTemperature, "temperature must be positive");
  return 1.0 / std::expm1(omega / temperature);
}

/// Ohmic rate prefactor * omega * exp(-omega / omega_c).
inline double dissipation_rate(double omega, const BathConfig& bath) {
  return bath.rate_prefactor * omega * std::exp(-omega / bath.cutoff);
}

/// Downward (emission) and upward (absorption) rates for a transition of
/// frequency omega >= 0. At omega -> 0 both tend to prefactor * T.
struct TransitionRates {
  double emission = 0.0;
  double absorption = 0.0;
};

inline TransitionRates thermal_rates(double omega, const BathConfig& bath) {
  const double damping = bath.rate_prefactor * std::exp(-omega / bath.cutoff);
  const double x = omega / bath.temperature;
  // omega * n(omega), continuous through omega = 0
  const double omega_n = x == 0.0 ? bath.temperature : omega / std::expm1(x);
  return {damping * (omega_n + omega), damping * omega_n};
}

struct JumpOperator {
  Operator op;
  /// Bohr frequency: [H, X] = -omega X.
  double omega = 0.0;
};

struct JumpOperators {
  std::array<JumpOperator, 2> jumps;
  /// Set when omega_2 = 2K - 2J <= 0 (K <= J); X_2 then lowers nothing.
  bool nonpositive_frequency = false;
};

/// X_1 (omega_1 = 2K + 2J) and X_2 (omega_2 = 2K - 2J): the Bohr-frequency
/// components of sx on spin 1.
inline JumpOperators jump_operators(const EigenSystem& es, double j) {
  // Coefficients of psi_0, psi_3 on |00>, |11>, scaled by sqrt2.
  const double s2 = std::sqrt(2.0);
  const double p0 = es.vectors[0](0).real() * s2, q0 = es.vectors[0](3).real() * s2;
  const double p3 = es.vectors[3](0).real() * s2, q3 = es.vectors[3](3).real() * s2;
  const auto& v = es.vectors;

  JumpOperators out;
  out.jumps[0].op = 0.5 * ((q3 - p3) * outer(v[1], v[3]) + (p0 + q0) * outer(v[0], v[2]));
  out.jumps[0].omega = 2.0 * es.k + 2.0 * j;
  out.jumps[1].op = 0.5 * ((q3 + p3) * outer(v[2], v[3]) + (q0 - p0) * outer(v[0], v[1]));
  out.jumps[1].omega = 2.0 * es.k - 2.0 * j;
  out.nonpositive_frequency = out.jumps[1].omega <= 0.0;
  return out;
}

inline JumpOperators jump_operators(double b, double j, double gamma) {
  return jump_operators(eigensystem(b, j, gamma), j);
}

/// L rho L^+ - {L^+ L, rho}/2.
inline Operator dissipator(const Operator& l, const Operator& rho) {
  const Operator ldl = l.adjoint() * l;
  return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

namespace detail {

inline Operator generator(const Operator& rho, double b, double j, double gamma, const BathConfig& bath) {
  const EigenSystem es = eigensystem(b, j, gamma);
  const Operator h = es.reconstruct();
  Operator out = kI * (rho * h - h * rho);
  if (!bath.enabled || bath.rate_prefactor == 0.0) return out;
  for (const JumpOperator& jump : jump_operators(es, j).jumps) {
    // A negative Bohr frequency means X^+ is the lowering operator.
    const bool flipped = jump.omega < 0.0;
    const Operator lower = flipped ? Operator(jump.op.adjoint()) : jump.op;
    const TransitionRates r = thermal_rates(std::abs(jump.omega), bath);
    out += r.emission * dissipator(lower, rho) + r.absorption * dissipator(lower.adjoint(), rho);
  }
  return out;
}

}  // namespace detail

inline Operator lindblad_rhs(const Operator& rho, double t, const RampProfile& profile, double j, double gamma,
                             const BathConfig& bath) {
  return detail::generator(rho, ramp_field(t, profile), j, gamma, bath);
}

struct TrajectorySample {
  double t = 0.0;
  double field = 0.0;
  Operator rho;
  Operator hamiltonian;
  /// drho/dt from the generator at this sample.
  Operator rho_rate;
  /// dH/dt along the ramp.
  Operator hamiltonian_rate;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double smallest_step = 0.0;
  double largest_step = 0.0;

  const TrajectorySample& back() const { return samples.back(); }
  const Operator& final_state() const { return samples.back().rho; }
};

struct EvolveOptions {
  /// Absolute per-step error bound for the step-doubling controller.
  double tol = 1e-8;
  double min_step = 1e-12;
  /// Upper step clamp; 0 selects duration / 16.
  double max_step = 0.0;
  /// Additional cap on sample spacing so trapezoidal integrals over the
  /// stored samples stay accurate; 0 disables it.
  double sample_spacing = 2e-3;
  double initial_step = 1e-3;
  double safety = 0.9;
};

namespace detail {

struct Rk4Stepper {
  const RampProfile& profile;
  double j, gamma;
  const BathConfig& bath;

  Operator rate(double t, const Operator& rho) const {
    return generator(rho, profile.field_at(std::clamp(t, 0.0, profile.duration)), j, gamma, bath);
  }

  Operator step(double t, const Operator& rho, const Operator& k1, double h) const {
    const Operator k2 = rate(t + 0.5 * h, rho + 0.5 * h * k1);
    const Operator k3 = rate(t + 0.5 * h, rho + 0.5 * h * k2);
    const Operator k4 = rate(t + h, rho + h * k3);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

using SampleObserver = std::function<bool(const TrajectorySample&)>;

inline Trajectory integrate(const Operator& rho0, const RampProfile& profile, double j, double gamma,
                            const BathConfig& bath, const EvolveOptions& opt, const SampleObserver& stop = {}) {
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidParams, "tolerance must be positive");
  if (!(profile.duration >= 0.0)) throw Error(ErrorCode::InvalidParams, "duration must be non-negative");
  if (std::abs(rho0.trace() - Complex(1.0, 0.0)) > 1e-8)
    throw Error(ErrorCode::InvalidState, "initial state must have unit trace");
  bath.validate();

  const Rk4Stepper stepper{profile, j, gamma, bath};
  const Operator dh = profile.slope() * field_generator();
  double max_step = opt.max_step > 0.0 ? opt.max_step : profile.duration / 16.0;
  if (opt.sample_spacing > 0.0) max_step = std::min(max_step, opt.sample_spacing);

  Trajectory traj;
  auto record = [&](double t, const Operator& rho, const Operator& rate) {
    const double b = profile.field_at(std::clamp(t, 0.0, profile.duration));
    traj.samples.push_back({t, b, rho, hamiltonian(b, j, gamma), rate, dh});
    return stop && stop(traj.samples.back());
  };

  double t = 0.0;
  Operator rho = rho0;
  Operator k1 = stepper.rate(t, rho);
  if (record(t, rho, k1) || profile.duration == 0.0) return traj;

  double h = std::min(opt.initial_step, max_step);
  traj.smallest_step = profile.duration;
  while (t < profile.duration) {
    const double remaining = profile.duration - t;
    const bool last = h >= remaining;
    const double step = last ? remaining : h;

    const Operator full = stepper.step(t, rho, k1, step);
    const Operator mid = stepper.step(t, rho, k1, 0.5 * step);
    const Operator half = stepper.step(t + 0.5 * step, mid, stepper.rate(t + 0.5 * step, mid), 0.5 * step);
    const double err = max_norm(half - full) / 15.0;

    if (err <= opt.tol || step <= opt.min_step) {
      if (err > opt.tol)
        throw Error(ErrorCode::StepUnderflow, "step controller hit the minimum step at t = " + std::to_string(t));
      t = last ? profile.duration : t + step;
      rho = 0.5 * (half + half.adjoint());
      k1 = stepper.rate(t, rho);
      ++traj.accepted_steps;
      traj.smallest_step = std::min(traj.smallest_step, step);
      traj.largest_step = std::max(traj.largest_step, step);
      if (record(t, rho, k1)) return traj;
    } else {
      ++traj.rejected_steps;
    }
    const double factor = err > 0.0 ? opt.safety * std::pow(opt.tol / err, 0.2) : 5.0;
    h = std::min(step * std::clamp(factor, 0.2, 5.0), max_step);
    if (h < opt.min_step) {
      if (profile.duration - t <= opt.min_step) h = opt.min_step;
      else throw Error(ErrorCode::StepUnderflow, "step size fell below the minimum at t = " + std::to_string(t));
    }
  }
  return traj;
}

}  // namespace detail

/// Adaptive RK4 with step-doubling error control; stores every accepted step.
inline Trajectory evolve_open(const Operator& rho0, const RampProfile& profile, double j, double gamma,
                              const BathConfig& bath, const EvolveOptions& opt = {}) {
  return detail::integrate(rho0, profile, j, gamma, bath, opt);
}

struct StrokeEnergetics {
  /// Trapezoidal integral of Tr(rho dH/dt).
  double work = 0.0;
  /// Trapezoidal integral of Tr(drho/dt H).
  double heat = 0.0;
  double delta_e = 0.0;

  double first_law_residual() const { return std::abs(delta_e - work - heat); }
};

inline StrokeEnergetics stroke_energetics(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 2) throw Error(ErrorCode::InvalidParams, "energetics need at least two samples");
  StrokeEnergetics out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double dt = s[i].t - s[i - 1].t;
    out.work += 0.5 * dt * (expectation(s[i - 1].rho, s[i - 1].hamiltonian_rate) + expectation(s[i].rho, s[i].hamiltonian_rate));
    out.heat += 0.5 * dt * (expectation(s[i - 1].rho_rate, s[i - 1].hamiltonian) + expectation(s[i].rho_rate, s[i].hamiltonian));
  }
  out.delta_e = expectation(s.back().rho, s.back().hamiltonian) - expectation(s.front().rho, s.front().hamiltonian);
  return out;
}

/// D(rho, sigma) = Tr|rho - sigma| / 2.
inline double trace_distance(const Operator& rho, const Operator& sigma) {
  const Operator diff = rho - sigma;
  Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

struct OpenCycle {
  /// q_l collects all heat exchanged with the bath: during both ramps and
  /// during the final re-thermalization.
  CycleResult result;
  CycleEnergies energies;
  StrokeEnergetics expansion;
  StrokeEnergetics compression;
  Operator rho_d;
};

inline OpenCycle open_cycle(const EngineParams& params, const BathConfig& bath, const EvolveOptions& opt = {}) {
  params.validate();
  bath.validate();
  const double j = params.coupling;
  const Operator rho_a = thermal_state(params.b1, j, params.gamma, params.beta()).rho;

  const Trajectory ab = evolve_open(rho_a, stroke_profile(params, RampDirection::Expansion), j, params.gamma, bath, opt);
  const Operator rho_b = ab.final_state();
  const Operator rho_c = measurement_channel(rho_b);
  const Trajectory cd = evolve_open(rho_c, stroke_profile(params, RampDirection::Compression), j, params.gamma, bath, opt);

  OpenCycle out;
  out.rho_d = cd.final_state();
  const Operator h1 = hamiltonian(params.b1, j, params.gamma);
  const Operator h2 = hamiltonian(params.b2, j, params.gamma);
  out.energies = {expectation(rho_a, h1), expectation(rho_b, h2), expectation(rho_c, h2), expectation(out.rho_d, h1)};
  out.expansion = stroke_energetics(ab);
  out.compression = stroke_energetics(cd);
  const auto& e = out.energies;
  out.result = finalize(out.expansion.work, out.compression.work, e.e_c - e.e_b,
                        out.expansion.heat + out.compression.heat + (e.e_a - e.e_d));
  return out;
}

struct ThermalizationOptions {
  /// Longest relaxation time searched before giving up.
  double horizon = 1000.0;
  /// Relative width of the final bisection bracket.
  double relative_accuracy = 0.01;
  EvolveOptions evolve = {1e-8, 1e-12, 0.0, 0.5, 1e-3, 0.9};
};

/// First time the relaxation at fixed B1 brings D(rho, rho_A) down to epsilon.
inline double thermalization_time(const Operator& rho_start, const EngineParams& params, const BathConfig& bath,
                                  double epsilon, const ThermalizationOptions& opt = {}) {
  params.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidParams, "epsilon must lie in (0, 1)");
  const double j = params.coupling;
  const Operator rho_a = thermal_state(params.b1, j, params.gamma, params.beta()).rho;
  if (trace_distance(rho_start, rho_a) <= epsilon) return 0.0;

  const RampProfile hold = RampProfile::hold(params.b1, opt.horizon);
  const Trajectory traj = detail::integrate(rho_start, hold, j, params.gamma, bath, opt.evolve,
                                            [&](const TrajectorySample& s) { return trace_distance(s.rho, rho_a) <= epsilon; });
  const auto& last = traj.back();
  if (trace_distance(last.rho, rho_a) > epsilon)
    throw Error(ErrorCode::NotReached, "trace distance stayed above epsilon up to t = " + std::to_string(opt.horizon));

  const auto& before = traj.samples[traj.samples.size() - 2];
  double lo = before.t, hi = last.t;
  while (hi - lo > opt.relative_accuracy * 0.5 * hi) {
    const double mid = 0.5 * (lo + hi);
    EvolveOptions sub = opt.evolve;
    sub.max_step = 0.0;
    const Trajectory piece = evolve_open(before.rho, RampProfile::hold(params.b1, mid - before.t), j, params.gamma, bath, sub);
    if (trace_distance(piece.final_state(), rho_a) <= epsilon) hi = mid;
    else lo = mid;
  }
  return hi;
}

inline double engine_power(double w_total, double tau, double t_c) {
  if (tau < 0.0 || t_c < 0.0 || !(2.0 * tau + t_c > 0.0))
    throw Error(ErrorCode::InvalidParams, "power needs tau >= 0, t_c >= 0 and a positive cycle time");
  return w_total / (2.0 * tau + t_c);
}

/// Modelling caveats worth surfacing to a user; empty when none apply.
inline std::vector<std::string> bath_warnings(const EngineParams& params, const BathConfig& bath) {
  std::vector<std::string> out;
  double max_omega = 0.0;
  for (double b : {params.b1, params.b2}) {
    const double k = k_factor(b, params.coupling, params.gamma);
    max_omega = std::max(max_omega, 2.0 * k + 2.0 * params.coupling);
    if (2.0 * k - 2.0 * params.coupling <= 0.0)
      out.push_back("omega_2 = 2K - 2J <= 0 at B = " + std::to_string(b));
  }
  if (bath.cutoff < 10.0 * max_omega)
    out.push_back("cutoff " + std::to_string(bath.cutoff) + " is not much larger than the largest Bohr frequency " +
                  std::to_string(max_omega));
  return out;
}

}  // namespace otto

#endif  // OTTO_OPEN_SYSTEM_HPP
