#ifndef OTTO_EXPERIMENTS_HPP
#define OTTO_EXPERIMENTS_HPP

// Parameter sweeps over the stroke duration or the anisotropy, CSV output,
// and the invariant self-check behind `otto verify`.

#include "otto/error.hpp"
#include "otto/open_system.hpp"
#include "otto/otto_cycle.hpp"
#include "otto/propagation.hpp"
#include "otto/spin_system.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace otto {

enum class SweepVariable { Tau, Gamma };

struct SweepRange {
  double min = 0.01;
  double max = 20.0;
  int count = 200;
  bool log = false;

  void validate() const {
    if (count < 2) throw Error(ErrorCode::InvalidParams, "sweep count must be >= 2");
    if (!(min < max)) throw Error(ErrorCode::InvalidParams, "sweep min must be below max");
    if (log && !(min > 0.0)) throw Error(ErrorCode::InvalidParams, "log spacing needs min > 0");
  }

  std::vector<double> points() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(count - 1);
      out[i] = log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
    }
    out.back() = max;
    return out;
  }
};

struct SweepConfig {
  EngineParams base;
  SweepVariable variable = SweepVariable::Tau;
  SweepRange range;
  /// Bath used for always-on strokes and for the relaxation behind t_c.
  BathConfig bath;
  /// Evolve the ramps under the master equation instead of unitarily.
  bool open_strokes = false;
  /// Compute t_c and power for every row.
  bool power = false;
  double epsilon = 1e-2;
  PropagatorOptions propagator;
  EvolveOptions evolve;
  ThermalizationOptions thermalization;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  void validate() const {
    base.validate();
    range.validate();
    if (open_strokes || power) bath.validate();
    if (variable == SweepVariable::Gamma && (range.min < 0.0 || range.max > 1.0))
      throw Error(ErrorCode::InvalidParams, "gamma sweeps must stay within [0, 1]");
    if (variable == SweepVariable::Tau && !(range.min > 0.0))
      throw Error(ErrorCode::InvalidParams, "tau sweeps need min > 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidParams, "epsilon must lie in (0, 1)");
    if (!(evolve.tol > 0.0)) throw Error(ErrorCode::InvalidParams, "tolerance must be positive");
    if (propagator.n_steps < 1) throw Error(ErrorCode::InvalidParams, "steps must be >= 1");
  }
};

struct SweepRow {
  double tau = 0.0;
  double gamma = 0.0;
  double w1 = 0.0, w2 = 0.0, w_total = 0.0, q_m = 0.0, q_l = 0.0;
  std::optional<double> efficiency;
  double xi = 0.0, delta = 0.0, chi = 0.0, lambda = 0.0;
  std::optional<double> t_c;
  std::optional<double> power;
  bool is_engine = false;
  std::string status = "ok";
};

inline constexpr const char* kCsvHeader =
    "tau,gamma,w1,w2,w_total,q_m,q_l,efficiency,xi,delta,chi,lambda,t_c,power,is_engine,status";

namespace detail {

inline void fill(SweepRow& row, const CycleResult& r, const TransitionProbs& p) {
  row.w1 = r.w1;
  row.w2 = r.w2;
  row.w_total = r.w_total;
  row.q_m = r.q_m;
  row.q_l = r.q_l;
  row.efficiency = r.efficiency;
  row.is_engine = r.is_engine;
  row.xi = p.xi;
  row.delta = p.delta;
  row.chi = p.chi;
  row.lambda = p.lam;
  row.status = r.is_engine ? "ok" : "non-engine";
}

inline SweepRow failed_row(double tau, double gamma, const std::string& why) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SweepRow row;
  row.tau = tau;
  row.gamma = gamma;
  row.w1 = row.w2 = row.w_total = row.q_m = row.q_l = nan;
  row.xi = row.delta = row.chi = row.lambda = nan;
  row.status = "error: " + why;
  return row;
}

}  // namespace detail

/// One finite-tau row: closed or open strokes, optionally with t_c and power.
inline SweepRow evaluate_row(const EngineParams& params, const SweepConfig& cfg) {
  try {
    SweepRow row;
    row.tau = params.tau;
    row.gamma = params.gamma;
    const CycleStates states = cycle_states(params, cfg.propagator);
    const TransitionProbs probs = transition_probabilities(params, states.u, states.v);
    Operator rho_d = states.rho_d;
    if (cfg.open_strokes) {
      const OpenCycle oc = open_cycle(params, cfg.bath, cfg.evolve);
      detail::fill(row, oc.result, probs);
      rho_d = oc.rho_d;
    } else {
      detail::fill(row, result_from_energies(states.energies()), probs);
    }
    if (cfg.power) {
      row.t_c = thermalization_time(rho_d, params, cfg.bath, cfg.epsilon, cfg.thermalization);
      row.power = engine_power(row.w_total, params.tau, *row.t_c);
    }
    return row;
  } catch (const Error& e) {
    return detail::failed_row(params.tau, params.gamma, e.what());
  }
}

/// Closed-form quasistatic row; tau is reported as infinity.
inline SweepRow quasistatic_row(const EngineParams& params) {
  try {
    SweepRow row;
    row.tau = std::numeric_limits<double>::infinity();
    row.gamma = params.gamma;
    detail::fill(row, limit_cycle(params, Limit::Adiabatic), limit_probabilities(params, Limit::Adiabatic));
    return row;
  } catch (const Error& e) {
    return detail::failed_row(std::numeric_limits<double>::infinity(), params.gamma, e.what());
  }
}

/// Runs fn(i) for i in [0, n) on a small pool; results are indexed so output
/// order never depends on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
  };
  if (workers <= 1) {
    work();
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  return out;
}

inline std::vector<SweepRow> sweep_tau(const SweepConfig& cfg) {
  if (cfg.variable != SweepVariable::Tau) throw Error(ErrorCode::InvalidParams, "sweep_tau needs variable = tau");
  cfg.validate();
  const std::vector<double> taus = cfg.range.points();
  return parallel_map<SweepRow>(taus.size(), cfg.threads, [&](std::size_t i) {
    EngineParams p = cfg.base;
    p.tau = taus[i];
    return evaluate_row(p, cfg);
  });
}

/// For each gamma: the quasistatic row followed by the finite-tau row.
inline std::vector<SweepRow> sweep_gamma(const SweepConfig& cfg) {
  if (cfg.variable != SweepVariable::Gamma) throw Error(ErrorCode::InvalidParams, "sweep_gamma needs variable = gamma");
  cfg.validate();
  const std::vector<double> gammas = cfg.range.points();
  const auto finite = parallel_map<SweepRow>(gammas.size(), cfg.threads, [&](std::size_t i) {
    EngineParams p = cfg.base;
    p.gamma = gammas[i];
    return evaluate_row(p, cfg);
  });
  std::vector<SweepRow> out;
  out.reserve(2 * gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    EngineParams p = cfg.base;
    p.gamma = gammas[i];
    out.push_back(quasistatic_row(p));
    out.push_back(finite[i]);
  }
  return out;
}

// --- CSV -------------------------------------------------------------------

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

inline std::string csv_line(const SweepRow& r) {
  std::string status = r.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  std::ostringstream os;
  os << format_number(r.tau) << ',' << format_number(r.gamma) << ',' << format_number(r.w1) << ','
     << format_number(r.w2) << ',' << format_number(r.w_total) << ',' << format_number(r.q_m) << ','
     << format_number(r.q_l) << ',' << format_optional(r.efficiency) << ',' << format_number(r.xi) << ','
     << format_number(r.delta) << ',' << format_number(r.chi) << ',' << format_number(r.lambda) << ','
     << format_optional(r.t_c) << ',' << format_optional(r.power) << ',' << (r.is_engine ? "true" : "false") << ','
     << status;
  return os.str();
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << csv_line(r) << '\n';
}

// --- verify ----------------------------------------------------------------

struct CheckResult {
  std::string suite;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool config_valid = true;

  bool passed() const {
    return config_valid && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  void add(std::string suite, std::string name, double value, double threshold) {
    checks.push_back({std::move(suite), std::move(name), value, threshold, value <= threshold});
  }

  double worst(const std::string& suite) const {
    double w = 0.0;
    for (const auto& c : checks)
      if (c.suite == suite) w = std::max(w, c.value);
    return w;
  }
};

struct VerifyConfig {
  EngineParams base;
  BathConfig bath;
  PropagatorOptions propagator;
  double tol = 1e-8;
};

namespace detail {

inline std::string label(double gamma, double tau) {
  return "gamma=" + format_number(gamma) + " tau=" + format_number(tau);
}

inline double cycle_mismatch(const CycleResult& a, const CycleResult& b) {
  double m = std::max({std::abs(a.w1 - b.w1), std::abs(a.w2 - b.w2), std::abs(a.q_m - b.q_m), std::abs(a.q_l - b.q_l)});
  if (a.efficiency.has_value() != b.efficiency.has_value()) return std::numeric_limits<double>::infinity();
  if (a.efficiency) m = std::max(m, std::abs(*a.efficiency - *b.efficiency));
  return m;
}

inline double prob_mismatch(const TransitionProbs& a, const TransitionProbs& b) {
  return std::max({std::abs(a.xi - b.xi), std::abs(a.delta - b.delta), std::abs(a.chi - b.chi), std::abs(a.lam - b.lam)});
}

}  // namespace detail

/// Runs the unitarity, microreversibility, first-law, analytic-vs-numeric,
/// Gibbs-stationarity and limit-consistency suites.
inline VerifyReport verify(const VerifyConfig& cfg) {
  VerifyReport report;
  try {
    cfg.base.validate();
    cfg.bath.validate();
    if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidParams, "tolerance must be positive");
  } catch (const Error& e) {
    report.config_valid = false;
    report.checks.push_back({"config", e.what(), 1.0, 0.0, false});
    return report;
  }

  for (double gamma : {0.0, 0.3, 0.6, 1.0}) {
    for (double tau : {0.01, 0.1, 1.0, 10.0}) {
      EngineParams p = cfg.base;
      p.gamma = gamma;
      p.tau = tau;
      const std::string name = detail::label(gamma, tau);
      const CycleStates s = cycle_states(p, cfg.propagator);
      report.add("unitarity", name, std::max(unitarity_residual(s.u), unitarity_residual(s.v)), 1e-10);
      report.add("microreversibility", name, microreversibility(p, s.u, s.v).max(), 1e-10);
      const CycleResult numeric = result_from_energies(s.energies());
      report.add("first-law", name, numeric.first_law_residual(), 1e-10);
      const Cycle analytic = cycle_from_probs(p, transition_probabilities(p, s.u, s.v));
      report.add("analytic-vs-numeric", name, detail::cycle_mismatch(numeric, analytic.result), 1e-8);
    }
  }

  {
    EngineParams p = cfg.base;
    const EigenSystem es = eigensystem(p.b1, p.coupling, p.gamma);
    const Operator gibbs = thermal_state(es, 1.0 / cfg.bath.temperature).rho;
    const RampProfile hold = RampProfile::hold(p.b1, 10.0);
    report.add("gibbs-stationarity", "generator norm", max_norm(lindblad_rhs(gibbs, 0.0, hold, p.coupling, p.gamma, cfg.bath)), 1e-10);
    EvolveOptions opt;
    opt.tol = cfg.tol;
    opt.sample_spacing = 0.0;
    const Trajectory traj = evolve_open(gibbs, hold, p.coupling, p.gamma, cfg.bath, opt);
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, trace_distance(s.rho, gibbs));
    report.add("gibbs-stationarity", "trace distance over t in [0, 10]", worst, 1e-3);
  }

  {
    EngineParams p = cfg.base;
    p.tau = 5.0;
    EvolveOptions opt;
    opt.tol = cfg.tol;
    const Operator rho_a = thermal_state(p.b1, p.coupling, p.gamma, p.beta()).rho;
    const Trajectory ab = evolve_open(rho_a, stroke_profile(p, RampDirection::Expansion), p.coupling, p.gamma, cfg.bath, opt);
    report.add("first-law", "open expansion stroke tau=5", stroke_energetics(ab).first_law_residual(),
               std::max(1e-6, 10.0 * cfg.tol));
  }

  {
    EngineParams p = cfg.base;
    p.tau = 1e-4;
    const CycleStates s = cycle_states(p, cfg.propagator);
    report.add("limit-consistency", "sudden tau=1e-4",
               detail::prob_mismatch(transition_probabilities(p, s.u, s.v), limit_probabilities(p, Limit::Sudden)), 1e-4);
    p.tau = 200.0;
    const CycleStates a = cycle_states(p, cfg.propagator);
    report.add("unitarity", detail::label(p.gamma, p.tau), std::max(unitarity_residual(a.u), unitarity_residual(a.v)), 1e-10);
    report.add("limit-consistency", "adiabatic tau=200",
               detail::prob_mismatch(transition_probabilities(p, a.u, a.v), limit_probabilities(p, Limit::Adiabatic)), 1e-3);
  }
  return report;
}

inline void write_report_text(std::ostream& os, const VerifyReport& report) {
  for (const auto& c : report.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.suite << " [" << c.name << "] value=" << format_number(c.value)
       << " threshold=" << format_number(c.threshold) << '\n';
  }
  os << (report.passed() ? "all checks passed" : "verification FAILED") << '\n';
}

}  // namespace otto

#endif  // OTTO_EXPERIMENTS_HPP
