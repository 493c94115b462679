// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "otto/otto.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace {

using namespace otto;

struct Outcome {
  bool passed;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds; 0 = none
  std::function<Outcome()> run;
};

EngineParams params(double gamma, double tau) {
  EngineParams p;
  p.gamma = gamma;
  p.tau = tau;
  return p;
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

double efficiency(const CycleResult& r) { return r.efficiency ? *r.efficiency : std::nan(""); }

Outcome sudden_limit() {
  double worst = 0.0;
  std::string detail;
  for (double g : {0.0, 0.3, 0.6, 1.0}) {
    const double eta = efficiency(run_cycle(params(g, 1e-3)).result);
    worst = std::max(worst, std::abs(eta - 0.5));
    detail += fmt("eta(%.1f)=", g) + fmt("%.6f ", eta);
  }
  return {worst <= 0.01, detail + fmt("max|eta-0.5|=%.2e (tol 1e-2)", worst)};
}

Outcome adiabatic_limit() {
  const double eta = efficiency(run_cycle(params(1.0, 100.0)).result);
  return {std::abs(eta - 0.36754) <= 0.005, fmt("eta=%.6f (target 0.36754 +- 0.005)", eta)};
}

Outcome isotropic_flatness() {
  double worst = 0.0;
  for (double tau : {0.01, 0.1, 1.0, 10.0}) worst = std::max(worst, std::abs(efficiency(run_cycle(params(0.0, tau)).result) - 0.5));
  return {worst <= 1e-6, fmt("max|eta-0.5|=%.2e (tol 1e-6)", worst)};
}

Outcome oscillation_signature() {
  std::vector<double> delta;
  double worst = 0.0;
  for (int i = 1; i <= 300; ++i) {
    const EngineParams p = params(1.0, 0.01 * i);
    const Operator u = propagator(p, RampDirection::Expansion);
    const Operator v = propagator(p, RampDirection::Compression);
    const TransitionProbs t = transition_probabilities(p, u, v);
    delta.push_back(t.delta);
    worst = std::max(worst, std::abs(t.delta - t.lam));
  }
  int extrema = 0;
  for (std::size_t i = 1; i + 1 < delta.size(); ++i) {
    const bool max = delta[i] > delta[i - 1] && delta[i] > delta[i + 1];
    const bool min = delta[i] < delta[i - 1] && delta[i] < delta[i + 1];
    extrema += max || min;
  }
  return {extrema >= 2 && worst <= 1e-10,
          fmt("strict extrema=%.0f (need >= 2), ", extrema) + fmt("max|delta-lambda|=%.2e (tol 1e-10)", worst)};
}

Outcome work_maximizing_anisotropy() {
  double best_gamma = 0.0, best = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double g = 0.01 * i;
    const double w = std::abs(limit_cycle(params(g, 1.0), Limit::Adiabatic).w_total);
    if (w > best) {
      best = w;
      best_gamma = g;
    }
  }
  return {std::abs(best_gamma - 0.46) <= 0.05,
          fmt("argmax gamma=%.2f ", best_gamma) + fmt("|W_q|=%.6f (target 0.46 +- 0.05)", best)};
}

Outcome invariant_suite() {
  VerifyReport report;
  for (double g : {0.0, 0.3, 0.6, 1.0}) {
    for (double tau : {0.01, 0.1, 1.0, 10.0}) {
      const EngineParams p = params(g, tau);
      const CycleStates s = cycle_states(p);
      const std::string name = fmt("g=%.1f ", g) + fmt("tau=%g", tau);
      report.add("unitarity", name, std::max(unitarity_residual(s.u), unitarity_residual(s.v)), 1e-10);
      report.add("microreversibility", name, microreversibility(p, s.u, s.v).max(), 1e-10);
      const CycleResult numeric = result_from_energies(s.energies());
      report.add("first-law", name, numeric.first_law_residual(), 1e-10);
      const CycleResult analytic = cycle_from_probs(p, transition_probabilities(p, s.u, s.v)).result;
      const double diff = std::max({std::abs(numeric.w1 - analytic.w1), std::abs(numeric.w2 - analytic.w2),
                                    std::abs(numeric.q_m - analytic.q_m), std::abs(numeric.q_l - analytic.q_l)});
      report.add("analytic-vs-numeric", name, diff, 1e-8);
    }
  }
  std::string detail;
  for (const char* suite : {"unitarity", "microreversibility", "first-law", "analytic-vs-numeric"})
    detail += std::string(suite) + fmt("=%.1e ", report.worst(suite));
  return {report.passed(), detail + "(tol 1e-10, 1e-10, 1e-10, 1e-8)"};
}

Outcome open_short_time() {
  const BathConfig bath;
  const double open_short = efficiency(open_cycle(params(1.0, 0.1), bath).result);
  const double closed_short = efficiency(run_cycle(params(1.0, 0.1)).result);
  const double open_long = efficiency(open_cycle(params(1.0, 10.0), bath).result);
  const double closed_long = efficiency(run_cycle(params(1.0, 10.0)).result);
  const double gap = std::abs(open_short - closed_short);
  return {gap <= 0.02 && open_long < closed_long,
          fmt("|eta_open-eta_closed|(0.1)=%.4f (tol 0.02), ", gap) + fmt("eta_open(10)=%.4f < ", open_long) +
              fmt("eta_closed(10)=%.4f", closed_long)};
}

Outcome gibbs_stationarity() {
  const BathConfig bath;
  const Operator gibbs = thermal_state(1.0, 1.0, 1.0, 1.0).rho;
  EvolveOptions opt;
  opt.sample_spacing = 0.0;
  const Trajectory traj = evolve_open(gibbs, RampProfile::hold(1.0, 10.0), 1.0, 1.0, bath, opt);
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, trace_distance(s.rho, gibbs));
  return {worst <= 1e-3, fmt("max trace distance=%.2e (tol 1e-3)", worst)};
}

Outcome open_first_law() {
  const BathConfig bath;
  const EngineParams p = params(1.0, 5.0);
  EvolveOptions opt;
  opt.tol = 1e-8;
  const Operator rho_a = thermal_state(1.0, 1.0, 1.0, 1.0).rho;
  const auto e = stroke_energetics(evolve_open(rho_a, stroke_profile(p, RampDirection::Expansion), 1.0, 1.0, bath, opt));
  return {e.first_law_residual() <= 1e-6, fmt("|dE-W-Q|=%.2e (tol 1e-6)", e.first_law_residual())};
}

double relaxation_time(double gamma, const BathConfig& bath) {
  const EngineParams p = params(gamma, 1e-2);
  return thermalization_time(cycle_states(p).rho_d, p, bath, 1e-2);
}

Outcome thermalization_range() {
  const BathConfig bath;
  const double t0 = relaxation_time(0.0, bath);
  const double t1 = relaxation_time(1.0, bath);
  const bool ok = std::abs(t0 - 61.0) <= 0.25 * 61.0 && std::abs(t1 - 191.0) <= 0.25 * 191.0;
  return {ok, fmt("t_c(0)=%.1f (target 61 +- 25%%), ", t0) + fmt("t_c(1)=%.1f (target 191 +- 25%%)", t1)};
}

Outcome power_trend() {
  const BathConfig bath;
  std::vector<double> power, work;
  std::string detail;
  for (double g : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const EngineParams p = params(g, 1e-2);
    const CycleStates s = cycle_states(p);
    const double w = result_from_energies(s.energies()).w_total;
    const double t_c = thermalization_time(s.rho_d, p, bath, 1e-2);
    power.push_back(std::abs(engine_power(w, p.tau, t_c)));
    work.push_back(std::abs(w));
    detail += fmt("|P|(%.2f)=", g) + fmt("%.4f ", power.back());
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < power.size(); ++i) decreasing = decreasing && power[i] < power[i - 1];
  const double wmax = *std::max_element(work.begin(), work.end());
  const double wmin = *std::min_element(work.begin(), work.end());
  const double spread = (wmax - wmin) / wmax;
  return {decreasing && spread < 0.15,
          detail + (decreasing ? "monotone, " : "not monotone, ") + fmt("|W| spread=%.2f%% (tol 15%%)", 100.0 * spread)};
}

// Relaxation times with a low spectral cutoff, printed for comparison only.
void cutoff_diagnostic() {
  BathConfig bath;
  bath.cutoff = 3.0;
  std::printf("INFO   cutoff 3 relaxation times:");
  for (double g : {0.0, 0.25, 0.5, 0.75, 1.0}) std::printf(" t_c(%.2f)=%.1f", g, relaxation_time(g, bath));
  std::printf("  (not a criterion)\n");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "sudden-limit efficiency", 1.0, sudden_limit},
      {2, "adiabatic-limit efficiency", 5.0, adiabatic_limit},
      {3, "isotropic flatness", 0.0, isotropic_flatness},
      {4, "oscillation signature", 10.0, oscillation_signature},
      {5, "work-maximizing anisotropy", 0.0, work_maximizing_anisotropy},
      {6, "invariant suite", 30.0, invariant_suite},
      {7, "open-system short-time agreement", 0.0, open_short_time},
      {8, "Gibbs stationarity", 0.0, gibbs_stationarity},
      {9, "first law on open strokes", 0.0, open_first_law},
      {10, "thermalization-time range", 120.0, thermalization_range},
      {11, "power trend", 0.0, power_trend},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit == 0.0 || secs < c.time_limit;
    const bool passed = out.passed && in_time;
    failures += !passed;
    std::printf("%s [%2d] %s: %s; %.2fs%s\n", passed ? "PASS" : "FAIL", c.id, c.title.c_str(), out.detail.c_str(), secs,
                in_time ? "" : fmt(" exceeds %.0fs limit", c.time_limit).c_str());
    std::fflush(stdout);
  }
  cutoff_diagnostic();
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
