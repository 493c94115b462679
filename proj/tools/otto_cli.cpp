// otto: command-line front end for cycle evaluation, sweeps and self-checks.

#include "otto/otto.hpp"

#include "CLI11.hpp"
#include "json_report.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumeric = 2, kIo = 3 };

struct Options {
  otto::EngineParams params;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool log = false;
  bool bath = false;
  bool power = false;
  double omega_c = 1000.0;
  double rate_prefactor = 0.1;
  double tol = 1e-8;
  std::int64_t steps = 256;
  double epsilon = 1e-2;
  unsigned threads = 0;
  std::string output;
  std::string format = "csv";
};

otto::BathConfig bath_of(const Options& o) {
  return {o.params.temperature, o.omega_c, o.rate_prefactor, true};
}

otto::SweepConfig sweep_config(const Options& o, otto::SweepVariable var, bool min_set, bool max_set, bool count_set) {
  otto::SweepConfig cfg;
  cfg.base = o.params;
  cfg.variable = var;
  const bool tau = var == otto::SweepVariable::Tau;
  cfg.range.min = min_set ? o.min : (tau ? 0.01 : 0.0);
  cfg.range.max = max_set ? o.max : (tau ? 20.0 : 1.0);
  cfg.range.count = count_set ? o.count : (tau ? 200 : 101);
  cfg.range.log = o.log;
  cfg.bath = bath_of(o);
  cfg.open_strokes = o.bath;
  cfg.power = o.power;
  cfg.epsilon = o.epsilon;
  cfg.propagator.n_steps = o.steps;
  cfg.evolve.tol = o.tol;
  cfg.threads = o.threads;
  return cfg;
}

// Single-point configuration: a one-element sweep over the given tau.
otto::SweepConfig point_config(const Options& o, bool open, bool power) {
  otto::SweepConfig cfg = sweep_config(o, otto::SweepVariable::Tau, false, false, false);
  cfg.open_strokes = open;
  cfg.power = power;
  if (!(o.tol > 0.0)) throw otto::Error(otto::ErrorCode::InvalidParams, "tolerance must be positive");
  if (o.steps < 1) throw otto::Error(otto::ErrorCode::InvalidParams, "steps must be >= 1");
  if (!(o.epsilon > 0.0 && o.epsilon < 1.0)) throw otto::Error(otto::ErrorCode::InvalidParams, "epsilon must lie in (0, 1)");
  o.params.validate();
  if (open || power) cfg.bath.validate();
  return cfg;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::ios_base::failure("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::ios_base::failure("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int emit_rows(const Options& o, const std::vector<otto::SweepRow>& rows) {
  Sink sink(o.output);
  if (o.format == "json") sink.stream() << otto::tools::to_json(rows).dump(2) << '\n';
  else otto::write_csv(sink.stream(), rows);
  sink.finish();
  for (const auto& r : rows)
    if (r.status.rfind("error", 0) == 0) return rows.size() == 1 ? kNumeric : kOk;
  return kOk;
}

void warn(const Options& o) {
  for (const auto& w : otto::bath_warnings(o.params, bath_of(o))) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit quantum Otto engine with a projective measurement stroke"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file; keys are long flag names");

  Options o;
  app.add_option("--b1", o.params.b1, "Field at the start of the expansion ramp")->capture_default_str();
  app.add_option("--b2", o.params.b2, "Field at the end of the expansion ramp")->capture_default_str();
  app.add_option("--coupling", o.params.coupling, "Exchange coupling J")->capture_default_str();
  app.add_option("--gamma", o.params.gamma, "Anisotropy")->capture_default_str();
  app.add_option("--temp", o.params.temperature, "Bath temperature")->capture_default_str();
  app.add_option("--tau", o.params.tau, "Stroke duration")->capture_default_str();
  auto* min_opt = app.add_option("--min", o.min, "Sweep lower bound");
  auto* max_opt = app.add_option("--max", o.max, "Sweep upper bound");
  auto* count_opt = app.add_option("--count", o.count, "Number of sweep points");
  app.add_flag("--log", o.log, "Logarithmic sweep spacing");
  app.add_flag("--bath", o.bath, "Keep the bath coupled during the ramps");
  app.add_flag("--power", o.power, "Add thermalization time and power columns to sweeps");
  app.add_option("--omega-c", o.omega_c, "Bath spectral cutoff")->capture_default_str();
  app.add_option("--rate-prefactor", o.rate_prefactor, "Bath coupling strength")->capture_default_str();
  app.add_option("--tol", o.tol, "Master-equation local error tolerance")->capture_default_str();
  app.add_option("--steps", o.steps, "Initial propagator step count")->capture_default_str();
  app.add_option("--epsilon", o.epsilon, "Trace-distance threshold for the thermalization time")->capture_default_str();
  app.add_option("--threads", o.threads, "Sweep worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--output", o.output, "Write results to PATH instead of stdout");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* cycle = app.add_subcommand("cycle", "Closed cycle at one duration");
  auto* sweep_tau = app.add_subcommand("sweep-tau", "Sweep the stroke duration");
  auto* sweep_gamma = app.add_subcommand("sweep-gamma", "Sweep the anisotropy (quasistatic and finite tau rows)");
  auto* open = app.add_subcommand("open-cycle", "Cycle with the bath coupled during the ramps");
  auto* power = app.add_subcommand("power", "Thermalization time and power at one duration");
  auto* verify = app.add_subcommand("verify", "Run the invariant self-check suites");
  for (auto* sub : {cycle, sweep_tau, sweep_gamma, open, power, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*verify) {
      otto::VerifyConfig cfg;
      cfg.base = o.params;
      cfg.bath = bath_of(o);
      cfg.propagator.n_steps = o.steps;
      cfg.tol = o.tol;
      const otto::VerifyReport report = otto::verify(cfg);
      Sink sink(o.output);
      if (o.format == "json") sink.stream() << otto::tools::to_json(report).dump(2) << '\n';
      else otto::write_report_text(sink.stream(), report);
      sink.finish();
      if (!o.output.empty()) otto::write_report_text(std::cerr, report);
      if (!report.config_valid) return kValidation;
      return report.passed() ? kOk : kNumeric;
    }
    if (*cycle) return emit_rows(o, {otto::evaluate_row(o.params, point_config(o, false, false))});
    if (*open) {
      warn(o);
      return emit_rows(o, {otto::evaluate_row(o.params, point_config(o, true, false))});
    }
    if (*power) {
      warn(o);
      return emit_rows(o, {otto::evaluate_row(o.params, point_config(o, o.bath, true))});
    }
    const bool tau = static_cast<bool>(*sweep_tau);
    const auto cfg = sweep_config(o, tau ? otto::SweepVariable::Tau : otto::SweepVariable::Gamma, min_opt->count() > 0,
                                  max_opt->count() > 0, count_opt->count() > 0);
    if (o.bath || o.power) warn(o);
    return emit_rows(o, tau ? otto::sweep_tau(cfg) : otto::sweep_gamma(cfg));
  } catch (const otto::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_validation() ? kValidation : kNumeric;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
}
