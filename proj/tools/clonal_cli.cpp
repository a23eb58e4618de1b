// Command-line front end.  Every subcommand reads the same structured text
// spec file (see include/clonal/config.hpp for the schema); a handful of
// flags override spec fields for quick sweeps.
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clonal/bd.hpp"
#include "clonal/config.hpp"
#include "clonal/ecology.hpp"
#include "clonal/errors.hpp"
#include "clonal/experiment.hpp"
#include "clonal/gillespie.hpp"
#include "clonal/lv.hpp"
#include "clonal/phase.hpp"
#include "clonal/predictor.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> parallelism;
  std::optional<double> eps;
  std::optional<double> horizon;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "override the base RNG seed");
  cmd->add_option("--replicates", ov.replicates, "override the replicate count");
  cmd->add_option("--parallelism", ov.parallelism, "override the worker count");
  cmd->add_option("--eps", ov.eps,
                  "override the macroscopic threshold (recording + analysis)");
  cmd->add_option("--horizon", ov.horizon, "override the simulation horizon");
}

clonal::ExperimentSpec load_spec(const std::string& path, const Overrides& ov) {
  auto spec = clonal::experiment_spec_from_config(clonal::ConfigFile::load(path));
  if (ov.seed) spec.sim.seed = *ov.seed;
  if (ov.replicates) spec.replicates = *ov.replicates;
  if (ov.parallelism) spec.parallelism = *ov.parallelism;
  if (ov.horizon) spec.sim.horizon = *ov.horizon;
  if (ov.eps) {
    spec.analysis.eps = *ov.eps;
    spec.sim.record = clonal::default_record_policy(spec.params, *ov.eps);
    spec.sim.record_is_default = false;
  }
  return spec;
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty() || output_path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(output_path);
  if (!out) throw clonal::ConfigError("cannot open output file: " + output_path);
  out << text;
}

std::string describe(const clonal::QualitativeOutcome& outcome) {
  std::ostringstream os;
  os << "outcome: " << clonal::to_string(outcome.kind) << "\n";
  if (outcome.winner >= 0) os << "winner: type " << outcome.winner << "\n";
  if (outcome.pair[0] >= 0)
    os << "pair: types " << outcome.pair[0] << "," << outcome.pair[1] << "\n";
  os << "signs: " << outcome.sign_pattern << "\n";
  for (const auto& fp : outcome.fixed_points) {
    os << "fixed point (";
    for (std::size_t i = 0; i < fp.types.size(); ++i)
      os << (i ? "," : "") << fp.types[i];
    char buf[128];
    std::snprintf(buf, sizeof buf, ") at [%.6g, %.6g, %.6g] %s\n",
                  fp.location[0], fp.location[1], fp.location[2],
                  fp.stable ? "stable" : "unstable");
    os << buf;
  }
  if (outcome.permanent.has_value())
    os << "permanent: " << (*outcome.permanent ? "yes" : "no") << "\n";
  if (outcome.vl_certificate.has_value()) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "diagonal stability certificate: d = [%.6g, %.6g, %.6g]\n",
                  (*outcome.vl_certificate)[0], (*outcome.vl_certificate)[1],
                  (*outcome.vl_certificate)[2]);
    os << buf;
  }
  if (!outcome.note.empty()) os << "note: " << outcome.note << "\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Three-type competitive birth-death model: exact stochastic simulation, "
      "deterministic limit, and analytic scenario predictions"};
  app.require_subcommand(1);

  Overrides ov;
  std::string spec_path;
  std::string output_path;
  bool as_json = false;

  auto* fitness = app.add_subcommand(
      "fitness", "print growth rates, equilibria and invasion fitnesses");
  fitness->add_option("spec", spec_path, "spec file")->required()
      ->check(CLI::ExistingFile);
  fitness->add_option("-o,--output", output_path, "output file (default stdout)");

  auto* classify = app.add_subcommand(
      "classify", "qualitative long-run outcome of the deterministic flow");
  classify->add_option("spec", spec_path, "spec file")->required()
      ->check(CLI::ExistingFile);
  classify->add_option("-o,--output", output_path, "output file");

  auto* predict = app.add_subcommand(
      "predict", "scenario table for the two-mutation schedule");
  predict->add_option("spec", spec_path, "spec file")->required()
      ->check(CLI::ExistingFile);
  predict->add_flag("--json", as_json, "emit JSON instead of the text table");
  predict->add_option("-o,--output", output_path, "output file");

  auto* simulate = app.add_subcommand(
      "simulate", "one exact stochastic trajectory, CSV to stdout");
  simulate->add_option("spec", spec_path, "spec file")->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("-o,--output", output_path, "output file");
  add_override_flags(simulate, ov);

  double ode_stride = 0.0;
  std::vector<double> ode_start;
  auto* ode = app.add_subcommand(
      "ode", "deterministic (infinite-K) trajectory, CSV to stdout");
  ode->add_option("spec", spec_path, "spec file")->required()
      ->check(CLI::ExistingFile);
  ode->add_option("--z0", ode_start,
                  "initial densities n0 n1 n2 (default: the scaled "
                  "stochastic start)")->expected(3);
  ode->add_option("--stride", ode_stride,
                  "resample output at this time spacing (default: one row "
                  "per accepted step)");
  ode->add_option("-o,--output", output_path, "output file");
  add_override_flags(ode, ov);

  auto* experiment = app.add_subcommand(
      "experiment", "run a Monte-Carlo experiment spec, report JSON");
  experiment->add_option("spec", spec_path, "spec file")->required()
      ->check(CLI::ExistingFile);
  experiment->add_option("-o,--output", output_path, "output file");
  add_override_flags(experiment, ov);

  auto* verify = app.add_subcommand(
      "verify", "experiment + prediction verdicts; exit 1 on any Fail");
  verify->add_option("spec", spec_path, "spec file")->required()
      ->check(CLI::ExistingFile);
  verify->add_option("-o,--output", output_path, "report file (verdict table "
                     "always goes to stdout)");
  add_override_flags(verify, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fitness) {
      auto spec = load_spec(spec_path, ov);
      emit(clonal::to_json(clonal::fitness_summary(spec.params)), output_path);
    } else if (*classify) {
      auto spec = load_spec(spec_path, ov);
      auto summary = clonal::fitness_summary(spec.params);
      emit(describe(clonal::classify(summary)), output_path);
    } else if (*predict) {
      auto spec = load_spec(spec_path, ov);
      auto summary = clonal::fitness_summary(spec.params);
      auto predictions = clonal::predict(summary, spec.params.alpha);
      emit(as_json ? clonal::to_json(predictions)
                   : clonal::to_text_table(predictions),
           output_path);
    } else if (*simulate) {
      auto spec = load_spec(spec_path, ov);
      auto trajectory = clonal::simulate(spec.params, spec.sim);
      emit(clonal::to_csv(trajectory), output_path);
      std::cerr << "terminal: " << clonal::to_string(trajectory.terminal)
                << " at t = " << trajectory.final_state.time
                << " after " << trajectory.event_count << " events\n";
    } else if (*ode) {
      auto spec = load_spec(spec_path, ov);
      auto system = clonal::lv_subsystem(spec.params, {0, 1, 2});
      std::array<double, 3> z0{};
      if (ode_start.size() == 3) {
        z0 = {ode_start[0], ode_start[1], ode_start[2]};
      } else {
        auto start = clonal::initial_state(spec.params);
        const double k =
            static_cast<double>(spec.params.carrying_capacity);
        for (int i = 0; i < 3; ++i)
          z0[i] = static_cast<double>(start.counts[i]) / k;
      }
      double horizon = spec.sim.horizon;
      if (horizon <= 0)
        horizon = 50.0 * std::log(static_cast<double>(
                             spec.params.carrying_capacity));
      emit(clonal::to_csv(clonal::integrate(system, z0, horizon), ode_stride),
           output_path);
    } else if (*experiment) {
      auto spec = load_spec(spec_path, ov);
      emit(clonal::to_json(clonal::run(spec)), output_path);
    } else if (*verify) {
      auto spec = load_spec(spec_path, ov);
      auto report = clonal::run(spec);
      if (!output_path.empty()) emit(clonal::to_json(report), output_path);
      auto summary = clonal::verify(report);
      std::cout << summary.table;
      return summary.pass ? 0 : 1;
    }
  } catch (const clonal::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
