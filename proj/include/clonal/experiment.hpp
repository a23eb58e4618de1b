// Monte-Carlo driver: replicated simulations with derived seeds, frequency /
// quantile estimators with confidence intervals, analytic predictions
// attached per target, and a verdict per (estimate, prediction) pair.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clonal/ecology.hpp"
#include "clonal/gillespie.hpp"
#include "clonal/phase.hpp"
#include "clonal/stats.hpp"

namespace clonal {

struct Target {
  enum class Kind {
    InvasionProb,            // index = type
    FinalStateFreq,
    SweepDurationQuantiles,
    CycleCountFreq,          // index = minimal cycle count l
    CycleDurations,
  };
  Kind kind = Kind::FinalStateFreq;
  int index = 0;

  static Target invasion_prob(int type) {
    return {Kind::InvasionProb, type};
  }
  static Target final_state_freq() { return {Kind::FinalStateFreq, 0}; }
  static Target sweep_duration_quantiles() {
    return {Kind::SweepDurationQuantiles, 0};
  }
  static Target cycle_count_freq(int l) { return {Kind::CycleCountFreq, l}; }
  static Target cycle_durations() { return {Kind::CycleDurations, 0}; }
};
std::string to_string(const Target& target);
Target parse_target(const std::string& text);  // ConfigError on bad syntax

struct ExperimentSpec {
  EcologyParams params;
  SimConfig sim;             // per-replicate template; sim.seed = base seed
  AnalysisConfig analysis;
  int replicates = 1;
  int parallelism = 1;
  // Rejection-sampling condition applied per replicate (None = plain runs);
  // the level defaults to the sim condition_level, else floor(eps * K).
  Condition conditioning = Condition::None;
  int max_attempts = 200;
  std::vector<Target> targets;
};

enum class Verdict { Pass, Fail, NotApplicable };
const char* to_string(Verdict verdict);

// How the pass/fail slack around the 95% CI is computed for an estimate.
enum class SlackKind { Frequency, Duration, Ratio };
const char* to_string(SlackKind kind);

struct Estimate {
  std::string name;
  double value = 0.0;
  Interval ci{};         // 95%: Wilson (frequencies) or bootstrap (quantiles)
  std::int64_t n = 0;    // replicates contributing
  std::optional<double> predicted;
  SlackKind slack_kind = SlackKind::Frequency;
  Verdict verdict = Verdict::NotApplicable;
  std::string tolerance;  // human-readable slack actually applied
};

struct TolerancePolicy {
  double frequency_abs = 0.05;  // absolute widening beyond the CI
  double duration_rel = 0.20;   // relative to the predicted duration
  double ratio_abs = 0.15;      // absolute, for duration ratios
};

struct ExperimentReport {
  std::uint64_t base_seed = 0;
  int replicates = 0;
  int parallelism = 1;
  std::string conditioning = "none";
  double acceptance_rate = 1.0;  // accepted / total attempts (conditioned)
  int budget_exhausted = 0;      // replicates that hit the event budget
  std::string regime;            // detected interference regime + reason
  std::vector<Estimate> estimates;
  double wall_time_seconds = 0.0;
};

// Runs spec.replicates simulations with seeds derived from sim.seed by
// replicate index; the aggregation is single-threaded and index-ordered, so
// the report is identical for any parallelism.  Verdicts use the default
// tolerance policy.
ExperimentReport run(const ExperimentSpec& spec);

// Re-evaluates the verdicts under the given policy.  pass == no Fail.
struct VerifySummary {
  bool pass = true;
  std::string table;  // human-readable verdict table
};
VerifySummary verify(ExperimentReport& report,
                     const TolerancePolicy& policy = {});

// include_wall_time=false yields a byte-stable serialization for
// reproducibility comparisons.
std::string to_json(const ExperimentReport& report, int indent = 2,
                    bool include_wall_time = true);

}  // namespace clonal
