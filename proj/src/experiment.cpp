#include "clonal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "clonal/predictor.hpp"
#include "clonal/rng.hpp"
#include "json.hpp"

namespace clonal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicateOutcome {
  std::string final_label = "undetermined";
  std::optional<double> sweep_duration;
  std::optional<double> entered_at;
  std::array<bool, 3> established{};   // hit the establishment level
  int cycle_count = 0;
  std::vector<double> cycle_durations;
  int attempts = 1;
  bool budget_exhausted = false;
};

bool wants(const ExperimentSpec& spec, Target::Kind kind) {
  for (const Target& t : spec.targets)
    if (t.kind == kind) return true;
  return false;
}

// The count both the establishment estimators and the conditioning use.
std::int64_t establishment_level(const ExperimentSpec& spec) {
  if (spec.sim.condition_level > 0) return spec.sim.condition_level;
  const auto level = static_cast<std::int64_t>(std::floor(
      spec.analysis.eps *
      static_cast<double>(spec.params.carrying_capacity)));
  return std::max<std::int64_t>(level, 2);
}

// Classifies a predicted final-state point by its zero pattern so that
// predictions and detections share one label vocabulary.
std::string label_from_final(const PredictedFinal& fin) {
  if (fin.kind == PredictedFinal::Kind::Coexist012) return "interior";
  if (fin.kind != PredictedFinal::Kind::Point) return "undetermined";
  if (!fin.density.has_value()) return "undetermined";
  const Vec3& d = *fin.density;
  std::vector<int> alive;
  for (int i = 0; i < 3; ++i)
    if (d[i] > 0.0) alive.push_back(i);
  switch (alive.size()) {
    case 0: return "origin";
    case 1: return std::string("n") + static_cast<char>('0' + alive[0]);
    case 2:
      return std::string("pair") + static_cast<char>('0' + alive[0]) +
             static_cast<char>('0' + alive[1]);
    default: return "interior";
  }
}

// Which mutants a branch assumes established, by case-label suffix.
std::array<bool, 2> branch_establishes(const std::string& label) {
  const auto dash = label.find('-');
  const std::string suffix =
      dash == std::string::npos ? label : label.substr(dash + 1);
  if (suffix == "none") return {false, false};
  if (suffix == "solo1") return {true, false};
  if (suffix == "solo2") return {false, true};
  if (suffix == "2fails") return {true, false};
  return {true, true};  // decision-table leaves
}

bool branch_consistent(const std::string& label, Condition conditioning) {
  const std::array<bool, 2> est = branch_establishes(label);
  switch (conditioning) {
    case Condition::None: return true;
    case Condition::Mutant1Survives: return est[0];
    case Condition::Mutant2Survives: return est[1];
    case Condition::BothSurvive: return est[0] && est[1];
  }
  return true;
}

struct PredictionContext {
  bool available = false;
  std::vector<Prediction> branches;
  double conditioning_mass = 1.0;  // probability of the conditioned set
};

PredictionContext make_prediction_context(const ExperimentSpec& spec,
                                          const FitnessSummary& summary) {
  PredictionContext ctx;
  if (!spec.sim.mutation2_enabled) return ctx;
  try {
    ctx.branches = predict(summary, spec.params.alpha);
  } catch (const Error&) {
    return ctx;
  }
  ctx.available = true;
  double mass = 0.0;
  for (const Prediction& p : ctx.branches)
    if (branch_consistent(p.case_label, spec.conditioning))
      mass += p.probability;
  ctx.conditioning_mass = mass;
  return ctx;
}

std::string verdict_line(const Estimate& e) {
  char buf[256];
  const std::string pred =
      e.predicted.has_value()
          ? [&] {
              char p[32];
              std::snprintf(p, sizeof(p), "%.6g", *e.predicted);
              return std::string(p);
            }()
          : std::string("-");
  std::snprintf(buf, sizeof(buf),
                "%-30s %12.6g  [%.6g, %.6g]  n=%-7lld pred=%-10s %-4s %s\n",
                e.name.c_str(), e.value, e.ci.lo, e.ci.hi,
                static_cast<long long>(e.n), pred.c_str(),
                to_string(e.verdict), e.tolerance.c_str());
  return buf;
}

}  // namespace

std::string to_string(const Target& target) {
  switch (target.kind) {
    case Target::Kind::InvasionProb:
      return "invasion_prob(" + std::to_string(target.index) + ")";
    case Target::Kind::FinalStateFreq: return "final_state_freq";
    case Target::Kind::SweepDurationQuantiles:
      return "sweep_duration_quantiles";
    case Target::Kind::CycleCountFreq:
      return "cycle_count_freq(" + std::to_string(target.index) + ")";
    case Target::Kind::CycleDurations: return "cycle_durations";
  }
  return "?";
}

Target parse_target(const std::string& text) {
  const auto strip = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string s = strip(text);
  std::string name = s;
  int index = 0;
  bool has_index = false;
  const auto open = s.find('(');
  if (open != std::string::npos) {
    if (s.back() != ')')
      throw ConfigError("target '" + text + "': missing closing parenthesis");
    name = strip(s.substr(0, open));
    const std::string arg = strip(s.substr(open + 1, s.size() - open - 2));
    try {
      std::size_t used = 0;
      index = std::stoi(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw ConfigError("target '" + text + "': bad integer argument '" +
                        arg + "'");
    }
    has_index = true;
  }
  if (name == "invasion_prob") {
    if (!has_index || index < 0 || index > 2)
      throw ConfigError("invasion_prob needs a type argument in 0..2");
    return Target::invasion_prob(index);
  }
  if (name == "final_state_freq") return Target::final_state_freq();
  if (name == "sweep_duration_quantiles")
    return Target::sweep_duration_quantiles();
  if (name == "cycle_count_freq") {
    if (!has_index || index < 1)
      throw ConfigError("cycle_count_freq needs a count argument >= 1");
    return Target::cycle_count_freq(index);
  }
  if (name == "cycle_durations") return Target::cycle_durations();
  throw ConfigError("unknown target '" + text + "'");
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "FAIL";
    case Verdict::NotApplicable: return "n/a";
  }
  return "?";
}

const char* to_string(SlackKind kind) {
  switch (kind) {
    case SlackKind::Frequency: return "frequency";
    case SlackKind::Duration: return "duration";
    case SlackKind::Ratio: return "ratio";
  }
  return "?";
}

ExperimentReport run(const ExperimentSpec& spec) {
  if (spec.replicates < 1)
    throw DomainError("experiment: replicates must be >= 1");
  validate(spec.params);
  const auto start_time = std::chrono::steady_clock::now();
  const FitnessSummary summary = fitness_summary(spec.params);
  const std::int64_t level = establishment_level(spec);

  // Materialize the record policy once so every replicate resolves the
  // establishment level exactly.
  SimConfig sim = spec.sim;
  RecordPolicy policy = sim.record_is_default
                            ? default_record_policy(spec.params)
                            : sim.record;
  for (int i = 0; i < 3; ++i) policy.levels[i].push_back(level);
  sim.record = policy;
  sim.record_is_default = false;
  if (spec.conditioning != Condition::None && sim.condition_level == 0)
    sim.condition_level = level;

  const bool need_final =
      wants(spec, Target::Kind::FinalStateFreq) ||
      wants(spec, Target::Kind::SweepDurationQuantiles);
  const bool need_cycles = wants(spec, Target::Kind::CycleCountFreq) ||
                           wants(spec, Target::Kind::CycleDurations);

  std::vector<ReplicateOutcome> outcomes(
      static_cast<std::size_t>(spec.replicates));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    while (true) {
      const int idx = next.fetch_add(1);
      if (idx >= spec.replicates || failed.load()) break;
      try {
        SimConfig rep = sim;
        rep.seed = derive_seed(spec.sim.seed, static_cast<std::uint64_t>(idx));
        ReplicateOutcome out;
        Trajectory traj;
        if (spec.conditioning != Condition::None) {
          ConditionedTrajectory cond = simulate_conditioned(
              spec.params, rep, spec.conditioning, sim.condition_level,
              spec.max_attempts);
          traj = std::move(cond.trajectory);
          out.attempts = cond.attempts;
        } else {
          traj = simulate(spec.params, rep);
        }
        out.budget_exhausted =
            traj.terminal == Trajectory::Terminal::EventBudget;
        for (int i = 0; i < 3; ++i)
          out.established[i] = traj.hit_time(i, level).has_value();
        if (need_final) {
          const PhaseReport phase =
              analyze_phases(traj, spec.analysis, summary);
          out.final_label = phase.final_state.label;
          out.sweep_duration = phase.sweep_duration;
          if (phase.final_state.determined)
            out.entered_at = phase.final_state.entered_at;
        }
        if (need_cycles) {
          const CycleReport cycles = detect_cycles(traj, spec.analysis);
          out.cycle_count = cycles.count;
          for (const Cycle& c : cycles.cycles)
            out.cycle_durations.push_back(c.duration);
        }
        outcomes[static_cast<std::size_t>(idx)] = std::move(out);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  const int workers = std::max(1, std::min(spec.parallelism, spec.replicates));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Single-threaded, index-ordered aggregation.
  ExperimentReport report;
  report.base_seed = spec.sim.seed;
  report.replicates = spec.replicates;
  report.parallelism = spec.parallelism;
  {
    const Regime rg = regime(summary, spec.params.alpha);
    report.regime = std::string(to_string(rg.which)) + ": " + rg.reason;
  }
  switch (spec.conditioning) {
    case Condition::None: report.conditioning = "none"; break;
    case Condition::Mutant1Survives: report.conditioning = "mutant1"; break;
    case Condition::Mutant2Survives: report.conditioning = "mutant2"; break;
    case Condition::BothSurvive: report.conditioning = "both"; break;
  }
  std::int64_t total_attempts = 0;
  for (const ReplicateOutcome& out : outcomes) {
    total_attempts += out.attempts;
    report.budget_exhausted += out.budget_exhausted ? 1 : 0;
  }
  report.acceptance_rate =
      total_attempts > 0
          ? static_cast<double>(spec.replicates) /
                static_cast<double>(total_attempts)
          : 1.0;

  const PredictionContext ctx = make_prediction_context(spec, summary);
  const double log_k =
      std::log(static_cast<double>(spec.params.carrying_capacity));
  const std::size_t n_total = outcomes.size();

  for (const Target& target : spec.targets) {
    switch (target.kind) {
      case Target::Kind::InvasionProb: {
        const int type = target.index;
        std::size_t hits = 0;
        for (const ReplicateOutcome& out : outcomes)
          if (out.established[type]) ++hits;
        Estimate e;
        e.name = to_string(target);
        e.n = static_cast<std::int64_t>(n_total);
        e.value = static_cast<double>(hits) / static_cast<double>(n_total);
        e.ci = wilson_ci(hits, n_total);
        e.slack_kind = SlackKind::Frequency;
        if (spec.conditioning == Condition::None) {
          if (type == 1) {
            e.predicted = spec.sim.mutation1_enabled
                              ? std::max(summary.S[1][0], 0.0) /
                                    summary.params.beta[1]
                              : 0.0;
          } else if (type == 2) {
            try {
              e.predicted =
                  spec.sim.mutation2_enabled
                      ? type2_establishment_probability(
                            summary, spec.params.alpha,
                            spec.sim.mutation1_enabled)
                      : 0.0;
            } catch (const Error&) {
              // no analytic value for this regime
            }
          }
        }
        report.estimates.push_back(std::move(e));
        break;
      }
      case Target::Kind::FinalStateFreq: {
        std::map<std::string, std::size_t> counts;
        for (const ReplicateOutcome& out : outcomes)
          counts[out.final_label] += 1;
        std::map<std::string, double> predicted;
        if (ctx.available && ctx.conditioning_mass > 0.0) {
          for (const Prediction& p : ctx.branches) {
            if (!branch_consistent(p.case_label, spec.conditioning)) continue;
            predicted[label_from_final(p.final_state)] +=
                p.probability / ctx.conditioning_mass;
          }
        }
        std::set<std::string> labels;
        for (const auto& [label, count] : counts) labels.insert(label);
        for (const auto& [label, prob] : predicted) labels.insert(label);
        for (const std::string& label : labels) {
          Estimate e;
          e.name = "final_state_freq(" + label + ")";
          const std::size_t hits =
              counts.count(label) != 0 ? counts.at(label) : 0;
          e.n = static_cast<std::int64_t>(n_total);
          e.value = static_cast<double>(hits) / static_cast<double>(n_total);
          e.ci = wilson_ci(hits, n_total);
          e.slack_kind = SlackKind::Frequency;
          if (predicted.count(label) != 0) e.predicted = predicted.at(label);
          else if (ctx.available) e.predicted = 0.0;
          report.estimates.push_back(std::move(e));
        }
        break;
      }
      case Target::Kind::SweepDurationQuantiles: {
        std::vector<double> sweeps;
        std::vector<double> entries;
        for (const ReplicateOutcome& out : outcomes) {
          if (out.sweep_duration.has_value())
            sweeps.push_back(*out.sweep_duration);
          if (out.entered_at.has_value()) entries.push_back(*out.entered_at);
        }
        std::optional<double> predicted_sweep;
        std::optional<double> predicted_entry;
        if (!spec.sim.mutation2_enabled) {
          try {
            const SweepTiming timing = single_mutant_sweep(summary);
            predicted_entry = timing.entry_coeff * log_k;
            if (timing.full_coeff.has_value())
              predicted_sweep = *timing.full_coeff * log_k;
          } catch (const Error&) {
          }
        } else if (ctx.available) {
          const Prediction* modal = nullptr;
          for (const Prediction& p : ctx.branches) {
            if (!branch_consistent(p.case_label, spec.conditioning)) continue;
            if (modal == nullptr || p.probability > modal->probability)
              modal = &p;
          }
          if (modal != nullptr) {
            if (modal->duration_coeff.has_value())
              predicted_entry = *modal->duration_coeff * log_k;
            if (modal->duration_full_coeff.has_value())
              predicted_sweep = *modal->duration_full_coeff * log_k;
          }
        }
        Estimate sweep;
        sweep.name = "sweep_duration_median";
        sweep.n = static_cast<std::int64_t>(sweeps.size());
        sweep.slack_kind = SlackKind::Duration;
        if (!sweeps.empty()) {
          sweep.value = median(sweeps);
          sweep.ci = bootstrap_quantile_ci(sweeps, 0.5, spec.sim.seed);
        } else {
          sweep.value = kNaN;
          sweep.ci = {kNaN, kNaN};
        }
        sweep.predicted = predicted_sweep;
        report.estimates.push_back(std::move(sweep));

        Estimate entry;
        entry.name = "final_entry_median";
        entry.n = static_cast<std::int64_t>(entries.size());
        entry.slack_kind = SlackKind::Duration;
        if (!entries.empty()) {
          entry.value = median(entries);
          entry.ci = bootstrap_quantile_ci(entries, 0.5, spec.sim.seed + 1);
        } else {
          entry.value = kNaN;
          entry.ci = {kNaN, kNaN};
        }
        entry.predicted = predicted_entry;
        report.estimates.push_back(std::move(entry));
        break;
      }
      case Target::Kind::CycleCountFreq: {
        const int l = target.index;
        std::size_t hits = 0;
        for (const ReplicateOutcome& out : outcomes)
          if (out.cycle_count >= l) ++hits;
        Estimate e;
        e.name = to_string(target);
        e.n = static_cast<std::int64_t>(n_total);
        e.value = static_cast<double>(hits) / static_cast<double>(n_total);
        e.ci = wilson_ci(hits, n_total);
        e.slack_kind = SlackKind::Frequency;
        if (spec.conditioning == Condition::None) {
          try {
            e.predicted = rps_cycle_prediction(summary, spec.params.alpha, l,
                                               spec.params.carrying_capacity)
                              .probability;
          } catch (const Error&) {
          }
        }
        report.estimates.push_back(std::move(e));
        break;
      }
      case Target::Kind::CycleDurations: {
        for (int l = 1; l <= 3; ++l) {
          std::vector<double> durations;
          for (const ReplicateOutcome& out : outcomes)
            if (out.cycle_count >= l)
              durations.push_back(
                  out.cycle_durations[static_cast<std::size_t>(l - 1)]);
          if (durations.empty() && l > 1) break;
          Estimate e;
          e.name = "cycle_duration_median(" + std::to_string(l) + ")";
          e.n = static_cast<std::int64_t>(durations.size());
          e.slack_kind = SlackKind::Duration;
          if (!durations.empty()) {
            e.value = median(durations);
            e.ci = bootstrap_quantile_ci(durations, 0.5,
                                         spec.sim.seed + 10 + l);
          } else {
            e.value = kNaN;
            e.ci = {kNaN, kNaN};
          }
          try {
            e.predicted = rps_cycle_prediction(summary, spec.params.alpha, l,
                                               spec.params.carrying_capacity)
                              .duration;
          } catch (const Error&) {
          }
          report.estimates.push_back(std::move(e));
        }
        for (int l = 1; l <= 2; ++l) {
          std::vector<double> ratios;
          for (const ReplicateOutcome& out : outcomes)
            if (out.cycle_count >= l + 1 &&
                out.cycle_durations[static_cast<std::size_t>(l - 1)] > 0.0)
              ratios.push_back(
                  out.cycle_durations[static_cast<std::size_t>(l)] /
                  out.cycle_durations[static_cast<std::size_t>(l - 1)]);
          Estimate e;
          e.name = "cycle_duration_ratio(" + std::to_string(l + 1) + ":" +
                   std::to_string(l) + ")";
          e.n = static_cast<std::int64_t>(ratios.size());
          e.slack_kind = SlackKind::Ratio;
          if (!ratios.empty()) {
            e.value = median(ratios);
            e.ci = bootstrap_quantile_ci(ratios, 0.5, spec.sim.seed + 20 + l);
          } else {
            e.value = kNaN;
            e.ci = {kNaN, kNaN};
          }
          try {
            const RpsCyclePrediction lo = rps_cycle_prediction(
                summary, spec.params.alpha, l, spec.params.carrying_capacity);
            const RpsCyclePrediction hi =
                rps_cycle_prediction(summary, spec.params.alpha, l + 1,
                                     spec.params.carrying_capacity);
            if (lo.duration > 0.0) e.predicted = hi.duration / lo.duration;
          } catch (const Error&) {
          }
          report.estimates.push_back(std::move(e));
        }
        break;
      }
    }
  }

  verify(report);  // default-policy verdicts travel with the report
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  return report;
}

VerifySummary verify(ExperimentReport& report, const TolerancePolicy& policy) {
  VerifySummary summary;
  std::ostringstream table;
  table << "estimate                              value  95% CI"
           "                n        predicted  verdict\n";
  for (Estimate& e : report.estimates) {
    if (!e.predicted.has_value() || e.n == 0 || std::isnan(e.value)) {
      e.verdict = Verdict::NotApplicable;
      e.tolerance = e.predicted.has_value() ? "no data" : "no prediction";
      table << verdict_line(e);
      continue;
    }
    double slack = 0.0;
    char desc[96];
    switch (e.slack_kind) {
      case SlackKind::Frequency:
        slack = policy.frequency_abs;
        std::snprintf(desc, sizeof(desc), "CI +/- %.3g abs",
                      policy.frequency_abs);
        break;
      case SlackKind::Duration:
        slack = policy.duration_rel * std::abs(*e.predicted);
        std::snprintf(desc, sizeof(desc), "CI +/- %.0f%% of prediction",
                      policy.duration_rel * 100.0);
        break;
      case SlackKind::Ratio:
        slack = policy.ratio_abs;
        std::snprintf(desc, sizeof(desc), "CI +/- %.3g abs",
                      policy.ratio_abs);
        break;
    }
    e.tolerance = desc;
    const bool pass = *e.predicted >= e.ci.lo - slack &&
                      *e.predicted <= e.ci.hi + slack;
    e.verdict = pass ? Verdict::Pass : Verdict::Fail;
    if (!pass) summary.pass = false;
    table << verdict_line(e);
  }
  summary.table = table.str();
  return summary;
}

std::string to_json(const ExperimentReport& report, int indent,
                    bool include_wall_time) {
  nlohmann::json j;
  j["base_seed"] = report.base_seed;
  j["replicates"] = report.replicates;
  j["parallelism"] = report.parallelism;
  j["conditioning"] = report.conditioning;
  j["acceptance_rate"] = report.acceptance_rate;
  j["budget_exhausted"] = report.budget_exhausted;
  j["regime"] = report.regime;
  nlohmann::json estimates = nlohmann::json::array();
  for (const Estimate& e : report.estimates) {
    nlohmann::json je;
    je["name"] = e.name;
    if (!std::isnan(e.value)) je["value"] = e.value;
    if (!std::isnan(e.ci.lo)) je["ci"] = {e.ci.lo, e.ci.hi};
    je["n"] = e.n;
    if (e.predicted.has_value()) je["predicted"] = *e.predicted;
    je["verdict"] = to_string(e.verdict);
    je["slack"] = to_string(e.slack_kind);
    if (!e.tolerance.empty()) je["tolerance"] = e.tolerance;
    estimates.push_back(std::move(je));
  }
  j["estimates"] = std::move(estimates);
  if (include_wall_time) j["wall_time_seconds"] = report.wall_time_seconds;
  return j.dump(indent);
}

}  // namespace clonal
