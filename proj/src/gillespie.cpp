#include "clonal/gillespie.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace clonal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> levels) {
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Birth0: return "b0";
    case EventKind::Death0: return "d0";
    case EventKind::Birth1: return "b1";
    case EventKind::Death1: return "d1";
    case EventKind::Birth2: return "b2";
    case EventKind::Death2: return "d2";
    case EventKind::Inject2: return "inj2";
    case EventKind::Sample: return "sample";
  }
  return "?";
}

const char* to_string(Trajectory::Terminal terminal) {
  switch (terminal) {
    case Trajectory::Terminal::AllExtinct: return "all_extinct";
    case Trajectory::Terminal::HorizonReached: return "horizon_reached";
    case Trajectory::Terminal::EventBudget: return "event_budget";
    case Trajectory::Terminal::ConditionDecided: return "condition_decided";
    case Trajectory::Terminal::LevelReached: return "level_reached";
  }
  return "?";
}

RecordPolicy default_record_policy(const EcologyParams& params, double eps) {
  RecordPolicy policy;
  const double k = static_cast<double>(params.carrying_capacity);
  for (int i = 0; i < 3; ++i) {
    std::vector<std::int64_t> levels{0, 1};
    const auto add = [&](double value) {
      const auto level = static_cast<std::int64_t>(value);
      if (level >= 2) levels.push_back(level);
    };
    add(std::floor(eps * eps * k));
    add(std::floor(eps * k));
    const double nbar = monomorphic_equilibrium(params, i);
    if (nbar > 0.0) {
      add(std::floor((1.0 - eps) * nbar * k));
      add(std::floor(nbar * k));
      add(std::ceil((1.0 + eps) * nbar * k));
    }
    policy.levels[i] = sorted_unique(std::move(levels));
  }
  return policy;
}

std::optional<double> Trajectory::hit_time(int type, std::int64_t level) const {
  const auto& lv = levels[type];
  const auto it = std::lower_bound(lv.begin(), lv.end(), level);
  if (it == lv.end() || *it != level) return std::nullopt;
  const double t = level_hit_times[type][it - lv.begin()];
  if (std::isnan(t)) return std::nullopt;
  return t;
}

PopulationState initial_state(const EcologyParams& params) {
  const double nbar0 = monomorphic_equilibrium(params, 0);
  if (!(nbar0 > 0.0))
    throw NonviableResidentError(
        "initial_state: resident equilibrium density is not positive");
  PopulationState state;
  state.counts = {static_cast<std::int64_t>(
                      std::floor(nbar0 * static_cast<double>(
                                             params.carrying_capacity))),
                  1, 0};
  state.time = 0.0;
  return state;
}

namespace {

// Mutable condition-tracking state evaluated inline during simulation.
struct ConditionTracker {
  Condition kind = Condition::None;
  std::int64_t level = 0;
  bool m1_met = false, m1_failed = false;
  bool m2_met = false, m2_failed = false;
  bool injected = false;

  bool decided(Trajectory::ConditionStatus& status) const {
    switch (kind) {
      case Condition::None:
        return false;
      case Condition::Mutant1Survives:
        if (m1_met) { status = Trajectory::ConditionStatus::Met; return true; }
        if (m1_failed) { status = Trajectory::ConditionStatus::Failed; return true; }
        return false;
      case Condition::Mutant2Survives:
        if (m2_met) { status = Trajectory::ConditionStatus::Met; return true; }
        if (m2_failed) { status = Trajectory::ConditionStatus::Failed; return true; }
        return false;
      case Condition::BothSurvive:
        if (m1_failed || m2_failed) {
          status = Trajectory::ConditionStatus::Failed;
          return true;
        }
        if (m1_met && m2_met) {
          status = Trajectory::ConditionStatus::Met;
          return true;
        }
        return false;
    }
    return false;
  }

  void observe(int type, std::int64_t count) {
    if (type == 1) {
      if (count >= level) m1_met = true;
      if (count == 0 && !m1_met) m1_failed = true;
    } else if (type == 2) {
      if (count >= level) m2_met = true;
      if (count == 0 && injected && !m2_met) m2_failed = true;
    }
  }
};

}  // namespace

Trajectory simulate(const EcologyParams& params, const SimConfig& config) {
  validate(params);
  const double log_k =
      std::log(static_cast<double>(params.carrying_capacity));
  const double horizon =
      config.horizon > 0.0 ? config.horizon : 50.0 * std::max(log_k, 1.0);
  const RecordPolicy policy = config.record_is_default
                                  ? default_record_policy(params)
                                  : config.record;

  Trajectory traj;
  traj.seed = config.seed;
  traj.horizon = horizon;
  traj.every_event = policy.every_event;
  traj.extinct_at = {kNaN, kNaN, kNaN};
  traj.carrying_capacity = params.carrying_capacity;
  for (int i = 0; i < 3; ++i) {
    traj.levels[i] = sorted_unique(policy.levels[i]);
    traj.level_hit_times[i].assign(traj.levels[i].size(), kNaN);
  }

  PopulationState state = initial_state(params);
  if (!config.mutation1_enabled) state.counts[1] = 0;
  if (config.initial_counts.has_value()) state.counts = *config.initial_counts;

  Xoshiro256pp rng(config.seed);
  const double inv_k = 1.0 / static_cast<double>(params.carrying_capacity);
  const double t_inject = params.alpha * log_k;
  bool injection_pending = config.mutation2_enabled;

  ConditionTracker tracker;
  tracker.kind = config.condition;
  tracker.level = config.condition_level;
  if (tracker.kind != Condition::None)
    traj.condition_status = Trajectory::ConditionStatus::Undecided;

  double next_stride =
      policy.stride > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();

  auto emit = [&](double t, EventKind kind) {
    traj.samples.push_back({t, state.counts, kind});
  };
  // Strided samples use the pre-transition counts, which are the state
  // values throughout (previous_event_time, next_transition_time).
  auto emit_strides_until = [&](double t_next) {
    while (next_stride <= t_next && next_stride <= horizon) {
      emit(next_stride, EventKind::Sample);
      next_stride += policy.stride;
    }
  };
  auto record_level_hit = [&](int type, double t) {
    const auto& lv = traj.levels[type];
    const auto it =
        std::lower_bound(lv.begin(), lv.end(), state.counts[type]);
    if (it != lv.end() && *it == state.counts[type]) {
      double& slot = traj.level_hit_times[type][it - lv.begin()];
      if (std::isnan(slot)) slot = t;
      return true;
    }
    return false;
  };
  // Record the initial state and any level it already sits on.
  emit(0.0, EventKind::Sample);
  if (policy.stride > 0.0) next_stride = policy.stride;
  for (int i = 0; i < 3; ++i) {
    record_level_hit(i, 0.0);
    if (state.counts[i] == 0) traj.extinct_at[i] = 0.0;
  }
  if (tracker.kind != Condition::None)
    for (int i = 1; i < 3; ++i) tracker.observe(i, state.counts[i]);

  // Injection scheduled exactly at t=0 (alpha = 0) happens before any event.
  const auto all_extinct = [&]() {
    return state.counts[0] == 0 && state.counts[1] == 0 &&
           state.counts[2] == 0;
  };

  const bool has_stop_level = config.stop_level[0] > 0 ||
                              config.stop_level[1] > 0 ||
                              config.stop_level[2] > 0;
  const auto stop_level_hit = [&]() {
    for (int i = 0; i < 3; ++i)
      if (config.stop_level[i] > 0 && state.counts[i] >= config.stop_level[i])
        return true;
    return false;
  };

  traj.terminal = Trajectory::Terminal::HorizonReached;
  if (has_stop_level && stop_level_hit())
    traj.terminal = Trajectory::Terminal::LevelReached;
  while (traj.terminal != Trajectory::Terminal::LevelReached) {
    if (all_extinct()) {
      traj.terminal = Trajectory::Terminal::AllExtinct;
      break;
    }
    if (traj.event_count >= config.max_events) {
      traj.terminal = Trajectory::Terminal::EventBudget;
      break;
    }

    double rates[6];
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double n = static_cast<double>(state.counts[i]);
      double pressure = params.delta[i];
      for (int j = 0; j < 3; ++j)
        pressure += params.comp[i][j] * static_cast<double>(state.counts[j]) *
                    inv_k;
      rates[2 * i] = params.beta[i] * n;
      rates[2 * i + 1] = pressure * n;
      total += rates[2 * i] + rates[2 * i + 1];
    }

    double t_next =
        total > 0.0 ? state.time + rng.next_exponential(total)
                    : std::numeric_limits<double>::infinity();

    if (injection_pending && t_next >= t_inject && t_inject <= horizon) {
      // The memoryless property makes discarding the drawn event exact.
      emit_strides_until(t_inject);
      state.time = t_inject;
      assert(state.counts[2] == 0 &&
             "mutant-2 injection must find an empty type-2 population");
      state.counts[2] += 1;
      traj.extinct_at[2] = kNaN;
      injection_pending = false;
      tracker.injected = true;
      traj.injected2_at = t_inject;
      record_level_hit(2, t_inject);
      emit(t_inject, EventKind::Inject2);
      if (tracker.kind != Condition::None) tracker.observe(2, state.counts[2]);
    } else if (t_next > horizon) {
      emit_strides_until(horizon);
      state.time = horizon;
      traj.terminal = Trajectory::Terminal::HorizonReached;
      break;
    } else {
      emit_strides_until(t_next);
      state.time = t_next;
      traj.event_count += 1;

      const double pick = rng.next_uniform() * total;
      double acc = 0.0;
      int channel = 5;
      for (int c = 0; c < 6; ++c) {
        acc += rates[c];
        if (pick <= acc) {
          channel = c;
          break;
        }
      }
      const int type = channel / 2;
      const bool is_birth = (channel % 2) == 0;
      state.counts[type] += is_birth ? 1 : -1;
      if (state.counts[type] == 0) traj.extinct_at[type] = t_next;

      static constexpr EventKind kKinds[6] = {
          EventKind::Birth0, EventKind::Death0, EventKind::Birth1,
          EventKind::Death1, EventKind::Birth2, EventKind::Death2};
      const bool level_hit = record_level_hit(type, t_next);
      if (policy.every_event || level_hit) emit(t_next, kKinds[channel]);
      if (tracker.kind != Condition::None)
        tracker.observe(type, state.counts[type]);
    }

    if (has_stop_level && stop_level_hit()) {
      traj.terminal = Trajectory::Terminal::LevelReached;
      break;
    }

    if (tracker.kind != Condition::None) {
      Trajectory::ConditionStatus status = Trajectory::ConditionStatus::Undecided;
      if (tracker.decided(status)) {
        traj.condition_status = status;
        if (traj.condition_decided_at == 0.0)
          traj.condition_decided_at = state.time;
        if (config.stop_when_decided) {
          traj.terminal = Trajectory::Terminal::ConditionDecided;
          break;
        }
        // Keep simulating but stop re-evaluating a decided condition.
        tracker.kind = Condition::None;
      }
    }
  }

  traj.final_state = state;
  return traj;
}

ConditionedTrajectory simulate_conditioned(const EcologyParams& params,
                                           const SimConfig& config,
                                           Condition condition,
                                           std::int64_t level,
                                           int max_attempts) {
  if (condition == Condition::None)
    throw std::invalid_argument("simulate_conditioned: condition required");
  if (level < 1)
    throw std::invalid_argument("simulate_conditioned: level must be >= 1");
  SimConfig attempt_config = config;
  attempt_config.condition = condition;
  attempt_config.condition_level = level;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    attempt_config.seed = derive_seed(config.seed, attempt);
    // Failed attempts can stop at the decision; the accepted one must run in
    // full, so a success under early stopping is re-run with the same seed.
    attempt_config.stop_when_decided = true;
    Trajectory probe = simulate(params, attempt_config);
    if (probe.condition_status != Trajectory::ConditionStatus::Met) continue;
    ConditionedTrajectory out;
    if (config.stop_when_decided) {
      out.trajectory = std::move(probe);
    } else {
      attempt_config.stop_when_decided = false;
      out.trajectory = simulate(params, attempt_config);
    }
    out.attempts = attempt + 1;
    return out;
  }
  throw RejectionBudgetError(
      "simulate_conditioned: no accepted trajectory within " +
      std::to_string(max_attempts) + " attempts");
}

std::string to_csv(const Trajectory& trajectory) {
  std::ostringstream oss;
  oss << "t,n0,n1,n2,event\n";
  char line[192];
  for (const TrajectorySample& s : trajectory.samples) {
    std::snprintf(line, sizeof(line), "%.17g,%lld,%lld,%lld,%s\n", s.time,
                  static_cast<long long>(s.counts[0]),
                  static_cast<long long>(s.counts[1]),
                  static_cast<long long>(s.counts[2]), to_string(s.event));
    oss << line;
  }
  return oss.str();
}

}  // namespace clonal
