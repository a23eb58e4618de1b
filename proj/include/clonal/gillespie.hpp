// Exact stochastic simulation (Gillespie direct method) of the three-type
// competitive birth-death process with the two-mutation schedule:
//   * at t = 0 the population is (floor(nbar_0 K), 1, 0);
//   * at t = alpha * log K a single type-2 individual is injected.
// Six reaction channels: birth/death for each type; death rates carry the
// density-dependent competition term sum_j comp[i][j] * N_j / K.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clonal/ecology.hpp"
#include "clonal/rng.hpp"

namespace clonal {

struct PopulationState {
  std::array<std::int64_t, 3> counts{0, 0, 0};
  double time = 0.0;
};

// Which rows are kept in a trajectory.  The default policy records exact
// first-crossing events for a small per-type level set plus strided samples;
// every_event keeps everything (large!).
struct RecordPolicy {
  bool every_event = false;
  double stride = 0.1;  // <= 0 disables strided sampling
  std::array<std::vector<std::int64_t>, 3> levels{};
};

// Levels {0, 1, floor(eps^2 K), floor(eps K)} for every type plus a band
// {floor((1-eps) nbar_i K), floor(nbar_i K), ceil((1+eps) nbar_i K)} around
// each viable monomorphic equilibrium.
RecordPolicy default_record_policy(const EcologyParams& params,
                                   double eps = 0.1);

// Survival conditions for rejection sampling (and optional early stopping).
enum class Condition {
  None,
  Mutant1Survives,  // type 1 reaches the level before dying out
  Mutant2Survives,  // type 2 reaches the level before dying out
  BothSurvive,      // both mutants reach the level
};

struct SimConfig {
  std::uint64_t seed = 1;
  double horizon = 0.0;          // <= 0: default 50 * log K
  std::uint64_t max_events = 1000000000ULL;
  RecordPolicy record;           // empty level lists => default policy
  bool record_is_default = true; // set false after customizing `record`
  bool mutation2_enabled = true;
  bool mutation1_enabled = true; // false: start without the type-1 mutant
  // Test hook: overrides the initial counts (used by the linear birth-death
  // oracle comparisons); the standard two-mutation schedule still applies.
  std::optional<std::array<std::int64_t, 3>> initial_counts;
  // Optional condition tracking (evaluated while simulating).
  Condition condition = Condition::None;
  std::int64_t condition_level = 0;
  // Stop as soon as the condition outcome is decided (both ways); used by
  // frequency-only experiments to avoid simulating past the decision.
  bool stop_when_decided = false;
  // Per-type absorbing levels: the run stops (Terminal::LevelReached) as soon
  // as any type with stop_level[i] > 0 reaches that count.
  std::array<std::int64_t, 3> stop_level{0, 0, 0};
};

enum class EventKind : std::uint8_t {
  Birth0, Death0, Birth1, Death1, Birth2, Death2, Inject2, Sample
};
const char* to_string(EventKind kind);

struct TrajectorySample {
  double time = 0.0;
  std::array<std::int64_t, 3> counts{0, 0, 0};
  EventKind event = EventKind::Sample;
};

struct Trajectory {
  enum class Terminal {
    AllExtinct,
    HorizonReached,
    EventBudget,
    ConditionDecided,  // early stop requested via stop_when_decided
    LevelReached,      // a stop_level threshold was hit
  };
  std::vector<TrajectorySample> samples;
  bool every_event = false;  // copied from the record policy
  Terminal terminal = Terminal::HorizonReached;
  std::optional<double> injected2_at;
  PopulationState final_state;
  std::uint64_t event_count = 0;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::int64_t carrying_capacity = 0;  // copied from the parameters
  // Exact first time each recorded level was hit, per type; parallel to the
  // record policy's level lists.
  std::array<std::vector<std::int64_t>, 3> levels;
  std::array<std::vector<double>, 3> level_hit_times;  // NaN if never hit
  // Time after which the type's count is identically zero up to the
  // terminal (0 when the type was never alive); NaN while the type is
  // alive at the terminal.
  std::array<double, 3> extinct_at{};
  // Condition outcome when tracking was requested.
  enum class ConditionStatus { NotTracked, Undecided, Met, Failed };
  ConditionStatus condition_status = ConditionStatus::NotTracked;
  double condition_decided_at = 0.0;

  // First exact hit time of `level` by type i, if that level was recorded.
  std::optional<double> hit_time(int type, std::int64_t level) const;
};
const char* to_string(Trajectory::Terminal terminal);

// Initial population (floor(nbar_0 K), 1, 0); throws NonviableResidentError
// when nbar_0 <= 0.
PopulationState initial_state(const EcologyParams& params);

// One exact trajectory; identical (params, config) give a bit-identical
// result.  Horizon / event-budget exhaustion is reported in `terminal`,
// never thrown.
Trajectory simulate(const EcologyParams& params, const SimConfig& config);

struct ConditionedTrajectory {
  Trajectory trajectory;
  int attempts = 0;  // total runs including the accepted one
};

// Rejection sampling: re-runs with seeds derived from config.seed until the
// condition holds (mutants reach `level` before dying out).  Throws
// RejectionBudgetError after max_attempts failures.
ConditionedTrajectory simulate_conditioned(const EcologyParams& params,
                                           const SimConfig& config,
                                           Condition condition,
                                           std::int64_t level,
                                           int max_attempts = 200);

// CSV with header "t,n0,n1,n2,event".
std::string to_csv(const Trajectory& trajectory);

}  // namespace clonal
