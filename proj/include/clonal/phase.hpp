// Post-processing of simulated trajectories into observables: hitting times,
// stochastic/deterministic phase segmentation, final-state detection with
// entry times, invasion persistence checks, and cycle statistics for the
// rock-paper-scissors pattern.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clonal/ecology.hpp"
#include "clonal/gillespie.hpp"

namespace clonal {

struct AnalysisConfig {
  // Phase threshold: a type with 0 < N_i < eps * K is microscopic.
  double eps = 0.1;
  // Duration over which the final-state ball must hold; <= 0 uses 3 * log K.
  double final_window = 0.0;
  // Minimal peak prominence (individuals) for cycle detection; <= 0 uses
  // max(floor(eps^2 * K), 5).
  double prominence = 0.0;
  // Moving-average half-width (time units) applied to the strided series
  // before peak detection; raw +/-1 jumps make every sample an extremum.
  double smoothing = 0.5;
};

// First time N_i equals `level` exactly.  Resolution order: the initial
// state, the exact recorded level-crossing table, then a full scan when the
// trajectory recorded every event.  Absent when the level was never hit;
// InsufficientRecordingError when the recording policy cannot resolve it.
std::optional<double> hitting_time(const Trajectory& trajectory, int type,
                                   std::int64_t level);

struct DetectedFinal {
  bool determined = false;
  // "origin", "n0", "n1", "n2", "pair01", "pair02", "pair12", "interior",
  // or "undetermined".
  std::string label = "undetermined";
  Vec3 density{0.0, 0.0, 0.0};
  // Earliest time from which the trajectory stays within the ball up to the
  // terminal (entry-and-hold); NaN when undetermined.
  double entered_at = 0.0;
  // First time the trajectory touched the ball; NaN when undetermined.
  double ball_entry = 0.0;
  std::string note;
};

// Tests the analytic equilibria (origin, viable axis points, feasible pairs,
// interior point) for L1-ball containment of N/K with radius cfg.eps over
// the trailing final_window.  Returns the unique candidate that holds;
// several candidates or none -> undetermined.  Total extinction is accepted
// regardless of the window (the state is absorbing).
DetectedFinal detect_final_state(const Trajectory& trajectory,
                                 const AnalysisConfig& config,
                                 const FitnessSummary& summary);

// True iff N_i(t) > floor * K at every recorded time in
// [from_time, terminal]; false when the window contains no samples.
// floor must be > 0 (DomainError).
bool detect_invasion(const Trajectory& trajectory, int type, double floor,
                     double from_time);

struct Cycle {
  double start = 0.0;
  double end = 0.0;
  double duration = 0.0;
};

struct CycleReport {
  std::vector<Cycle> cycles;
  int count = 0;
};

// A cycle is the interval between two consecutive prominent local maxima of
// the type-1 series that contains at least one prominent local maximum of
// the type-0 series and one of the type-2 series.  Peaks are detected on
// the smoothed strided samples with the scipy prominence convention.
CycleReport detect_cycles(const Trajectory& trajectory,
                          const AnalysisConfig& config);

struct PhaseSegment {
  enum class Kind { Stochastic, Deterministic };
  Kind kind = Kind::Deterministic;
  std::array<bool, 3> microscopic{};  // types with 0 < N_i < eps * K
  double start = 0.0;
  double end = 0.0;
};
const char* to_string(PhaseSegment::Kind kind);

struct HittingRecord {
  int type = 0;
  std::int64_t level = 0;
  double time = 0.0;
};

struct PhaseReport {
  std::uint64_t seed = 0;
  std::string terminal;
  double terminal_time = 0.0;
  std::vector<HittingRecord> hitting_times;  // recorded levels that were hit
  std::vector<PhaseSegment> phases;          // tile [0, terminal_time]
  DetectedFinal final_state;
  // First touch of the final-state ball; absent when undetermined.
  std::optional<double> ball_entry_time;
  // Extinction-complete sweep duration: entry-and-hold time of the final
  // ball or the last extinction among the final state's zero coordinates,
  // whichever is later.  Absent when undetermined or when a zero-coordinate
  // type is still alive at the terminal.
  std::optional<double> sweep_duration;
};

PhaseReport analyze_phases(const Trajectory& trajectory,
                           const AnalysisConfig& config,
                           const FitnessSummary& summary);

std::string to_json(const PhaseReport& report, int indent = 2);
std::string to_json(const CycleReport& report, int indent = 2);

// Single-row CSV (with header) for cross-replicate aggregation; the cycle
// report contributes its count and first-cycle duration when provided.
std::string to_csv_row(const PhaseReport& report,
                       const CycleReport* cycles = nullptr);

}  // namespace clonal
