// Analytic predictions for the two-mutation schedule: interference-regime
// detection, data-driven case decision trees (final state + sweep-duration
// coefficient per outcome branch), effective invasion rates under
// interference, cycle statistics for the rock-paper-scissors pattern, and
// invasion-probability comparisons with/without the first mutation.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clonal/ecology.hpp"

namespace clonal {

// Which interference regime the mutation schedule produces.
//   Mutant1Leads   : both mutants establish during the resident phase and the
//                    first mutant's sweep completes first.
//   Mutant2Leads   : as above but the second mutant's sweep completes first.
//   LateArrival    : the second mutant arrives after the first sweep's
//                    macroscopic phase (alpha > 1/S_10) yet still meets a
//                    surviving or dying trace of the resident.
//   NoInterference : the second mutant either cannot invade or arrives after
//                    the first substitution is complete.
//   Invalid        : S_10 <= 0, or a boundary equality makes the strict
//                    inequalities undecidable.
enum class RegimeKind {
  Mutant1Leads,
  Mutant2Leads,
  LateArrival,
  NoInterference,
  Invalid,
};
const char* to_string(RegimeKind kind);

struct Regime {
  RegimeKind which = RegimeKind::Invalid;
  std::string reason;  // the inequality chain that decided the call
};

// Evaluates the regime inequalities literally (all strict); equalities within
// tol return Invalid with a "boundary" reason.
Regime regime(const FitnessSummary& summary, double alpha,
              double tol = kFeasibilityTol);

struct PredictedFinal {
  enum class Kind {
    Point,                      // a single equilibrium (axis or pair)
    Coexist012,                 // attracting interior equilibrium
    AmbiguousPossiblyPeriodic,  // interior sign pattern; orbit class unknown
    RPSCycles,                  // widening cyclic excursions
  };
  Kind kind = Kind::Point;
  std::optional<Vec3> density;  // the point, or the interior candidate
  std::string simplex_class;    // carrying-simplex class annotation(s)
};
const char* to_string(PredictedFinal::Kind kind);

struct Prediction {
  std::string case_label;  // e.g. "M1L-E", "LATE-I", "M2L-solo1"
  PredictedFinal final_state;
  // Sweep duration ~ coeff * log K: time to enter the eps-ball around the
  // final state.  Absent when the branch cycles instead of settling.
  std::optional<double> duration_coeff;
  // Extinction-complete variant (adds the microscopic die-out tails) where
  // the tail rate is known; absent otherwise.
  std::optional<double> duration_full_coeff;
  double probability = 0.0;  // leading-order branch probability
  std::string notes;
};

// All outcome branches with their leading-order probabilities (sum to 1).
// Preconditions: regime(summary, alpha) is Mutant1Leads, Mutant2Leads or
// LateArrival, else DomainError.  Throws DegenerateError when a needed sign
// is indistinguishable from zero and UnhandledCaseError when a sign pattern
// escapes the decision tables.
std::vector<Prediction> predict(const FitnessSummary& summary, double alpha);

std::string to_json(const std::vector<Prediction>& predictions,
                    int indent = 2);
std::string to_text_table(const std::vector<Prediction>& predictions);

// Timing of the single-mutant substitution (no second mutation): entry into
// the eps-ball at 1/S_10 * log K; when S_01 < 0 the full sweep (resident
// count hits zero) adds 1/|S_01|.  Requires S_10 > 0 (DomainError).
struct SweepTiming {
  double entry_coeff = 0.0;
  std::optional<double> full_coeff;
};
SweepTiming single_mutant_sweep(const FitnessSummary& summary);

// The four interference cases for the second sweep under Mutant1Leads.
//   *VsResident1 : S_01 < 0 (first sweep replaces the resident); the second
//                  mutant chases the growing type-1 population, S = S_21.
//   *VsPair01    : S_01 > 0 (first sweep ends in coexistence); the second
//                  mutant invades the pair, S = S_201.
enum class SpeedupCase {
  SlowdownVsResident1,
  SpeedupVsResident1,
  SlowdownVsPair01,
  SpeedupVsPair01,
};
const char* to_string(SpeedupCase kind);

struct SpeedupResult {
  SpeedupCase which = SpeedupCase::SpeedupVsResident1;
  double s_effective = 0.0;  // modified invasion rate S~_20 of the 2nd sweep
  double s_reference = 0.0;  // the rate S entering the formula
};

// Effective rate of the second sweep under interference:
//   1/S~_20 = 1/S + (1/S_10 - alpha) * (1 - S_20/S).
// Requires regime == Mutant1Leads and the sign block S_02 < 0, S_12 < 0 < S
// (with S_01 deciding the reference); throws CaseMismatchError otherwise,
// also when `expected` is provided and differs from the detected case.
SpeedupResult speedup_fitness(
    const FitnessSummary& summary, double alpha,
    std::optional<SpeedupCase> expected = std::nullopt);

struct RpsCyclePrediction {
  double probability = 0.0;  // P(at least l cycles); independent of l
  double duration = 0.0;     // duration of the l-th cycle (absolute time)
};

// Cycle statistics for the rock-paper-scissors pattern 0 < 1 < 2 < 0.
// Checks the six strict pairwise signs, then the arrival window
//   0 < alpha - 1/S_10 < min(...) - 1/S_21
// term by term; throws ConditionsFailError naming the first violated
// inequality.  l >= 1 (DomainError).
RpsCyclePrediction rps_cycle_prediction(const FitnessSummary& summary,
                                        double alpha, int l,
                                        std::int64_t carrying_capacity);

// Whether clonal interference changes the second mutant's invasion fate.
//   Suppressed : invasion probability with the first mutation present drops
//                to 0 while it would be S_20/beta_2 without it.
//   Enabled    : invasion probability becomes (S/beta_2)(S_10/beta_1) while
//                it would be 0 without the first mutation.
//   None       : no covered condition set applies (valid outcome).
enum class InvasionEffect { Suppressed, Enabled, None };
const char* to_string(InvasionEffect effect);

struct InvasionProbabilityPrediction {
  InvasionEffect which = InvasionEffect::None;
  double with_interference = 0.0;
  double without_interference = 0.0;
  std::string notes;
};
InvasionProbabilityPrediction invasion_probability_prediction(
    const FitnessSummary& summary, double alpha);

// Leading-order probability that the second mutant's line reaches a
// macroscopic size, with or without the first mutation active.  Covers the
// three interference regimes plus the no-interference situations; throws
// DomainError on Invalid.
double type2_establishment_probability(const FitnessSummary& summary,
                                       double alpha, bool with_mutation1);

// The embedded decision-table data file (JSON text, versioned).
const char* case_table_json();

}  // namespace clonal
