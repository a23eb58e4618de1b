// Model parameters and closed-form fitness / equilibrium algebra for the
// three-type competitive birth-death model.
//
// Conventions used throughout the library:
//   * types are indexed 0, 1, 2; type 0 is the wild type;
//   * comp[i][j] is the competitive pressure exerted by one j-individual on
//     an i-individual's death rate (scaled by 1/K inside the simulator);
//   * rho_i    = beta_i - delta_i          (net growth rate of a rare type)
//   * nbar_i   = rho_i / comp[i][i]        (monomorphic equilibrium density)
//   * S[i][j]  = beta_i - delta_i - comp[i][j] * nbar_j
//                (invasion fitness of a rare type-i in a resident-j
//                 population at equilibrium).
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "clonal/errors.hpp"

namespace clonal {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Tolerance used for strict-positivity / nonzero-denominator decisions.
inline constexpr double kFeasibilityTol = 1e-12;

struct EcologyParams {
  Vec3 beta{};                 // per-type individual birth rates
  Vec3 delta{};                // per-type natural death rates
  Mat3 comp{};                 // competition matrix (row = affected type)
  std::int64_t carrying_capacity = 1000;  // scaling parameter K
  double alpha = 0.0;          // mutation 2 arrives at time alpha * log K

  double rho(int i) const { return beta[i] - delta[i]; }
};

// Throws std::invalid_argument when a field violates its validity range
// (beta_i > 0, delta_i >= 0, comp_ij > 0, K >= 1, alpha >= 0).
void validate(const EcologyParams& params);

// Equilibrium density of a pure type-i population; may be <= 0 when
// rho_i <= 0 (the caller decides viability).
double monomorphic_equilibrium(const EcologyParams& params, int i);

// Invasion fitness S_ij of a rare type-i individual in a resident type-j
// population at its equilibrium density.  S_ii = 0 up to rounding.
double invasion_fitness(const EcologyParams& params, int i, int j);

// Two-type coexistence equilibrium of types (i, j).
struct PairEquilibrium {
  enum class Status {
    Feasible,               // both coordinates strictly positive
    NonpositiveCoordinate,  // system solvable but not in the open quadrant
    Degenerate,             // comp_ii*comp_jj == comp_ij*comp_ji
  };
  Status status = Status::Degenerate;
  double n_i = 0.0;  // density of type i at the joint equilibrium
  double n_j = 0.0;  // density of type j at the joint equilibrium

  bool feasible() const { return status == Status::Feasible; }
};
PairEquilibrium coexistence_equilibrium(const EcologyParams& params, int i,
                                        int j, double tol = kFeasibilityTol);

// Invasion fitness of type k against the coexisting (i, j) pair; symmetric
// in (i, j).  Throws PairInfeasibleError when the pair equilibrium does not
// exist.
double trimorphic_fitness(const EcologyParams& params, int k, int i, int j,
                          double tol = kFeasibilityTol);

// All closed-form quantities in one bundle.
struct FitnessSummary {
  EcologyParams params;
  Vec3 rho{};
  Vec3 nbar{};
  Mat3 S{};       // S[i][j]; diagonal forced to exactly 0
  Mat3 ctilde{};  // ctilde[i][j] = comp[i][j] / comp[j][j]
  // pair_eq[i][j]: (density of i, density of j) at the (i,j) equilibrium
  // when feasible; mirror-symmetric.  Infeasible pairs stay disengaged
  // (absent), never NaN.
  std::array<std::array<std::optional<std::array<double, 2>>, 3>, 3> pair_eq{};
  std::array<std::array<PairEquilibrium::Status, 3>, 3> pair_status{};
  // s_tri[k] = fitness of type k against the coexisting pair of the other
  // two types; absent when that pair has no feasible equilibrium.
  std::array<std::optional<double>, 3> s_tri{};
};
FitnessSummary fitness_summary(const EcologyParams& params,
                               double tol = kFeasibilityTol);

// JSON serialization with fixed field names
// (rho, nbar, nbar_pair, S, S_tri, ctilde).
std::string to_json(const FitnessSummary& summary, int indent = 2);

// Competitive order between two types:
//   FirstPrecedes  : i "loses" to j   (S_ij < 0 < S_ji)
//   SecondPrecedes : j "loses" to i   (S_ji < 0 < S_ij)
//   Equivalent     : S_ij * S_ji >= 0 (coexistence, bistability or ties)
enum class PairRelation { FirstPrecedes, SecondPrecedes, Equivalent };
PairRelation pairwise_order(const EcologyParams& params, int i, int j);
const char* to_string(PairRelation relation);

// Competition-bound regimes for the order relation when every rescaled
// competition ratio ctilde[i][j] (i != j) lies in [C1, C2]:
//   ForcedTransitive  : every realizable order is transitive
//   WeaklyTransitive  : transitive orders are realizable (weaker condition)
//   CycleConstructible: a 3-cycle order is constructible (iff C1 < 1 < C2)
//   None              : none of the strict conditions holds (boundary cases)
enum class TransitivityRegime {
  ForcedTransitive,
  WeaklyTransitive,
  CycleConstructible,
  None,
};
TransitivityRegime transitivity_regime(double c1, double c2);
const char* to_string(TransitivityRegime regime);

// Builds parameters whose pairwise order is the 3-cycle 0 < 1 < 2 < 0 using
// the cyclic recipe
//   comp[i+1][i] = eta   * (rho_{i+1}/rho_i) * cdiag_i,
//   comp[i][i+1] = (1+eta) * (rho_i/rho_{i+1}) * cdiag_{i+1}   (indices mod 3)
// with beta = rho and delta = 0.  Requires C1 < 1 < C2 together with the
// eta window 0 < eta < min(1, C2, 1/C1) and
// (min(C2, 1/C1) - eta)^2 > C1, (min(C2, 1/C1) - eta)^{-2} < C2; throws
// InvalidEtaError otherwise.  The cyclic order of the result is verified
// before returning.
EcologyParams build_rps_parameters(double c1, double c2, double eta,
                                   const Vec3& rho, const Vec3& cdiag,
                                   std::int64_t carrying_capacity = 1000,
                                   double alpha = 0.0);

}  // namespace clonal
