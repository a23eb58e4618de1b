// Deterministic competitive Lotka-Volterra dynamics in two or three
// dimensions: adaptive integration, settling times, qualitative
// classification of the long-run outcome, permanence and diagonal
// Lyapunov-stability certificates.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "clonal/ecology.hpp"

namespace clonal {

// dz_c/dt = z_c * (growth_c - sum_b comp[c][b] * z_b), c = 0..dim-1.
// type_labels maps system coordinates to model type indices.
struct LVSystem {
  int dim = 3;
  std::array<double, 3> growth{};
  Mat3 comp{};
  std::array<int, 3> type_labels{0, 1, 2};
};

// Builds the LV system induced by the model parameters on a subset of types
// (in increasing type order).
LVSystem lv_subsystem(const EcologyParams& params,
                      const std::vector<int>& types);

struct ODESolution {
  enum class Terminal { Converged, HorizonReached };
  std::vector<double> times;                  // strictly increasing
  std::vector<std::array<double, 3>> states;  // padded with 0 beyond dim
  Terminal terminal = Terminal::HorizonReached;
  LVSystem system;

  // State at an arbitrary time within the solved range (linear
  // interpolation between accepted steps).
  std::array<double, 3> at(double t) const;
};

// CSV with header t,n0,n1,n2; coordinates are placed in their type-label
// columns, absent types print 0.  `stride` > 0 resamples at that spacing,
// otherwise one row per accepted step.
std::string to_csv(const ODESolution& solution, double stride = 0.0);

// Adaptive embedded Runge-Kutta integration (Dormand-Prince 4(5)).
// Coordinates exactly 0 at the start remain exactly 0 (axes are invariant).
// Throws StepFailureError when the controller cannot meet the tolerance.
ODESolution integrate(const LVSystem& sys, const std::array<double, 3>& z0,
                      double horizon, double rel_tol = 1e-8,
                      double max_step = 0.0);

// Unique stable equilibrium of a 2D system: the coexistence point when both
// invasion fitnesses are positive, the winner's axis point under dominance.
// Throws DegenerateError (vanishing denominator) or DomainError (bistable
// pattern: no unique stable point).
std::array<double, 2> stable_equilibrium_2d(const LVSystem& sys);

// First time after which the 2D solution from z0 stays within eps^2 of the
// stable equilibrium in L1 distance.  "Stays" is verified over a window of
// 10x the entry time, capped by `horizon`.  Throws NotSettledError when the
// trajectory never enters and remains inside before the horizon.
double time_to_equilibrium(const LVSystem& sys, const std::array<double, 2>& z0,
                           double eps, double horizon = 1000.0);

// Supremum of time_to_equilibrium over a grid covering the initial-condition
// ball of a just-arrived invader against resident type 0:
//   |z_res - nbar_0| <= 3*eps*(comp[0][1]+comp[0][2])/comp[0][0],
//   eps/2 <= z_inv <= eps.
// Requires S_{invader,0} > 0.
double worst_case_settling(const EcologyParams& params, int invader,
                           double eps, int grid_points = 5);

struct FixedPointInfo {
  enum class Kind { Axis, Planar, Interior };
  Kind kind = Kind::Axis;
  std::vector<int> types;      // types with positive density
  Vec3 location{};             // full 3D coordinates
  bool stable = false;         // local stability in the nonnegative orthant
};

struct QualitativeOutcome {
  enum class Kind {
    GlobalExclusion,           // single stable monomorphic equilibrium
    PlanarCoexistence,         // single stable two-type equilibrium
    InteriorCoexistence,       // all pairs coexist, feasible interior point
    Bistable,                  // several stable boundary points
    AmbiguousPossiblyPeriodic  // interior point with mixed signs; cycles or
                               // convergence cannot be decided by signs alone
  };
  Kind kind = Kind::AmbiguousPossiblyPeriodic;
  std::vector<FixedPointInfo> fixed_points;
  int winner = -1;                    // GlobalExclusion only
  std::array<int, 2> pair{-1, -1};    // PlanarCoexistence only
  std::vector<int> attractor_indices; // indices into fixed_points (stable ones)
  std::optional<bool> permanent;      // filled when the cyclic pattern holds
  std::optional<Vec3> vl_certificate; // diagonal weights when found
  std::string sign_pattern;           // e.g. "S10:+ S01:- ..."
  std::string note;
};

const char* to_string(QualitativeOutcome::Kind kind);

// Maps the invasion-fitness sign pattern to the qualitative outcome.  All
// monomorphic equilibria must be viable (nbar_i > 0).  Throws DegenerateError
// when a sign is indistinguishable from zero or the interior linear system is
// singular.
QualitativeOutcome classify(const FitnessSummary& summary,
                            double sign_tol = kFeasibilityTol);

// Permanence criterion for the cyclic pattern 0<1<2<0
// (S_01<0<S_10, S_12<0<S_21, S_20<0<S_02):
//   |S_01 S_12 S_20| < S_02 S_21 S_10.
// Throws WrongSignPatternError when the pattern does not hold.
bool permanence_check(const FitnessSummary& summary);

// Searches for diagonal weights d > 0 (d_0 = 1) making the symmetric part of
// diag(d)*comp positive definite; verification is exact via leading principal
// minors.  Returns nullopt when the grid + refinement search fails (the
// search is sound but incomplete).
std::optional<Vec3> vl_certificate(const Mat3& comp);

// Exact check that sym(diag(d)*comp) is positive definite.
bool vl_verify(const Mat3& comp, const Vec3& d);

// Solves comp * x = rho for the interior fixed point of the rescaled flow.
// Returns the solution whether or not it is feasible or stable; nullopt when
// the linear system is singular at the given tolerance.
std::optional<Vec3> interior_equilibrium(const EcologyParams& params,
                                         double tol = kFeasibilityTol);

}  // namespace clonal
