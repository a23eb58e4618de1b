#include "clonal/lv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace clonal {
namespace {

using State = std::array<double, 3>;

State rhs(const LVSystem& sys, const State& z) {
  State out{0.0, 0.0, 0.0};
  for (int c = 0; c < sys.dim; ++c) {
    double pressure = 0.0;
    for (int b = 0; b < sys.dim; ++b) pressure += sys.comp[c][b] * z[b];
    out[c] = z[c] * (sys.growth[c] - pressure);
  }
  return out;
}

double inf_norm(const State& z, int dim) {
  double m = 0.0;
  for (int c = 0; c < dim; ++c) m = std::max(m, std::abs(z[c]));
  return m;
}

// Solves M x = r by Gaussian elimination with partial pivoting; nullopt when
// the pivot collapses relative to the matrix scale.
std::optional<Vec3> solve3(const Mat3& m_in, const Vec3& r_in, double tol) {
  double a[3][4];
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      a[i][j] = m_in[i][j];
      scale = std::max(scale, std::abs(m_in[i][j]));
    }
    a[i][3] = r_in[i];
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    if (std::abs(a[pivot][col]) <= tol * scale) return std::nullopt;
    if (pivot != col)
      for (int j = 0; j < 4; ++j) std::swap(a[pivot][j], a[col][j]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = a[row][col] / a[col][col];
      for (int j = col; j < 4; ++j) a[row][j] -= f * a[col][j];
    }
  }
  Vec3 x{};
  for (int row = 2; row >= 0; --row) {
    double acc = a[row][3];
    for (int j = row + 1; j < 3; ++j) acc -= a[row][j] * x[j];
    x[row] = acc / a[row][row];
  }
  return x;
}

}  // namespace

LVSystem lv_subsystem(const EcologyParams& params,
                      const std::vector<int>& types) {
  if (types.empty() || types.size() > 3)
    throw std::invalid_argument("lv_subsystem: need 1..3 types");
  std::vector<int> sorted = types;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("lv_subsystem: duplicate type");
  LVSystem sys;
  sys.dim = static_cast<int>(sorted.size());
  for (int c = 0; c < sys.dim; ++c) {
    const int t = sorted[c];
    if (t < 0 || t > 2) throw std::invalid_argument("lv_subsystem: bad type");
    sys.type_labels[c] = t;
    sys.growth[c] = params.rho(t);
    for (int b = 0; b < sys.dim; ++b) sys.comp[c][b] = params.comp[t][sorted[b]];
  }
  return sys;
}

std::array<double, 3> ODESolution::at(double t) const {
  if (times.empty()) throw std::logic_error("ODESolution::at: empty solution");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c)
    out[c] = (1.0 - w) * states[lo][c] + w * states[hi][c];
  return out;
}

std::string to_csv(const ODESolution& solution, double stride) {
  std::ostringstream oss;
  oss << "t,n0,n1,n2\n";
  char line[160];
  auto emit = [&](double t, const State& z) {
    double cols[3] = {0.0, 0.0, 0.0};
    for (int c = 0; c < solution.system.dim; ++c)
      cols[solution.system.type_labels[c]] = z[c];
    std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g\n", t, cols[0],
                  cols[1], cols[2]);
    oss << line;
  };
  if (stride > 0.0) {
    const double t_end = solution.times.back();
    for (double t = 0.0; t <= t_end + 1e-12; t += stride)
      emit(std::min(t, t_end), solution.at(std::min(t, t_end)));
  } else {
    for (std::size_t k = 0; k < solution.times.size(); ++k)
      emit(solution.times[k], solution.states[k]);
  }
  return oss.str();
}

ODESolution integrate(const LVSystem& sys, const std::array<double, 3>& z0,
                      double horizon, double rel_tol, double max_step) {
  if (!(horizon > 0.0)) throw std::invalid_argument("integrate: horizon <= 0");
  for (int c = 0; c < sys.dim; ++c)
    if (!(z0[c] >= 0.0)) throw std::invalid_argument("integrate: z0 < 0");

  // Dormand-Prince 4(5) coefficients.
  static constexpr double kC[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static constexpr double kA[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double kB5[7] = {35.0 / 384,    0.0,         500.0 / 1113,
                                    125.0 / 192,   -2187.0 / 6784,
                                    11.0 / 84,     0.0};
  static constexpr double kB4[7] = {5179.0 / 57600, 0.0,
                                    7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  ODESolution sol;
  sol.system = sys;
  State y = z0;
  double t = 0.0;
  sol.times.push_back(t);
  sol.states.push_back(y);

  double rate_scale = 1e-6;
  for (int c = 0; c < sys.dim; ++c) {
    double pressure = 0.0;
    for (int b = 0; b < sys.dim; ++b) pressure += sys.comp[c][b] * z0[b];
    rate_scale = std::max(rate_scale, std::abs(sys.growth[c]) + pressure);
  }
  double h = std::min(0.01 / rate_scale, horizon);
  if (max_step > 0.0) h = std::min(h, max_step);
  const double atol = 1e-12;
  const double h_min = 1e-13 * std::max(1.0, horizon);
  int consecutive_rejects = 0;

  while (t < horizon) {
    h = std::min(h, horizon - t);
    State k[7];
    k[0] = rhs(sys, y);
    State stage;
    for (int s = 1; s < 7; ++s) {
      stage = y;
      for (int c = 0; c < sys.dim; ++c) {
        double acc = 0.0;
        for (int p = 0; p < s; ++p) acc += kA[s][p] * k[p][c];
        stage[c] = y[c] + h * acc;
      }
      (void)kC;
      k[s] = rhs(sys, stage);
    }
    State y5 = y;
    double err = 0.0;
    bool negative_overshoot = false;
    for (int c = 0; c < sys.dim; ++c) {
      double acc5 = 0.0, acc4 = 0.0;
      for (int s = 0; s < 7; ++s) {
        acc5 += kB5[s] * k[s][c];
        acc4 += kB4[s] * k[s][c];
      }
      y5[c] = y[c] + h * acc5;
      const double e = h * (acc5 - acc4);
      const double sc = atol + rel_tol * std::max(std::abs(y[c]), std::abs(y5[c]));
      err = std::max(err, std::abs(e) / sc);
      if (y5[c] < 0.0) {
        if (y5[c] > -1e-12 * std::max(1.0, inf_norm(y, sys.dim)))
          y5[c] = 0.0;  // round a tiny overshoot back onto the axis
        else
          negative_overshoot = true;
      }
      if (y[c] == 0.0) y5[c] = 0.0;  // axes are exactly invariant
    }

    if (err <= 1.0 && !negative_overshoot) {
      t += h;
      y = y5;
      sol.times.push_back(t);
      sol.states.push_back(y);
      consecutive_rejects = 0;
      double grow = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
      h *= std::clamp(grow, 0.2, 5.0);
      if (max_step > 0.0) h = std::min(h, max_step);
    } else {
      h *= negative_overshoot ? 0.5
                              : std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
      if (++consecutive_rejects > 200 || h < h_min)
        throw StepFailureError("integrate: step controller stalled at t=" +
                               std::to_string(t));
    }
  }

  const State f_end = rhs(sys, y);
  sol.terminal = inf_norm(f_end, sys.dim) <=
                         1e-10 * (1.0 + inf_norm(y, sys.dim))
                     ? ODESolution::Terminal::Converged
                     : ODESolution::Terminal::HorizonReached;
  return sol;
}

std::array<double, 2> stable_equilibrium_2d(const LVSystem& sys) {
  if (sys.dim != 2)
    throw std::invalid_argument("stable_equilibrium_2d: needs a 2D system");
  const double g0 = sys.growth[0], g1 = sys.growth[1];
  const double c00 = sys.comp[0][0], c01 = sys.comp[0][1];
  const double c10 = sys.comp[1][0], c11 = sys.comp[1][1];
  const double nbar0 = g0 / c00, nbar1 = g1 / c11;
  const double s01 = g0 - c01 * nbar1;
  const double s10 = g1 - c10 * nbar0;
  const double tol = kFeasibilityTol;
  if (std::abs(s01) <= tol || std::abs(s10) <= tol)
    throw DegenerateError("stable_equilibrium_2d: invasion fitness at zero");
  if (s01 > 0.0 && s10 > 0.0) {
    const double den = c00 * c11 - c01 * c10;
    if (std::abs(den) <= tol * (std::abs(c00 * c11) + std::abs(c01 * c10)))
      throw DegenerateError("stable_equilibrium_2d: degenerate denominator");
    return {(g0 * c11 - g1 * c01) / den, (g1 * c00 - g0 * c10) / den};
  }
  if (s01 < 0.0 && s10 > 0.0) return {0.0, nbar1};
  if (s10 < 0.0 && s01 > 0.0) return {nbar0, 0.0};
  throw DomainError(
      "stable_equilibrium_2d: bistable sign pattern has no unique stable "
      "equilibrium");
}

double time_to_equilibrium(const LVSystem& sys,
                           const std::array<double, 2>& z0, double eps,
                           double horizon) {
  if (sys.dim != 2)
    throw std::invalid_argument("time_to_equilibrium: needs a 2D system");
  if (!(eps > 0.0)) throw std::invalid_argument("time_to_equilibrium: eps <= 0");
  const std::array<double, 2> eq = stable_equilibrium_2d(sys);
  const double radius = eps * eps;

  const ODESolution sol =
      integrate(sys, {z0[0], z0[1], 0.0}, horizon, 1e-8, 0.05);
  const std::size_t n = sol.times.size();
  std::vector<double> dist(n);
  for (std::size_t k = 0; k < n; ++k)
    dist[k] = std::abs(sol.states[k][0] - eq[0]) +
              std::abs(sol.states[k][1] - eq[1]);

  for (std::size_t k = 0; k < n; ++k) {
    if (dist[k] > radius) continue;
    if (k > 0 && dist[k - 1] <= radius) continue;  // not an entry point
    const double entry = sol.times[k];
    const double window_end = std::min(entry + 10.0 * entry, horizon);
    bool holds = true;
    for (std::size_t m = k; m < n && sol.times[m] <= window_end; ++m) {
      if (dist[m] > radius) {
        holds = false;
        break;
      }
    }
    if (holds) return entry;
  }
  throw NotSettledError(
      "time_to_equilibrium: trajectory did not settle within the horizon");
}

double worst_case_settling(const EcologyParams& params, int invader,
                           double eps, int grid_points) {
  if (invader != 1 && invader != 2)
    throw std::invalid_argument("worst_case_settling: invader must be 1 or 2");
  if (grid_points < 1)
    throw std::invalid_argument("worst_case_settling: empty grid");
  if (!(invasion_fitness(params, invader, 0) > 0.0))
    throw std::invalid_argument(
        "worst_case_settling: requires a supercritical invader (S_i0 > 0)");
  const LVSystem sys = lv_subsystem(params, {0, invader});
  const double nbar0 = monomorphic_equilibrium(params, 0);
  const double radius =
      3.0 * eps * (params.comp[0][1] + params.comp[0][2]) / params.comp[0][0];
  double worst = 0.0;
  for (int a = 0; a < grid_points; ++a) {
    for (int b = 0; b < grid_points; ++b) {
      const double fa =
          grid_points == 1 ? 0.5 : static_cast<double>(a) / (grid_points - 1);
      const double fb =
          grid_points == 1 ? 0.5 : static_cast<double>(b) / (grid_points - 1);
      const double z_res =
          std::max(nbar0 - radius + 2.0 * radius * fa, kFeasibilityTol);
      const double z_inv = eps / 2.0 + (eps / 2.0) * fb;
      worst = std::max(worst, time_to_equilibrium(sys, {z_res, z_inv}, eps));
    }
  }
  return worst;
}

const char* to_string(QualitativeOutcome::Kind kind) {
  switch (kind) {
    case QualitativeOutcome::Kind::GlobalExclusion: return "global_exclusion";
    case QualitativeOutcome::Kind::PlanarCoexistence:
      return "planar_coexistence";
    case QualitativeOutcome::Kind::InteriorCoexistence:
      return "interior_coexistence";
    case QualitativeOutcome::Kind::Bistable: return "bistable";
    case QualitativeOutcome::Kind::AmbiguousPossiblyPeriodic:
      return "ambiguous_possibly_periodic";
  }
  return "?";
}

std::optional<Vec3> interior_equilibrium(const EcologyParams& params,
                                         double tol) {
  Vec3 rho{};
  for (int i = 0; i < 3; ++i) rho[i] = params.rho(i);
  return solve3(params.comp, rho, tol);
}

QualitativeOutcome classify(const FitnessSummary& summary, double sign_tol) {
  for (int i = 0; i < 3; ++i)
    if (!(summary.nbar[i] > 0.0))
      throw std::invalid_argument("classify: requires all nbar_i > 0");

  // Sign pattern of the six pairwise invasion fitnesses.
  std::ostringstream pattern;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double s = summary.S[i][j];
      if (std::abs(s) <= sign_tol)
        throw DegenerateError("classify: S_" + std::to_string(i) +
                              std::to_string(j) + " indistinguishable from 0");
      pattern << "S" << i << j << ":" << (s > 0 ? "+" : "-") << " ";
    }
  }

  QualitativeOutcome out;
  out.sign_pattern = pattern.str();
  if (!out.sign_pattern.empty()) out.sign_pattern.pop_back();

  // Axis equilibria.
  for (int i = 0; i < 3; ++i) {
    FixedPointInfo fp;
    fp.kind = FixedPointInfo::Kind::Axis;
    fp.types = {i};
    fp.location = {0.0, 0.0, 0.0};
    fp.location[i] = summary.nbar[i];
    fp.stable = true;
    for (int j = 0; j < 3; ++j)
      if (j != i && summary.S[j][i] > 0.0) fp.stable = false;
    out.fixed_points.push_back(fp);
  }

  // Feasible planar equilibria.
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (!summary.pair_eq[i][j].has_value()) continue;
      const int k = 3 - i - j;
      if (!summary.s_tri[k].has_value())
        throw std::logic_error("classify: missing trimorphic fitness");
      if (std::abs(*summary.s_tri[k]) <= sign_tol)
        throw DegenerateError("classify: transversal fitness of type " +
                              std::to_string(k) + " indistinguishable from 0");
      FixedPointInfo fp;
      fp.kind = FixedPointInfo::Kind::Planar;
      fp.types = {i, j};
      fp.location = {0.0, 0.0, 0.0};
      fp.location[i] = (*summary.pair_eq[i][j])[0];
      fp.location[j] = (*summary.pair_eq[i][j])[1];
      const bool inplane_stable =
          summary.S[i][j] > 0.0 && summary.S[j][i] > 0.0;
      fp.stable = inplane_stable && *summary.s_tri[k] < 0.0;
      out.fixed_points.push_back(fp);
    }
  }

  // Interior fixed point (solve rho = C n).
  const auto interior = solve3(summary.params.comp, summary.rho, sign_tol);
  if (!interior.has_value())
    throw DegenerateError("classify: interior linear system is singular");
  bool interior_feasible = true;
  for (int c = 0; c < 3; ++c)
    if (!((*interior)[c] > sign_tol)) interior_feasible = false;
  if (interior_feasible) {
    FixedPointInfo fp;
    fp.kind = FixedPointInfo::Kind::Interior;
    fp.types = {0, 1, 2};
    fp.location = *interior;
    // Routh-Hurwitz on the Jacobian -diag(n*) C at the interior point.
    Mat3 jac{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        jac[i][j] = -(*interior)[i] * summary.params.comp[i][j];
    const double tr = jac[0][0] + jac[1][1] + jac[2][2];
    double minors2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int a = (i + 1) % 3, b = (i + 2) % 3;
      minors2 += jac[a][a] * jac[b][b] - jac[a][b] * jac[b][a];
    }
    const double det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
                       jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
                       jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
    const double c2 = -tr, c1 = minors2, c0 = -det;
    fp.stable = c2 > 0.0 && c0 > 0.0 && c2 * c1 > c0;
    out.fixed_points.push_back(fp);
  }

  for (std::size_t idx = 0; idx < out.fixed_points.size(); ++idx)
    if (out.fixed_points[idx].stable)
      out.attractor_indices.push_back(static_cast<int>(idx));

  // Outcome from the sign pattern.
  bool all_positive = true, all_negative = true;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        if (summary.S[i][j] < 0.0) all_positive = false;
        if (summary.S[i][j] > 0.0) all_negative = false;
      }

  if (interior_feasible) {
    if (all_positive) {
      out.kind = QualitativeOutcome::Kind::InteriorCoexistence;
      out.note = "all pairwise invasion fitnesses positive; trajectories "
                 "converge to the interior fixed point";
    } else if (all_negative) {
      out.kind = QualitativeOutcome::Kind::Bistable;
      out.note = "all pairwise invasion fitnesses negative; trajectories "
                 "converge to one of the monomorphic equilibria";
    } else {
      out.kind = QualitativeOutcome::Kind::AmbiguousPossiblyPeriodic;
      out.note = "interior fixed point with mixed pairwise signs; periodic "
                 "orbits cannot be excluded from signs alone";
    }
  } else {
    std::vector<int> boundary_attractors;
    for (int idx : out.attractor_indices)
      if (out.fixed_points[idx].kind != FixedPointInfo::Kind::Interior)
        boundary_attractors.push_back(idx);
    if (boundary_attractors.size() == 1) {
      const FixedPointInfo& fp = out.fixed_points[boundary_attractors[0]];
      if (fp.kind == FixedPointInfo::Kind::Axis) {
        out.kind = QualitativeOutcome::Kind::GlobalExclusion;
        out.winner = fp.types[0];
      } else {
        out.kind = QualitativeOutcome::Kind::PlanarCoexistence;
        out.pair = {fp.types[0], fp.types[1]};
      }
    } else if (boundary_attractors.size() >= 2) {
      out.kind = QualitativeOutcome::Kind::Bistable;
    } else {
      throw DegenerateError(
          "classify: no interior fixed point and no stable boundary "
          "equilibrium (non-generic configuration)");
    }
  }

  try {
    out.permanent = permanence_check(summary);
  } catch (const WrongSignPatternError&) {
    // cyclic pattern absent: leave unset
  }
  out.vl_certificate = vl_certificate(summary.params.comp);
  return out;
}

bool permanence_check(const FitnessSummary& summary) {
  const bool pattern =
      summary.S[0][1] < 0.0 && summary.S[1][0] > 0.0 &&
      summary.S[1][2] < 0.0 && summary.S[2][1] > 0.0 &&
      summary.S[2][0] < 0.0 && summary.S[0][2] > 0.0;
  if (!pattern)
    throw WrongSignPatternError(
        "permanence_check: requires the cyclic pattern S_01<0<S_10, "
        "S_12<0<S_21, S_20<0<S_02");
  const double lhs = std::abs(summary.S[0][1] * summary.S[1][2] * summary.S[2][0]);
  const double rhs_prod = summary.S[0][2] * summary.S[2][1] * summary.S[1][0];
  return lhs < rhs_prod;
}

bool vl_verify(const Mat3& comp, const Vec3& d) {
  for (int i = 0; i < 3; ++i)
    if (!(d[i] > 0.0) || !std::isfinite(d[i])) return false;
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m[i][j] = 0.5 * (d[i] * comp[i][j] + d[j] * comp[j][i]);
  const double m1 = m[0][0];
  const double m2 = m[0][0] * m[1][1] - m[0][1] * m[0][1];
  const double m3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[1][2]) -
                    m[0][1] * (m[0][1] * m[2][2] - m[1][2] * m[0][2]) +
                    m[0][2] * (m[0][1] * m[1][2] - m[1][1] * m[0][2]);
  return m1 > 0.0 && m2 > 0.0 && m3 > 0.0;
}

namespace {

// Smallest leading principal minor of sym(diag(d) * comp): positive iff the
// certificate verifies; used as a search margin.
double vl_margin(const Mat3& comp, const Vec3& d) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m[i][j] = 0.5 * (d[i] * comp[i][j] + d[j] * comp[j][i]);
  const double m1 = m[0][0];
  const double m2 = m[0][0] * m[1][1] - m[0][1] * m[0][1];
  const double m3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[1][2]) -
                    m[0][1] * (m[0][1] * m[2][2] - m[1][2] * m[0][2]) +
                    m[0][2] * (m[0][1] * m[1][2] - m[1][1] * m[0][2]);
  return std::min({m1, m2, m3});
}

}  // namespace

std::optional<Vec3> vl_certificate(const Mat3& comp) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!(comp[i][j] > 0.0))
        throw std::invalid_argument("vl_certificate: comp entries must be > 0");

  Vec3 best{1.0, 1.0, 1.0};
  double best_margin = vl_margin(comp, best);

  if (best_margin <= 0.0) {
    constexpr int kGrid = 200;
    for (int a = 0; a < kGrid; ++a) {
      const double d1 = std::pow(10.0, -3.0 + 6.0 * a / (kGrid - 1));
      for (int b = 0; b < kGrid; ++b) {
        const double d2 = std::pow(10.0, -3.0 + 6.0 * b / (kGrid - 1));
        const double margin = vl_margin(comp, {1.0, d1, d2});
        if (margin > best_margin) {
          best_margin = margin;
          best = {1.0, d1, d2};
        }
      }
    }
  }

  // Multiplicative coordinate descent around the best grid point.
  for (int iter = 0; iter < 80; ++iter) {
    bool improved = false;
    for (int coord = 1; coord <= 2; ++coord) {
      for (const double factor : {0.85, 1.0 / 0.85}) {
        Vec3 trial = best;
        trial[coord] *= factor;
        const double margin = vl_margin(comp, trial);
        if (margin > best_margin) {
          best_margin = margin;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  if (best_margin > 0.0 && vl_verify(comp, best)) return best;
  return std::nullopt;
}

}  // namespace clonal
