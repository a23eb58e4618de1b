#include "clonal/ecology.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace clonal {

void validate(const EcologyParams& params) {
  auto fail = [](const std::string& message) {
    throw std::invalid_argument("EcologyParams: " + message);
  };
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(params.beta[i]) || params.beta[i] <= 0.0)
      fail("beta" + std::to_string(i) + " must be > 0");
    if (!std::isfinite(params.delta[i]) || params.delta[i] < 0.0)
      fail("delta" + std::to_string(i) + " must be >= 0");
    for (int j = 0; j < 3; ++j) {
      if (!std::isfinite(params.comp[i][j]) || params.comp[i][j] <= 0.0)
        fail("comp[" + std::to_string(i) + "][" + std::to_string(j) +
             "] must be > 0");
    }
  }
  if (params.carrying_capacity < 1) fail("carrying_capacity must be >= 1");
  if (!std::isfinite(params.alpha) || params.alpha < 0.0)
    fail("alpha must be >= 0");
}

double monomorphic_equilibrium(const EcologyParams& params, int i) {
  return params.rho(i) / params.comp[i][i];
}

double invasion_fitness(const EcologyParams& params, int i, int j) {
  return params.rho(i) - params.comp[i][j] * monomorphic_equilibrium(params, j);
}

PairEquilibrium coexistence_equilibrium(const EcologyParams& params, int i,
                                        int j, double tol) {
  const double cii = params.comp[i][i];
  const double cjj = params.comp[j][j];
  const double cij = params.comp[i][j];
  const double cji = params.comp[j][i];
  const double den = cii * cjj - cij * cji;
  const double scale = std::abs(cii * cjj) + std::abs(cij * cji);

  PairEquilibrium result;
  if (std::abs(den) <= tol * scale) {
    result.status = PairEquilibrium::Status::Degenerate;
    return result;
  }
  const double rho_i = params.rho(i);
  const double rho_j = params.rho(j);
  result.n_i = (rho_i * cjj - rho_j * cij) / den;
  result.n_j = (rho_j * cii - rho_i * cji) / den;
  result.status = (result.n_i > tol && result.n_j > tol)
                      ? PairEquilibrium::Status::Feasible
                      : PairEquilibrium::Status::NonpositiveCoordinate;
  return result;
}

double trimorphic_fitness(const EcologyParams& params, int k, int i, int j,
                          double tol) {
  // Canonical pair order makes the (i, j) / (j, i) symmetry bit-exact.
  if (i > j) std::swap(i, j);
  const PairEquilibrium pair = coexistence_equilibrium(params, i, j, tol);
  if (!pair.feasible()) {
    std::ostringstream oss;
    oss << "trimorphic_fitness(" << k << "," << i << "," << j
        << "): the (" << i << "," << j << ") equilibrium is not feasible";
    throw PairInfeasibleError(oss.str());
  }
  return params.rho(k) - params.comp[k][i] * pair.n_i -
         params.comp[k][j] * pair.n_j;
}

FitnessSummary fitness_summary(const EcologyParams& params, double tol) {
  validate(params);
  FitnessSummary out;
  out.params = params;
  for (int i = 0; i < 3; ++i) {
    out.rho[i] = params.rho(i);
    out.nbar[i] = monomorphic_equilibrium(params, i);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.S[i][j] = (i == j) ? 0.0 : invasion_fitness(params, i, j);
      out.ctilde[i][j] = params.comp[i][j] / params.comp[j][j];
      out.pair_status[i][j] = PairEquilibrium::Status::Degenerate;
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const PairEquilibrium pair = coexistence_equilibrium(params, i, j, tol);
      out.pair_status[i][j] = pair.status;
      out.pair_status[j][i] = pair.status;
      if (pair.feasible()) {
        out.pair_eq[i][j] = std::array<double, 2>{pair.n_i, pair.n_j};
        out.pair_eq[j][i] = std::array<double, 2>{pair.n_j, pair.n_i};
      }
    }
  }
  for (int k = 0; k < 3; ++k) {
    const int i = (k == 0) ? 1 : 0;
    const int j = (k == 2) ? 1 : 2;
    if (out.pair_eq[i][j].has_value()) {
      out.s_tri[k] = trimorphic_fitness(params, k, i, j, tol);
    }
  }
  return out;
}

std::string to_json(const FitnessSummary& summary, int indent) {
  using nlohmann::json;
  json j;
  j["rho"] = summary.rho;
  j["nbar"] = summary.nbar;
  j["S"] = summary.S;
  j["ctilde"] = summary.ctilde;

  json pairs = json::object();
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const std::string key = std::to_string(a) + std::to_string(b);
      if (summary.pair_eq[a][b].has_value()) {
        pairs[key] = *summary.pair_eq[a][b];
      } else {
        pairs[key] = nullptr;
      }
    }
  }
  j["nbar_pair"] = pairs;

  json tri = json::object();
  for (int k = 0; k < 3; ++k) {
    const int i = (k == 0) ? 1 : 0;
    const int jj = (k == 2) ? 1 : 2;
    const std::string key =
        std::to_string(k) + std::to_string(i) + std::to_string(jj);
    if (summary.s_tri[k].has_value()) {
      tri[key] = *summary.s_tri[k];
    } else {
      tri[key] = nullptr;
    }
  }
  j["S_tri"] = tri;
  return j.dump(indent);
}

PairRelation pairwise_order(const EcologyParams& params, int i, int j) {
  const double s_ij = invasion_fitness(params, i, j);
  const double s_ji = invasion_fitness(params, j, i);
  if (s_ij < 0.0 && s_ji > 0.0) return PairRelation::FirstPrecedes;
  if (s_ji < 0.0 && s_ij > 0.0) return PairRelation::SecondPrecedes;
  return PairRelation::Equivalent;
}

const char* to_string(PairRelation relation) {
  switch (relation) {
    case PairRelation::FirstPrecedes: return "first_precedes";
    case PairRelation::SecondPrecedes: return "second_precedes";
    case PairRelation::Equivalent: return "equivalent";
  }
  return "?";
}

TransitivityRegime transitivity_regime(double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 >= c1))
    throw std::invalid_argument("transitivity_regime: need 0 < C1 <= C2");
  // Literal strict inequalities; equality boundaries fall through to None.
  const double upper = std::max(c1, 1.0 / c2);
  const double lower = std::min(1.0 / c1, c2);
  const bool cond_a = upper * upper > c2;
  const bool cond_b = lower * lower < c1;
  if (cond_a && cond_b) return TransitivityRegime::ForcedTransitive;
  if (cond_a || cond_b) return TransitivityRegime::WeaklyTransitive;
  if (c1 < 1.0 && 1.0 < c2) return TransitivityRegime::CycleConstructible;
  return TransitivityRegime::None;
}

const char* to_string(TransitivityRegime regime) {
  switch (regime) {
    case TransitivityRegime::ForcedTransitive: return "forced_transitive";
    case TransitivityRegime::WeaklyTransitive: return "weakly_transitive";
    case TransitivityRegime::CycleConstructible: return "cycle_constructible";
    case TransitivityRegime::None: return "none";
  }
  return "?";
}

EcologyParams build_rps_parameters(double c1, double c2, double eta,
                                   const Vec3& rho, const Vec3& cdiag,
                                   std::int64_t carrying_capacity,
                                   double alpha) {
  auto fail = [](const std::string& message) {
    throw InvalidEtaError("build_rps_parameters: " + message);
  };
  if (!(c1 < 1.0 && 1.0 < c2)) fail("need C1 < 1 < C2");
  for (int i = 0; i < 3; ++i) {
    if (!(rho[i] > 0.0)) fail("rho entries must be > 0");
    if (!(cdiag[i] > 0.0)) fail("self-competition entries must be > 0");
  }
  const double margin = std::min(c2, 1.0 / c1);
  if (!(eta > 0.0)) fail("need eta > 0");
  if (!(eta < 1.0)) fail("need eta < 1");
  if (!(eta < margin)) fail("need eta < min(C2, 1/C1)");
  const double g = margin - eta;
  if (!(g * g > c1)) fail("(min(C2,1/C1) - eta)^2 > C1 fails");
  if (!(1.0 / (g * g) < c2)) fail("(min(C2,1/C1) - eta)^-2 < C2 fails");

  EcologyParams params;
  params.beta = rho;
  params.delta = {0.0, 0.0, 0.0};
  params.carrying_capacity = carrying_capacity;
  params.alpha = alpha;
  for (int i = 0; i < 3; ++i) params.comp[i][i] = cdiag[i];
  for (int i = 0; i < 3; ++i) {
    const int next = (i + 1) % 3;
    params.comp[next][i] = eta * (rho[next] / rho[i]) * cdiag[i];
    params.comp[i][next] = (1.0 + eta) * (rho[i] / rho[next]) * cdiag[next];
  }

  // The recipe guarantees the cyclic order for 0 < eta < 1; fail loudly if a
  // numerical edge breaks it rather than return a non-cyclic system.
  const bool cycle =
      pairwise_order(params, 0, 1) == PairRelation::FirstPrecedes &&
      pairwise_order(params, 1, 2) == PairRelation::FirstPrecedes &&
      pairwise_order(params, 2, 0) == PairRelation::FirstPrecedes;
  if (!cycle)
    throw std::logic_error(
        "build_rps_parameters: constructed system is not a 3-cycle");
  return params;
}

}  // namespace clonal
