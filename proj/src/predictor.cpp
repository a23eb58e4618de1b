#include "clonal/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "clonal/case_tables_embedded.hpp"
#include "clonal/expr.hpp"
#include "clonal/lv.hpp"
#include "json.hpp"

namespace clonal {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const json& tables() {
  static const json data = json::parse(detail::kCaseTableJson);
  return data;
}

const json& tree_for(const char* regime_name) {
  for (const json& tree : tables().at("trees"))
    if (tree.at("regime").get<std::string>() == regime_name) return tree;
  throw UnhandledCaseError(std::string("decision-table data has no tree '") +
                           regime_name + "'");
}

double tri_or_nan(const FitnessSummary& summary, int k) {
  return summary.s_tri[k].value_or(kNaN);
}

expr::Environment base_environment(const FitnessSummary& summary,
                                   double alpha) {
  expr::Environment env;
  env["S10"] = summary.S[1][0];
  env["S01"] = summary.S[0][1];
  env["S20"] = summary.S[2][0];
  env["S02"] = summary.S[0][2];
  env["S21"] = summary.S[2][1];
  env["S12"] = summary.S[1][2];
  env["S012"] = tri_or_nan(summary, 0);
  env["S102"] = tri_or_nan(summary, 1);
  env["S201"] = tri_or_nan(summary, 2);
  env["alpha"] = alpha;
  return env;
}

// The role swap 1 <-> 2: conditions and durations of the first tree apply to
// the second-sweep-completes-first regime after renaming the mutants and
// reversing the arrival offset.  The {1,2} pair keeps its identity, so S_012
// is a fixed point of the swap.
expr::Environment swapped_environment(const FitnessSummary& summary,
                                      double alpha) {
  expr::Environment env;
  env["S10"] = summary.S[2][0];
  env["S01"] = summary.S[0][2];
  env["S20"] = summary.S[1][0];
  env["S02"] = summary.S[0][1];
  env["S21"] = summary.S[1][2];
  env["S12"] = summary.S[2][1];
  env["S012"] = tri_or_nan(summary, 0);
  env["S102"] = tri_or_nan(summary, 2);
  env["S201"] = tri_or_nan(summary, 1);
  env["alpha"] = -alpha;
  return env;
}

struct TreeLeaf {
  std::string letter;
  double duration = kNaN;
  std::string final_token;
  std::string simplex_class;
  std::string note;
  std::string duration_meaning;
};

std::string describe_environment(const expr::Environment& env) {
  std::ostringstream oss;
  bool first = true;
  for (const auto& [name, value] : env) {
    if (!first) oss << ", ";
    first = false;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%.6g", name.c_str(), value);
    oss << buf;
  }
  return oss.str();
}

[[noreturn]] void throw_no_match(const expr::Environment& env) {
  for (const auto& [name, value] : env) {
    if (name == "alpha") continue;
    if (!std::isnan(value) && std::abs(value) < 1e-9)
      throw DegenerateError("decision table cannot take sides: " + name +
                            " is indistinguishable from zero (" +
                            describe_environment(env) + ")");
  }
  throw UnhandledCaseError("sign pattern matched no decision-table row: " +
                           describe_environment(env));
}

TreeLeaf walk_tree(const json& tree, expr::Environment env) {
  for (const json& let : tree.at("let"))
    env[let.at("name").get<std::string>()] =
        expr::evaluate(let.at("value").get<std::string>(), env);
  const auto lookup = expr::lookup_in(env);
  for (const json& row : tree.at("cases")) {
    if (!expr::Expression::parse(row.at("guard").get<std::string>())
             .truthy(lookup))
      continue;
    TreeLeaf leaf;
    leaf.letter = row.at("case").get<std::string>();
    leaf.duration =
        expr::evaluate(row.at("duration").get<std::string>(), env);
    if (row.contains("simplex_class"))
      leaf.simplex_class = row.at("simplex_class").get<std::string>();
    if (row.contains("note")) leaf.note = row.at("note").get<std::string>();
    if (row.contains("duration_meaning"))
      leaf.duration_meaning = row.at("duration_meaning").get<std::string>();
    if (row.contains("final")) {
      leaf.final_token = row.at("final").get<std::string>();
      return leaf;
    }
    for (const json& sub : row.at("subrows")) {
      if (!expr::Expression::parse(sub.at("guard").get<std::string>())
               .truthy(lookup))
        continue;
      leaf.final_token = sub.at("final").get<std::string>();
      if (sub.contains("simplex_class"))
        leaf.simplex_class = sub.at("simplex_class").get<std::string>();
      if (sub.contains("note")) {
        if (!leaf.note.empty()) leaf.note += "; ";
        leaf.note += sub.at("note").get<std::string>();
      }
      return leaf;
    }
    throw_no_match(env);
  }
  throw_no_match(env);
}

bool all_positive(const Vec3& v) {
  return v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0;
}

Vec3 axis_point(const FitnessSummary& summary, int i) {
  Vec3 out{0.0, 0.0, 0.0};
  out[i] = summary.nbar[i];
  return out;
}

Vec3 pair_point(const FitnessSummary& summary, int i, int j) {
  const auto& eq = summary.pair_eq[i][j];
  if (!eq.has_value())
    throw DegenerateError(
        "a decision-table row selected the coexistence point of types " +
        std::to_string(i) + " and " + std::to_string(j) +
        ", but that pair has no feasible equilibrium");
  Vec3 out{0.0, 0.0, 0.0};
  out[i] = (*eq)[0];
  out[j] = (*eq)[1];
  return out;
}

PredictedFinal final_from_classify(const FitnessSummary& summary) {
  const QualitativeOutcome outcome = classify(summary);
  PredictedFinal out;
  switch (outcome.kind) {
    case QualitativeOutcome::Kind::GlobalExclusion:
      out.kind = PredictedFinal::Kind::Point;
      out.density = axis_point(summary, outcome.winner);
      return out;
    case QualitativeOutcome::Kind::PlanarCoexistence:
      out.kind = PredictedFinal::Kind::Point;
      out.density = pair_point(summary, outcome.pair[0], outcome.pair[1]);
      return out;
    case QualitativeOutcome::Kind::InteriorCoexistence:
      out.kind = PredictedFinal::Kind::Coexist012;
      break;
    case QualitativeOutcome::Kind::Bistable:
      out.kind = PredictedFinal::Kind::AmbiguousPossiblyPeriodic;
      out.simplex_class = "bistable";
      return out;
    case QualitativeOutcome::Kind::AmbiguousPossiblyPeriodic:
      out.kind = PredictedFinal::Kind::AmbiguousPossiblyPeriodic;
      break;
  }
  if (const auto interior = interior_equilibrium(summary.params);
      interior.has_value() && all_positive(*interior))
    out.density = *interior;
  return out;
}

PredictedFinal final_from_token(const FitnessSummary& summary,
                                const std::string& token,
                                const std::string& simplex_class) {
  PredictedFinal out;
  out.simplex_class = simplex_class;
  if (token == "n0" || token == "n1" || token == "n2") {
    out.kind = PredictedFinal::Kind::Point;
    out.density = axis_point(summary, token[1] - '0');
    return out;
  }
  if (token == "pair01" || token == "pair02" || token == "pair12") {
    out.kind = PredictedFinal::Kind::Point;
    out.density = pair_point(summary, token[4] - '0', token[5] - '0');
    return out;
  }
  if (token == "coexist012" || token == "ambiguous012" || token == "cycles") {
    out.kind = token == "coexist012"
                   ? PredictedFinal::Kind::Coexist012
                   : (token == "cycles"
                          ? PredictedFinal::Kind::RPSCycles
                          : PredictedFinal::Kind::AmbiguousPossiblyPeriodic);
    if (const auto interior = interior_equilibrium(summary.params);
        interior.has_value() && all_positive(*interior))
      out.density = *interior;
    return out;
  }
  if (token == "classify") {
    PredictedFinal mapped = final_from_classify(summary);
    if (mapped.simplex_class.empty()) mapped.simplex_class = simplex_class;
    return mapped;
  }
  throw UnhandledCaseError("unknown final-state token '" + token +
                           "' in the decision-table data");
}

std::string swap_type_digits(std::string text) {
  for (char& c : text) {
    if (c == '1')
      c = '2';
    else if (c == '2')
      c = '1';
  }
  return text;
}

std::string swap_final_token(const std::string& token) {
  if (token == "n1") return "n2";
  if (token == "n2") return "n1";
  if (token == "pair01") return "pair02";
  if (token == "pair02") return "pair01";
  return token;  // n0, pair12, coexist012, ambiguous012, cycles, classify
}

double require(const std::optional<double>& value, const char* what) {
  if (!value.has_value())
    throw DegenerateError(std::string(what) +
                          " is needed but the underlying pair equilibrium "
                          "is infeasible");
  return *value;
}

Prediction leaf_prediction(const FitnessSummary& summary,
                           const std::string& prefix, const TreeLeaf& leaf,
                           const std::string& final_token, double duration,
                           double probability) {
  Prediction p;
  p.case_label = prefix + "-" + leaf.letter;
  p.final_state = final_from_token(summary, final_token, leaf.simplex_class);
  p.probability = probability;
  p.notes = leaf.note;
  if (final_token == "cycles") {
    // The branch cycles instead of settling; the tabulated expression times
    // the first return instead and is surfaced as a note.
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s ~ %.6g log K",
                  leaf.duration_meaning.empty()
                      ? "first cycle completes at"
                      : leaf.duration_meaning.c_str(),
                  duration);
    if (!p.notes.empty()) p.notes += "; ";
    p.notes += buf;
  } else {
    p.duration_coeff = duration;
  }
  return p;
}

}  // namespace

const char* to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::Mutant1Leads: return "mutant1_leads";
    case RegimeKind::Mutant2Leads: return "mutant2_leads";
    case RegimeKind::LateArrival: return "late_arrival";
    case RegimeKind::NoInterference: return "no_interference";
    case RegimeKind::Invalid: return "invalid";
  }
  return "?";
}

const char* to_string(PredictedFinal::Kind kind) {
  switch (kind) {
    case PredictedFinal::Kind::Point: return "point";
    case PredictedFinal::Kind::Coexist012: return "coexist012";
    case PredictedFinal::Kind::AmbiguousPossiblyPeriodic:
      return "ambiguous_possibly_periodic";
    case PredictedFinal::Kind::RPSCycles: return "rps_cycles";
  }
  return "?";
}

const char* to_string(SpeedupCase kind) {
  switch (kind) {
    case SpeedupCase::SlowdownVsResident1: return "slowdown_vs_resident1";
    case SpeedupCase::SpeedupVsResident1: return "speedup_vs_resident1";
    case SpeedupCase::SlowdownVsPair01: return "slowdown_vs_pair01";
    case SpeedupCase::SpeedupVsPair01: return "speedup_vs_pair01";
  }
  return "?";
}

const char* to_string(InvasionEffect effect) {
  switch (effect) {
    case InvasionEffect::Suppressed: return "suppressed";
    case InvasionEffect::Enabled: return "enabled";
    case InvasionEffect::None: return "none";
  }
  return "?";
}

Regime regime(const FitnessSummary& summary, double alpha, double tol) {
  const double s10 = summary.S[1][0];
  const double s20 = summary.S[2][0];
  const double s01 = summary.S[0][1];
  Regime out;
  out.which = RegimeKind::Invalid;
  if (std::abs(s10) <= tol) {
    out.reason = "boundary: S10 == 0";
    return out;
  }
  if (s10 < 0.0) {
    out.reason = "S10 < 0: the first mutant cannot invade the resident";
    return out;
  }
  const double inv10 = 1.0 / s10;
  if (std::abs(alpha - inv10) <= tol) {
    out.reason = "boundary: alpha == 1/S10";
    return out;
  }
  if (alpha < inv10) {
    if (std::abs(s20) <= tol) {
      out.reason = "boundary: S20 == 0 with alpha < 1/S10";
      return out;
    }
    if (s20 < 0.0) {
      out.which = RegimeKind::NoInterference;
      out.reason =
          "S20 < 0 and alpha < 1/S10: the second mutant cannot invade "
          "during the first sweep";
      return out;
    }
    if (alpha <= tol) {
      out.reason = "boundary: alpha == 0";
      return out;
    }
    const double split = std::max(0.0, inv10 - 1.0 / s20);
    if (std::abs(alpha - split) <= tol) {
      out.reason = "boundary: alpha == 1/S10 - 1/S20";
      return out;
    }
    if (alpha < split) {
      out.which = RegimeKind::Mutant2Leads;
      out.reason = "S20 > S10 > 0 and 0 < alpha < 1/S10 - 1/S20";
      return out;
    }
    out.which = RegimeKind::Mutant1Leads;
    out.reason = "S20 > 0 and max(0, 1/S10 - 1/S20) < alpha < 1/S10";
    return out;
  }
  // alpha > 1/S10: the first sweep's macroscopic phase is over.
  if (std::abs(s01) <= tol) {
    out.reason = "boundary: S01 == 0 with alpha > 1/S10";
    return out;
  }
  if (s01 > 0.0) {
    out.which = RegimeKind::LateArrival;
    out.reason =
        "alpha > 1/S10 and S01 > 0: the resident persists alongside the "
        "first mutant";
    return out;
  }
  const double cutoff = inv10 + 1.0 / std::abs(s01);
  if (std::abs(alpha - cutoff) <= tol) {
    out.reason = "boundary: alpha == 1/S10 + 1/|S01|";
    return out;
  }
  if (alpha < cutoff) {
    out.which = RegimeKind::LateArrival;
    out.reason =
        "1/S10 < alpha < 1/S10 + 1/|S01|: the second mutant still meets a "
        "residual resident population";
    return out;
  }
  out.which = RegimeKind::NoInterference;
  out.reason =
      "S01 < 0 and alpha > 1/S10 + 1/|S01|: the second mutant arrives after "
      "the substitution completes";
  return out;
}

std::vector<Prediction> predict(const FitnessSummary& summary, double alpha) {
  const Regime rg = regime(summary, alpha);
  if (rg.which != RegimeKind::Mutant1Leads &&
      rg.which != RegimeKind::Mutant2Leads &&
      rg.which != RegimeKind::LateArrival)
    throw DomainError(std::string("predict: regime '") + to_string(rg.which) +
                      "' has no interference prediction (" + rg.reason + ")");

  const double s10 = summary.S[1][0];
  const double s20 = summary.S[2][0];
  const double s01 = summary.S[0][1];
  const double s02 = summary.S[0][2];
  const double s21 = summary.S[2][1];
  const double beta1 = summary.params.beta[1];
  const double beta2 = summary.params.beta[2];
  const double p1 = s10 / beta1;

  std::vector<Prediction> out;
  const auto push_none = [&](const char* prefix, double probability) {
    Prediction p;
    p.case_label = std::string(prefix) + "-none";
    p.final_state.kind = PredictedFinal::Kind::Point;
    p.final_state.density = axis_point(summary, 0);
    p.duration_coeff = 0.0;
    p.probability = probability;
    p.notes = "neither mutant line establishes; the resident keeps its "
              "equilibrium";
    out.push_back(std::move(p));
  };
  const auto push_solo1 = [&](const char* prefix, double probability) {
    Prediction p;
    p.case_label = std::string(prefix) + "-solo1";
    p.final_state.kind = PredictedFinal::Kind::Point;
    if (std::abs(s01) <= kFeasibilityTol)
      throw DegenerateError("S01 is indistinguishable from zero");
    p.final_state.density = s01 > 0.0 ? pair_point(summary, 0, 1)
                                      : axis_point(summary, 1);
    p.duration_coeff = 1.0 / s10;
    if (s01 < 0.0)
      p.duration_full_coeff = 1.0 / s10 + 1.0 / std::abs(s01);
    p.probability = probability;
    p.notes = "only the first mutant establishes";
    out.push_back(std::move(p));
  };
  const auto push_solo2 = [&](const char* prefix, double probability) {
    Prediction p;
    p.case_label = std::string(prefix) + "-solo2";
    p.final_state.kind = PredictedFinal::Kind::Point;
    if (std::abs(s02) <= kFeasibilityTol)
      throw DegenerateError("S02 is indistinguishable from zero");
    p.final_state.density = s02 > 0.0 ? pair_point(summary, 0, 2)
                                      : axis_point(summary, 2);
    p.duration_coeff = alpha + 1.0 / s20;
    if (s02 < 0.0)
      p.duration_full_coeff = alpha + 1.0 / s20 + 1.0 / std::abs(s02);
    p.probability = probability;
    p.notes = "only the second mutant establishes";
    out.push_back(std::move(p));
  };

  if (rg.which == RegimeKind::Mutant1Leads ||
      rg.which == RegimeKind::Mutant2Leads) {
    const bool swapped = rg.which == RegimeKind::Mutant2Leads;
    const char* prefix = swapped ? "M2L" : "M1L";
    const double p2 = s20 / beta2;
    push_none(prefix, (1.0 - p1) * (1.0 - p2));
    push_solo1(prefix, p1 * (1.0 - p2));
    push_solo2(prefix, (1.0 - p1) * p2);

    const json& tree = tree_for("mutant1_leads");
    TreeLeaf leaf = walk_tree(tree, swapped
                                        ? swapped_environment(summary, alpha)
                                        : base_environment(summary, alpha));
    std::string token = leaf.final_token;
    double duration = leaf.duration;
    if (swapped) {
      token = swap_final_token(token);
      duration += alpha;
      leaf.note = swap_type_digits(leaf.note);
    }
    out.push_back(
        leaf_prediction(summary, prefix, leaf, token, duration, p1 * p2));
    return out;
  }

  // Late arrival: the second mutant faces either the intact resident (first
  // line failed) or the post-sweep population.
  if (std::abs(s20) <= kFeasibilityTol)
    throw DegenerateError("S20 is indistinguishable from zero");
  const double q0 = s20 > 0.0 ? s20 / beta2 : 0.0;
  double s_post = 0.0;
  if (s01 > 0.0)
    s_post = require(summary.s_tri[2], "S201");
  else
    s_post = s21;
  if (std::abs(s_post) <= kFeasibilityTol)
    throw DegenerateError(
        "the second mutant's post-sweep invasion rate is indistinguishable "
        "from zero");
  const double q_r = s_post > 0.0 ? s_post / beta2 : 0.0;

  push_none("LATE", (1.0 - p1) * (1.0 - q0));
  if (q0 > 0.0) push_solo2("LATE", (1.0 - p1) * q0);

  const json& tree = tree_for("late_arrival");
  if (q_r > 0.0) {
    Prediction p;
    p.case_label = "LATE-2fails";
    p.final_state.kind = PredictedFinal::Kind::Point;
    p.final_state.density = s01 > 0.0 ? pair_point(summary, 0, 1)
                                      : axis_point(summary, 1);
    p.duration_coeff = 1.0 / s10;
    if (s01 < 0.0)
      p.duration_full_coeff = 1.0 / s10 + 1.0 / std::abs(s01);
    p.probability = p1 * (1.0 - q_r);
    p.notes = "the first mutant sweeps; the second mutant's line dies out";
    out.push_back(std::move(p));

    const TreeLeaf leaf = walk_tree(tree, base_environment(summary, alpha));
    out.push_back(leaf_prediction(summary, "LATE", leaf, leaf.final_token,
                                  leaf.duration, p1 * q_r));
  } else {
    // The tree itself resolves to the row stating that the second mutant
    // cannot invade the post-sweep population (rows A / L).
    const TreeLeaf leaf = walk_tree(tree, base_environment(summary, alpha));
    out.push_back(leaf_prediction(summary, "LATE", leaf, leaf.final_token,
                                  leaf.duration, p1));
  }
  return out;
}

std::string to_json(const std::vector<Prediction>& predictions, int indent) {
  json arr = json::array();
  for (const Prediction& p : predictions) {
    json j;
    j["case"] = p.case_label;
    j["probability"] = p.probability;
    json fin;
    fin["kind"] = to_string(p.final_state.kind);
    if (p.final_state.density.has_value())
      fin["density"] = {(*p.final_state.density)[0],
                        (*p.final_state.density)[1],
                        (*p.final_state.density)[2]};
    if (!p.final_state.simplex_class.empty())
      fin["simplex_class"] = p.final_state.simplex_class;
    j["final"] = std::move(fin);
    if (p.duration_coeff.has_value()) j["duration_coeff"] = *p.duration_coeff;
    if (p.duration_full_coeff.has_value())
      j["duration_full_coeff"] = *p.duration_full_coeff;
    if (!p.notes.empty()) j["notes"] = p.notes;
    arr.push_back(std::move(j));
  }
  return arr.dump(indent);
}

std::string to_text_table(const std::vector<Prediction>& predictions) {
  std::ostringstream oss;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %-11s %-34s %-10s %s\n", "case",
                "probability", "final state", "duration", "notes");
  oss << line;
  for (const Prediction& p : predictions) {
    std::string final_text = to_string(p.final_state.kind);
    if (p.final_state.density.has_value()) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), " (%.4g, %.4g, %.4g)",
                    (*p.final_state.density)[0], (*p.final_state.density)[1],
                    (*p.final_state.density)[2]);
      final_text += buf;
    }
    if (!p.final_state.simplex_class.empty())
      final_text += " [class " + p.final_state.simplex_class + "]";
    std::string duration_text = "-";
    if (p.duration_coeff.has_value()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4g", *p.duration_coeff);
      duration_text = buf;
    }
    std::snprintf(line, sizeof(line), "%-12s %-11.6g %-34s %-10s %s\n",
                  p.case_label.c_str(), p.probability, final_text.c_str(),
                  duration_text.c_str(), p.notes.c_str());
    oss << line;
  }
  return oss.str();
}

SweepTiming single_mutant_sweep(const FitnessSummary& summary) {
  const double s10 = summary.S[1][0];
  if (!(s10 > kFeasibilityTol))
    throw DomainError("single_mutant_sweep requires S10 > 0");
  SweepTiming timing;
  timing.entry_coeff = 1.0 / s10;
  const double s01 = summary.S[0][1];
  if (s01 < -kFeasibilityTol)
    timing.full_coeff = timing.entry_coeff + 1.0 / std::abs(s01);
  return timing;
}

SpeedupResult speedup_fitness(const FitnessSummary& summary, double alpha,
                              std::optional<SpeedupCase> expected) {
  const Regime rg = regime(summary, alpha);
  if (rg.which != RegimeKind::Mutant1Leads)
    throw CaseMismatchError(
        std::string("speedup_fitness requires the regime in which the first "
                    "mutant's sweep completes first; got '") +
        to_string(rg.which) + "' (" + rg.reason + ")");
  const double s10 = summary.S[1][0];
  const double s20 = summary.S[2][0];
  const double s01 = summary.S[0][1];
  const double s02 = summary.S[0][2];
  const double s12 = summary.S[1][2];
  if (!(s02 < -kFeasibilityTol))
    throw CaseMismatchError("speedup_fitness requires S02 < 0");
  if (!(s12 < -kFeasibilityTol))
    throw CaseMismatchError("speedup_fitness requires S12 < 0");
  if (std::abs(s01) <= kFeasibilityTol)
    throw CaseMismatchError("S01 is indistinguishable from zero");

  SpeedupResult result;
  if (s01 > 0.0) {
    if (!summary.s_tri[2].has_value())
      throw CaseMismatchError(
          "S201 is needed but the 0-1 pair has no feasible equilibrium");
    result.s_reference = *summary.s_tri[2];
    if (!(result.s_reference > kFeasibilityTol))
      throw CaseMismatchError(
          "speedup_fitness requires S201 > 0 when S01 > 0 (the second "
          "mutant must invade the settled pair)");
    result.which = result.s_reference >= s20 ? SpeedupCase::SpeedupVsPair01
                                             : SpeedupCase::SlowdownVsPair01;
  } else {
    result.s_reference = summary.S[2][1];
    if (!(result.s_reference > kFeasibilityTol))
      throw CaseMismatchError(
          "speedup_fitness requires S21 > 0 when S01 < 0 (the second mutant "
          "must chase the growing type-1 population)");
    result.which = result.s_reference >= s20
                       ? SpeedupCase::SpeedupVsResident1
                       : SpeedupCase::SlowdownVsResident1;
  }
  if (expected.has_value() && *expected != result.which)
    throw CaseMismatchError(std::string("detected case '") +
                            to_string(result.which) + "' but '" +
                            to_string(*expected) + "' was expected");
  const double s = result.s_reference;
  const double inv_effective =
      1.0 / s + (1.0 / s10 - alpha) * (1.0 - s20 / s);
  result.s_effective = 1.0 / inv_effective;
  return result;
}

RpsCyclePrediction rps_cycle_prediction(const FitnessSummary& summary,
                                        double alpha, int l,
                                        std::int64_t carrying_capacity) {
  if (l < 1) throw DomainError("rps_cycle_prediction: l must be >= 1");
  if (carrying_capacity < 2)
    throw DomainError("rps_cycle_prediction: carrying capacity must be >= 2");
  const double s10 = summary.S[1][0];
  const double s01 = summary.S[0][1];
  const double s21 = summary.S[2][1];
  const double s12 = summary.S[1][2];
  const double s02 = summary.S[0][2];
  const double s20 = summary.S[2][0];
  const double tol = kFeasibilityTol;
  const auto demand = [&](bool ok, const char* text) {
    if (!ok) throw ConditionsFailError(std::string("violated: ") + text);
  };
  demand(s01 < -tol, "S01 < 0");
  demand(s10 > tol, "S10 > 0");
  demand(s12 < -tol, "S12 < 0");
  demand(s21 > tol, "S21 > 0");
  demand(s20 < -tol, "S20 < 0");
  demand(s02 > tol, "S02 > 0");
  const double a = alpha - 1.0 / s10;
  demand(a > tol, "alpha - 1/S10 > 0");
  const double window = a + 1.0 / s21;
  const double m1 = 1.0 / std::abs(s01);
  const double m2 = s02 / (std::abs(s12) * std::abs(s01));
  const double m3 =
      s02 * s10 / (std::abs(s12) * std::abs(s01) * std::abs(s20));
  demand(window < m1 - tol, "alpha - 1/S10 + 1/S21 < 1/|S01|");
  demand(window < m2 - tol,
         "alpha - 1/S10 + 1/S21 < S02 / (|S12| |S01|)");
  demand(window < m3 - tol,
         "alpha - 1/S10 + 1/S21 < S02 S10 / (|S12| |S01| |S20|)");

  RpsCyclePrediction out;
  out.probability =
      s10 * s21 / (summary.params.beta[1] * summary.params.beta[2]);
  const double factor =
      1.0 + std::abs(s01) / s02 + std::abs(s01) * std::abs(s12) / (s02 * s10);
  const double ratio =
      std::abs(s01) * std::abs(s12) * std::abs(s20) / (s02 * s21 * s10);
  out.duration = window * factor * std::pow(ratio, l - 1) *
                 std::log(static_cast<double>(carrying_capacity));
  return out;
}

InvasionProbabilityPrediction invasion_probability_prediction(
    const FitnessSummary& summary, double alpha) {
  const Regime rg = regime(summary, alpha);
  const double tol = kFeasibilityTol;
  const double s10 = summary.S[1][0];
  const double s20 = summary.S[2][0];
  const double s01 = summary.S[0][1];
  const double s02 = summary.S[0][2];
  const double s21 = summary.S[2][1];
  const double s12 = summary.S[1][2];
  const double beta1 = summary.params.beta[1];
  const double beta2 = summary.params.beta[2];

  InvasionProbabilityPrediction out;
  out.which = InvasionEffect::None;
  out.notes = "no covered condition set applies";

  const auto suppressed = [&](const char* how) {
    out.which = InvasionEffect::Suppressed;
    out.with_interference = 0.0;
    out.without_interference = s20 / beta2;
    out.notes = std::string("the first mutation blocks an otherwise "
                            "successful second invasion: ") +
                how;
  };

  if (rg.which == RegimeKind::Mutant1Leads) {
    if (s01 > tol && summary.s_tri[2].has_value() &&
        *summary.s_tri[2] < -tol) {
      suppressed("the settled 0-1 pair repels the second mutant");
      return out;
    }
    if (s01 < -tol && s21 < -tol) {
      suppressed("the first mutant's swept population repels the second "
                 "mutant");
      return out;
    }
  }
  if (rg.which == RegimeKind::LateArrival && s01 < -tol && s21 < -tol &&
      s20 > tol) {
    suppressed("the completed first sweep leaves no room for the second "
               "mutant");
    return out;
  }

  if (rg.which == RegimeKind::LateArrival && s20 < -tol) {
    double s_gain = 0.0;
    bool matched = false;
    const char* how = "";
    if (s01 > tol && summary.s_tri[2].has_value() &&
        *summary.s_tri[2] > tol) {
      s_gain = *summary.s_tri[2];
      matched = true;
      how = "the settled 0-1 pair admits the second mutant although the "
            "resident alone repels it";
    } else if (s01 < -tol && s21 > tol) {
      const double excess = alpha - 1.0 / s10;
      const double split = 1.0 / std::abs(s01) - 1.0 / s21;
      const bool early =
          excess > tol && excess < split - tol &&
          (s12 > tol || (s12 < -tol && s02 < -tol));
      const bool late = excess > split + tol;
      if (early || late) {
        s_gain = s21;
        matched = true;
        how = "the growing type-1 population admits the second mutant "
              "although the resident alone repels it";
      }
    }
    if (matched) {
      out.which = InvasionEffect::Enabled;
      out.with_interference = (s_gain / beta2) * (s10 / beta1);
      out.without_interference = 0.0;
      out.notes = std::string("the first mutation enables an otherwise "
                              "doomed second invasion: ") +
                  how;
      return out;
    }
  }
  return out;
}

double type2_establishment_probability(const FitnessSummary& summary,
                                       double alpha, bool with_mutation1) {
  const double s20 = summary.S[2][0];
  const double beta2 = summary.params.beta[2];
  const double direct = std::max(s20, 0.0) / beta2;
  if (!with_mutation1) return direct;
  const Regime rg = regime(summary, alpha);
  switch (rg.which) {
    case RegimeKind::Mutant1Leads:
    case RegimeKind::Mutant2Leads:
      return direct;
    case RegimeKind::LateArrival:
    case RegimeKind::NoInterference: {
      if (rg.which == RegimeKind::NoInterference &&
          alpha < 1.0 / std::max(summary.S[1][0], kFeasibilityTol))
        return 0.0;  // S20 < 0 and the second mutant meets the resident
      const double p1 = summary.S[1][0] / summary.params.beta[1];
      const double s01 = summary.S[0][1];
      double s_post = 0.0;
      if (s01 > kFeasibilityTol)
        s_post = require(summary.s_tri[2], "S201");
      else
        s_post = summary.S[2][1];
      const double q_r = std::max(s_post, 0.0) / beta2;
      return (1.0 - p1) * direct + p1 * q_r;
    }
    case RegimeKind::Invalid:
      throw DomainError(
          "type2_establishment_probability: invalid regime (" + rg.reason +
          ")");
  }
  return direct;
}

const char* case_table_json() { return detail::kCaseTableJson; }

}  // namespace clonal
