// Deterministic competitive dynamics: subsystem construction, integration
// accuracy against closed forms and external references, equilibrium
// selection, settling times, qualitative classification, permanence and
// diagonal Lyapunov certificates.
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "clonal/lv.hpp"
#include "doctest.h"

using namespace clonal;

namespace {

EcologyParams make_params(const Vec3& beta, const Vec3& delta, const Mat3& comp,
                          std::int64_t K = 1000, double alpha = 0.0) {
  EcologyParams p;
  p.beta = beta;
  p.delta = delta;
  p.comp = comp;
  p.carrying_capacity = K;
  p.alpha = alpha;
  return p;
}

EcologyParams speedup_params() {
  return make_params({2, 2, 2}, {0, 0, 0},
                     {{{1.8, 4, 3}, {1, 2.3, 3}, {1.5, 1, 2.1}}}, 1000, 0.5);
}

EcologyParams rps_params() {
  return make_params({2, 2, 2}, {0, 0, 0},
                     {{{2, 2.5, 1}, {1, 2, 3}, {3, 1, 2}}}, 1000, 1.1);
}

}  // namespace

TEST_CASE("subsystem construction restricts growth and competition") {
  const auto p = speedup_params();

  const auto full = lv_subsystem(p, {0, 1, 2});
  CHECK(full.dim == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(full.growth[i] == doctest::Approx(2.0));
    CHECK(full.type_labels[i] == i);
    for (int j = 0; j < 3; ++j)
      CHECK(full.comp[i][j] == doctest::Approx(p.comp[i][j]));
  }

  const auto pair02 = lv_subsystem(p, {0, 2});
  CHECK(pair02.dim == 2);
  CHECK(pair02.type_labels[0] == 0);
  CHECK(pair02.type_labels[1] == 2);
  CHECK(pair02.comp[0][0] == doctest::Approx(1.8));
  CHECK(pair02.comp[0][1] == doctest::Approx(3.0));   // effect of 2 on 0
  CHECK(pair02.comp[1][0] == doctest::Approx(1.5));   // effect of 0 on 2
  CHECK(pair02.comp[1][1] == doctest::Approx(2.1));

  CHECK_THROWS_AS(lv_subsystem(p, {}), std::invalid_argument);
  CHECK_THROWS_AS(lv_subsystem(p, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(lv_subsystem(p, {0, 3}), std::invalid_argument);
}

TEST_CASE("integration matches the closed-form logistic solution") {
  // dz/dt = z(1 - 2z), z(0) = 0.05: z(t) = 0.5 / (1 + 9 e^{-t}).
  LVSystem sys;
  sys.dim = 1;
  sys.growth = {1.0, 0.0, 0.0};
  sys.comp = {{{2, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
  sys.type_labels = {0, 1, 2};

  const auto sol = integrate(sys, {0.05, 0.0, 0.0}, 4.0, 1e-10);
  CHECK(sol.at(4.0)[0] ==
        doctest::Approx(0.42924322487910704).epsilon(1e-9));
  CHECK(sol.at(0.0)[0] == doctest::Approx(0.05));
  // Interpolated interior point (linear between accepted steps).
  CHECK(sol.at(2.0)[0] ==
        doctest::Approx(0.5 / (1.0 + 9.0 * std::exp(-2.0))).epsilon(1e-4));
}

TEST_CASE("integration matches external references in 2D and 3D") {
  const auto p = speedup_params();

  // Types 0 and 1 from a near-monomorphic start with a rare invader.
  const auto sys01 = lv_subsystem(p, {0, 1});
  const auto sol01 =
      integrate(sys01, {1.111111111111111, 0.001, 0.0}, 20.0, 1e-10);
  const auto z3 = sol01.at(3.0);
  CHECK(z3[0] == doctest::Approx(1.08927907).epsilon(1e-4));
  CHECK(z3[1] == doctest::Approx(0.01421835).epsilon(1e-3));
  const auto z20 = sol01.at(20.0);
  CHECK(z20[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(z20[1] == doctest::Approx(0.869565196).epsilon(1e-6));

  // Symmetric pair converges to (2/3, 2/3).
  LVSystem pair;
  pair.dim = 2;
  pair.growth = {2.0, 2.0, 0.0};
  pair.comp = {{{2, 1, 0}, {1, 2, 0}, {0, 0, 0}}};
  pair.type_labels = {0, 1, 2};
  const auto psol = integrate(pair, {0.05, 1.2, 0.0}, 8.0, 1e-10);
  const auto p2 = psol.at(2.0);
  CHECK(p2[0] == doctest::Approx(0.22613506).epsilon(1e-4));
  CHECK(p2[1] == doctest::Approx(0.92117916).epsilon(1e-4));
  const auto p8 = psol.at(8.0);
  CHECK(p8[0] == doctest::Approx(0.65596125).epsilon(1e-6));
  CHECK(p8[1] == doctest::Approx(0.67704875).epsilon(1e-6));

  // Full cyclic 3D flow.
  const auto rsys = lv_subsystem(rps_params(), {0, 1, 2});
  const auto rsol = integrate(rsys, {0.5, 0.3, 0.2}, 10.0, 1e-10);
  const auto r10 = rsol.at(10.0);
  CHECK(r10[0] == doctest::Approx(0.38888861).epsilon(1e-5));
  CHECK(r10[1] == doctest::Approx(0.28582297).epsilon(1e-5));
  CHECK(r10[2] == doctest::Approx(0.35098556).epsilon(1e-5));
}

TEST_CASE("axes are exactly invariant and domain checks fire") {
  const auto sys = lv_subsystem(speedup_params(), {0, 1, 2});
  const auto sol = integrate(sys, {0.7, 0.0, 0.2}, 5.0);
  for (std::size_t i = 0; i < sol.states.size(); ++i)
    CHECK(sol.states[i][1] == 0.0);  // exact zero, not approximately

  CHECK_THROWS_AS(integrate(sys, {0.5, 0.5, 0.5}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, {-0.5, 0.5, 0.5}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ODESolution{}.at(0.0), std::logic_error);
}

TEST_CASE("solution CSV uses type-label columns") {
  const auto sys = lv_subsystem(speedup_params(), {0, 2});
  const auto sol = integrate(sys, {1.0, 0.5, 0.0}, 1.0);
  const auto csv = to_csv(sol, 0.5);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,n0,n1,n2");
  REQUIRE(std::getline(in, line));
  CHECK(line.substr(0, 2) == "0,");
  // The type-1 column is identically "0" for a {0,2} subsystem.
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);  // t = 0, 0.5, 1.0
}

TEST_CASE("stable equilibrium of a 2D system") {
  // Symmetric coexistence.
  LVSystem pair;
  pair.dim = 2;
  pair.growth = {2.0, 2.0, 0.0};
  pair.comp = {{{2, 1, 0}, {1, 2, 0}, {0, 0, 0}}};
  const auto eq = stable_equilibrium_2d(pair);
  CHECK(eq[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(eq[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Dominance: second coordinate wins, first goes extinct.
  // S_first(second) = 1.5 - 2.5 < 0, S_second(first) = 2.5 - 1.5 > 0.
  LVSystem dom;
  dom.dim = 2;
  dom.growth = {1.5, 2.5, 0.0};
  dom.comp = {{{1, 1, 0}, {1, 1, 0}, {0, 0, 0}}};
  const auto ax = stable_equilibrium_2d(dom);
  CHECK(ax[0] == doctest::Approx(0.0));
  CHECK(ax[1] == doctest::Approx(2.5).epsilon(1e-12));

  // Bistable sign pattern has no unique stable point.
  LVSystem bist;
  bist.dim = 2;
  bist.growth = {2.0, 2.0, 0.0};
  bist.comp = {{{2, 3, 0}, {3, 2, 0}, {0, 0, 0}}};
  CHECK_THROWS_AS(stable_equilibrium_2d(bist), DomainError);

  // Vanishing net growth on both coordinates.
  LVSystem degen;
  degen.dim = 2;
  degen.growth = {0.0, 0.0, 0.0};
  degen.comp = {{{1, 1, 0}, {1, 1, 0}, {0, 0, 0}}};
  CHECK_THROWS_AS(stable_equilibrium_2d(degen), DegenerateError);
}

TEST_CASE("settling time to the 2D equilibrium") {
  LVSystem pair;
  pair.dim = 2;
  pair.growth = {2.0, 2.0, 0.0};
  pair.comp = {{{2, 1, 0}, {1, 2, 0}, {0, 0, 0}}};

  const double t_settle = time_to_equilibrium(pair, {0.05, 1.2}, 0.05);
  CHECK(t_settle > 0.0);
  CHECK(t_settle < 20.0);
  // Verify the claim: at the reported time the state is within eps^2 (L1).
  const auto sol = integrate(pair, {0.05, 1.2, 0.0}, t_settle + 1.0, 1e-10);
  const auto z = sol.at(t_settle);
  CHECK(std::abs(z[0] - 2.0 / 3.0) + std::abs(z[1] - 2.0 / 3.0) <=
        0.05 * 0.05 + 1e-6);
  // Tighter tolerance means a later settling time.
  CHECK(time_to_equilibrium(pair, {0.05, 1.2}, 0.02) >= t_settle);

  CHECK_THROWS_AS(time_to_equilibrium(pair, {0.05, 1.2}, 0.05, 1e-3),
                  NotSettledError);
  CHECK_THROWS_AS(time_to_equilibrium(pair, {0.05, 1.2}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("worst-case settling over invader initial conditions") {
  const auto p = speedup_params();
  const double worst = worst_case_settling(p, 1, 0.05, 3);
  CHECK(worst > 0.0);
  CHECK(worst < 100.0);
  // Coarser grid cannot beat a finer grid's supremum by construction.
  CHECK(worst_case_settling(p, 1, 0.05, 5) >= worst - 1e-9);

  CHECK_THROWS_AS(worst_case_settling(p, 0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(worst_case_settling(p, 1, 0.05, 0), std::invalid_argument);
  // Type 2 in the annihilation parameters cannot invade the wild type.
  const auto ann = make_params(
      {2, 2, 2}, {0, 0, 0}, {{{1.8, 2.5, 1.5}, {1, 2.3, 5}, {3, 1, 2.1}}});
  CHECK_THROWS_AS(worst_case_settling(ann, 2, 0.05), std::invalid_argument);
}

TEST_CASE("qualitative outcome: global exclusion") {
  const auto p = make_params({2, 3, 1.2}, {0.5, 0.5, 0.5},
                             {{{1, 1, 1}, {1, 1, 1.1}, {1.2, 1, 2}}});
  const auto out = classify(fitness_summary(p));
  CHECK(out.kind == QualitativeOutcome::Kind::GlobalExclusion);
  CHECK(out.winner == 1);
  REQUIRE(out.attractor_indices.size() == 1);
  const auto& fp = out.fixed_points[out.attractor_indices[0]];
  CHECK(fp.kind == FixedPointInfo::Kind::Axis);
  CHECK(fp.location[1] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fp.stable);

  const auto sp = classify(fitness_summary(speedup_params()));
  CHECK(sp.kind == QualitativeOutcome::Kind::GlobalExclusion);
  CHECK(sp.winner == 2);
}

TEST_CASE("qualitative outcome: planar and interior coexistence") {
  // Types 0 and 1 coexist; type 2 is excluded by both.
  const auto planar = make_params({2, 2, 2}, {0, 0, 0},
                                  {{{2, 1, 1}, {1, 2, 1}, {3, 2.5, 2}}});
  const auto pout = classify(fitness_summary(planar));
  CHECK(pout.kind == QualitativeOutcome::Kind::PlanarCoexistence);
  CHECK(pout.pair[0] == 0);
  CHECK(pout.pair[1] == 1);

  // Weak cross-competition: all three coexist at (0.4, 0.4, 0.4).
  const auto interior = make_params(
      {2, 2, 2}, {0, 0, 0}, {{{4, 0.5, 0.5}, {0.5, 4, 0.5}, {0.5, 0.5, 4}}},
      10000);
  const auto iout = classify(fitness_summary(interior));
  CHECK(iout.kind == QualitativeOutcome::Kind::InteriorCoexistence);
  bool found_interior = false;
  for (const auto& fp : iout.fixed_points)
    if (fp.kind == FixedPointInfo::Kind::Interior) {
      found_interior = true;
      for (int i = 0; i < 3; ++i)
        CHECK(fp.location[i] == doctest::Approx(0.4).epsilon(1e-10));
    }
  CHECK(found_interior);
}

TEST_CASE("qualitative outcome: bistability and cyclic ambiguity") {
  const auto bist = make_params({2, 2, 2}, {0, 0, 0},
                                {{{2, 3, 3}, {3, 2, 3}, {3, 3, 2}}});
  CHECK(classify(fitness_summary(bist)).kind ==
        QualitativeOutcome::Kind::Bistable);

  const auto cyc = classify(fitness_summary(rps_params()));
  CHECK(cyc.kind == QualitativeOutcome::Kind::AmbiguousPossiblyPeriodic);
  REQUIRE(cyc.permanent.has_value());
  CHECK(*cyc.permanent);

  // Dead zero row: type 2 is not viable.
  const auto dead = make_params({2, 3, 0.5}, {0.5, 0.5, 0.5},
                                {{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}});
  CHECK_THROWS_AS(classify(fitness_summary(dead)), std::invalid_argument);
}

TEST_CASE("permanence criterion for the cyclic pattern") {
  CHECK(permanence_check(fitness_summary(rps_params())));

  // Reversed strength: the heteroclinic boundary cycle attracts.
  const auto rev = make_params({2, 2, 2}, {0, 0, 0},
                               {{{2, 3, 1.5}, {1.5, 2, 3}, {3, 1.5, 2}}});
  CHECK_FALSE(permanence_check(fitness_summary(rev)));

  // First worked example: weak cyclic interaction, permanent.
  const auto ex1 = make_params(
      {1.156, 1, 2}, {0, 0, 0},
      {{{2, 1, 1}, {1, 0.844, 1}, {3.84, 1, 1.75}}});
  const auto s1 = fitness_summary(ex1);
  CHECK(s1.S[0][1] == doctest::Approx(-0.028834123222749).epsilon(1e-9));
  CHECK(s1.S[0][2] == doctest::Approx(0.013142857142857).epsilon(1e-9));
  CHECK(s1.S[1][0] == doctest::Approx(0.422).epsilon(1e-12));
  CHECK(s1.S[1][2] == doctest::Approx(-0.142857142857143).epsilon(1e-9));
  CHECK(s1.S[2][0] == doctest::Approx(-0.21952).epsilon(1e-9));
  CHECK(s1.S[2][1] == doctest::Approx(0.815165876777251).epsilon(1e-9));
  CHECK(permanence_check(s1));

  CHECK_THROWS_AS(permanence_check(fitness_summary(speedup_params())),
                  WrongSignPatternError);
}

TEST_CASE("diagonal Lyapunov certificates") {
  // Cyclic builder output with eta = 0.25: sym(C) itself is positive
  // definite, so d = (1, 1, 1) certifies.
  const Mat3 vl = {{{2, 2.5, 0.5}, {0.5, 2, 2.5}, {2.5, 0.5, 2}}};
  CHECK(vl_verify(vl, {1, 1, 1}));  // minors 2, 1.75, 1.25
  const auto cert = vl_certificate(vl);
  REQUIRE(cert.has_value());
  CHECK(vl_verify(vl, *cert));
  for (int i = 0; i < 3; ++i) CHECK((*cert)[i] > 0.0);

  // Cyclic example matrix: equal weights do NOT certify (det < 0).
  const Mat3 rps = {{{2, 2.5, 1}, {1, 2, 3}, {3, 1, 2}}};
  CHECK_FALSE(vl_verify(rps, {1, 1, 1}));

  CHECK_THROWS_AS(vl_certificate({{{1, 1, 1}, {1, 0, 1}, {1, 1, 1}}}),
                  std::invalid_argument);
}

TEST_CASE("interior equilibrium of the rescaled flow") {
  const auto r = interior_equilibrium(rps_params());
  REQUIRE(r.has_value());
  CHECK((*r)[0] == doctest::Approx(0.344827586206897).epsilon(1e-10));
  CHECK((*r)[1] == doctest::Approx(0.413793103448276).epsilon(1e-10));
  CHECK((*r)[2] == doctest::Approx(0.275862068965517).epsilon(1e-10));

  const auto interior = make_params(
      {2, 2, 2}, {0, 0, 0}, {{{4, 0.5, 0.5}, {0.5, 4, 0.5}, {0.5, 0.5, 4}}});
  const auto q = interior_equilibrium(interior);
  REQUIRE(q.has_value());
  for (int i = 0; i < 3; ++i) CHECK((*q)[i] == doctest::Approx(0.4).epsilon(1e-12));

  // Uniform competition: singular system.
  const auto flat = make_params({2, 3, 0.5}, {0.5, 0.5, 0.5},
                                {{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}});
  CHECK_FALSE(interior_equilibrium(flat).has_value());
}
