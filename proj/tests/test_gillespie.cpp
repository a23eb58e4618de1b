// Exact stochastic simulator: determinism, the two-mutation schedule,
// recording and stopping machinery, and agreement with linear birth-death
// theory when competition is switched off by scale.
#include <cmath>
#include <cstdint>
#include <string>

#include "clonal/bd.hpp"
#include "clonal/gillespie.hpp"
#include "doctest.h"

using namespace clonal;

namespace {

EcologyParams baseline_params(std::int64_t K = 1000, double alpha = 0.0) {
  EcologyParams p;
  p.beta = {2.0, 3.0, 0.5};
  p.delta = {0.5, 0.5, 0.5};
  p.comp = {{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}};
  p.carrying_capacity = K;
  p.alpha = alpha;
  return p;
}

EcologyParams speedup_params(std::int64_t K = 1000, double alpha = 0.5) {
  EcologyParams p;
  p.beta = {2, 2, 2};
  p.delta = {0, 0, 0};
  p.comp = {{{1.8, 4, 3}, {1, 2.3, 3}, {1.5, 1, 2.1}}};
  p.carrying_capacity = K;
  p.alpha = alpha;
  return p;
}

// A linear birth-death chain for type 1 alone: competition is suppressed by
// an astronomically large carrying capacity, so death rates stay at delta.
EcologyParams linear_bd_params(double b, double d) {
  EcologyParams p;
  p.beta = {1.0, b, 1.0};
  p.delta = {0.0, d, 0.0};
  p.comp = {{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}};
  p.carrying_capacity = 1000000000000LL;  // 1e12: N/K is negligible
  p.alpha = 0.0;
  return p;
}

}  // namespace

TEST_CASE("initial population and the injection schedule") {
  const auto p = baseline_params(1000, 1.5);
  const auto init = initial_state(p);
  CHECK(init.counts[0] == 1500);  // floor(nbar_0 * K) = floor(1.5 * 1000)
  CHECK(init.counts[1] == 1);
  CHECK(init.counts[2] == 0);
  CHECK(init.time == 0.0);

  SimConfig cfg;
  cfg.seed = 42;
  cfg.horizon = 12.0;
  const auto traj = simulate(p, cfg);
  REQUIRE(traj.injected2_at.has_value());
  CHECK(*traj.injected2_at ==
        doctest::Approx(1.5 * std::log(1000.0)).epsilon(1e-12));

  // The injection appears in the sample stream as its own event kind.
  bool saw_injection = false;
  for (const auto& s : traj.samples)
    if (s.event == EventKind::Inject2) {
      saw_injection = true;
      CHECK(s.time == doctest::Approx(*traj.injected2_at));
      CHECK(s.counts[2] >= 1);
    }
  CHECK(saw_injection);

  // Nonviable resident: nbar_0 <= 0.
  EcologyParams dead = p;
  dead.beta[0] = 0.25;  // rho_0 = -0.25
  CHECK_THROWS_AS(initial_state(dead), NonviableResidentError);
  CHECK_THROWS_AS(simulate(dead, cfg), NonviableResidentError);
}

TEST_CASE("mutation switches") {
  const auto p = baseline_params(500, 0.5);

  SimConfig cfg;
  cfg.seed = 7;
  cfg.horizon = 5.0;  // injection due at 0.5 * log(500) = 3.11
  cfg.mutation2_enabled = false;
  auto traj = simulate(p, cfg);
  CHECK_FALSE(traj.injected2_at.has_value());
  for (const auto& s : traj.samples) CHECK(s.counts[2] == 0);

  cfg.mutation2_enabled = true;
  cfg.mutation1_enabled = false;
  traj = simulate(p, cfg);
  CHECK(traj.samples.front().counts[1] == 0);
  REQUIRE(traj.injected2_at.has_value());

  cfg.initial_counts = {{10, 3, 2}};
  traj = simulate(p, cfg);
  CHECK(traj.samples.front().counts[0] == 10);
  CHECK(traj.samples.front().counts[1] == 3);
  CHECK(traj.samples.front().counts[2] == 2);
}

TEST_CASE("identical seeds replay byte-identical trajectories") {
  const auto p = speedup_params();
  SimConfig cfg;
  cfg.seed = 123456;
  cfg.horizon = 25.0;

  const auto a = simulate(p, cfg);
  const auto b = simulate(p, cfg);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(a.event_count == b.event_count);
  CHECK(a.final_state.counts == b.final_state.counts);
  CHECK(a.final_state.time == b.final_state.time);

  SimConfig other = cfg;
  other.seed = 123457;
  const auto c = simulate(p, other);
  CHECK(to_csv(a) != to_csv(c));
}

TEST_CASE("trajectory CSV format") {
  const auto p = baseline_params(200, 0.3);  // injection at 0.3*log(200) = 1.6
  SimConfig cfg;
  cfg.seed = 5;
  cfg.horizon = 2.0;
  const auto csv = to_csv(simulate(p, cfg));
  CHECK(csv.rfind("t,n0,n1,n2,event\n", 0) == 0);
  CHECK(csv.find(",inj2") != std::string::npos);
  CHECK(csv.find(",sample") != std::string::npos);
}

TEST_CASE("horizon, event budget and full-extinction terminals") {
  const auto p = baseline_params(300);

  SimConfig cfg;
  cfg.seed = 11;
  cfg.horizon = 3.0;
  auto traj = simulate(p, cfg);
  CHECK(traj.terminal == Trajectory::Terminal::HorizonReached);
  CHECK(traj.final_state.time == doctest::Approx(3.0));

  cfg.max_events = 50;
  traj = simulate(p, cfg);
  CHECK(traj.terminal == Trajectory::Terminal::EventBudget);
  CHECK(traj.event_count == 50);

  // A tiny doomed population: K = 1 starts with one resident whose
  // equilibrium count is order one, so absorption at zero is quick.
  const EcologyParams doomed = baseline_params(1);
  SimConfig dcfg;
  dcfg.seed = 3;
  dcfg.horizon = 4000.0;
  dcfg.mutation1_enabled = false;
  dcfg.mutation2_enabled = false;
  traj = simulate(doomed, dcfg);
  CHECK(traj.terminal == Trajectory::Terminal::AllExtinct);
  CHECK(traj.final_state.counts[0] == 0);
  CHECK(traj.extinct_at[0] > 0.0);
  CHECK(traj.extinct_at[1] == 0.0);  // never alive
  CHECK(traj.extinct_at[2] == 0.0);
}

TEST_CASE("stop levels and exact hit times") {
  const auto p = baseline_params(1000);
  SimConfig cfg;
  cfg.seed = 97;
  cfg.horizon = 100.0;
  cfg.stop_level = {0, 100, 0};
  const auto traj = simulate(p, cfg);
  if (traj.terminal == Trajectory::Terminal::LevelReached) {
    CHECK(traj.final_state.counts[1] == 100);
    const auto hit = traj.hit_time(1, 100);
    REQUIRE(hit.has_value());
    CHECK(*hit == doctest::Approx(traj.final_state.time));
  } else {
    // The mutant died; the resident persists to the horizon.
    CHECK(traj.terminal == Trajectory::Terminal::HorizonReached);
    CHECK(traj.final_state.counts[1] == 0);
  }
}

TEST_CASE("default record policy levels and hit-time bookkeeping") {
  const auto p = baseline_params(1000);
  const auto policy = default_record_policy(p, 0.1);
  // Type 1: 0, 1, floor(eps^2 K) = 10, floor(eps K) = 100, plus the
  // equilibrium band around nbar_1 K = 2500.
  const auto& lv = policy.levels[1];
  auto has = [&](std::int64_t x) {
    for (auto v : lv)
      if (v == x) return true;
    return false;
  };
  CHECK(has(0));
  CHECK(has(1));
  CHECK(has(10));
  CHECK(has(100));
  CHECK(has(2250));
  CHECK(has(2500));
  CHECK(has(2750));
  // Type 2 is nonviable here (nbar_2 = 0): small levels only.
  for (auto v : policy.levels[2]) CHECK(v <= 100);

  SimConfig cfg;
  cfg.seed = 2024;
  cfg.horizon = 40.0;
  const auto traj = simulate(p, cfg);
  // Level lists are copied into the trajectory with parallel hit times.
  REQUIRE(traj.levels[1].size() == traj.level_hit_times[1].size());
  const auto h10 = traj.hit_time(1, 10);
  const auto h100 = traj.hit_time(1, 100);
  if (h10 && h100) CHECK(*h10 <= *h100);
  CHECK_FALSE(traj.hit_time(1, 31).has_value());  // unrecorded level
  // First sample is the initial state at t = 0.
  CHECK(traj.samples.front().time == 0.0);
  CHECK(traj.samples.front().counts[0] == 1500);
}

TEST_CASE("condition tracking and early stopping") {
  const auto p = baseline_params(1000);
  SimConfig cfg;
  cfg.seed = 31;
  cfg.horizon = 80.0;
  cfg.condition = Condition::Mutant1Survives;
  cfg.condition_level = 100;

  const auto traj = simulate(p, cfg);
  CHECK(traj.condition_status != Trajectory::ConditionStatus::NotTracked);
  if (traj.condition_status == Trajectory::ConditionStatus::Met) {
    CHECK(traj.hit_time(1, 100).has_value());
    CHECK(traj.condition_decided_at > 0.0);
  }

  // stop_when_decided halts at the decision time.
  SimConfig early = cfg;
  early.stop_when_decided = true;
  const auto short_run = simulate(p, early);
  CHECK(short_run.terminal == Trajectory::Terminal::ConditionDecided);
  CHECK(short_run.condition_status != Trajectory::ConditionStatus::Undecided);
  CHECK(short_run.final_state.time <= traj.final_state.time);
  CHECK(short_run.event_count <= traj.event_count);
}

TEST_CASE("rejection sampling until the condition holds") {
  const auto p = baseline_params(1000);
  SimConfig cfg;
  cfg.seed = 500;
  cfg.horizon = 80.0;

  const auto got =
      simulate_conditioned(p, cfg, Condition::Mutant1Survives, 100, 400);
  CHECK(got.attempts >= 1);
  CHECK(got.trajectory.condition_status == Trajectory::ConditionStatus::Met);
  REQUIRE(got.trajectory.hit_time(1, 100).has_value());

  // An impossible condition exhausts the attempt budget.
  EcologyParams hopeless = baseline_params(1000);
  hopeless.beta[1] = 0.2;  // rho_1 < 0: type 1 is subcritical from the start
  CHECK_THROWS_AS(
      simulate_conditioned(hopeless, cfg, Condition::Mutant1Survives, 5000, 5),
      RejectionBudgetError);
}

TEST_CASE("statistical agreement with linear birth-death hitting laws") {
  // Type 1 alone with b = 2, d = 1 from one individual: P(reach 10 before 0)
  // = 0.500489.  K = 1e12 makes the competition term irrelevant.
  auto run_hits = [](double b, double d, std::int64_t start, std::int64_t top,
                     int reps, std::uint64_t seed0) {
    const auto p = linear_bd_params(b, d);
    int hits = 0;
    for (int r = 0; r < reps; ++r) {
      SimConfig cfg;
      cfg.seed = seed0 + static_cast<std::uint64_t>(r);
      cfg.horizon = 400.0;
      cfg.mutation2_enabled = false;
      cfg.mutation1_enabled = true;
      cfg.initial_counts = {{0, start, 0}};
      cfg.stop_level = {0, top, 0};
      RecordPolicy rec;
      rec.stride = 0.0;
      rec.levels = {};
      cfg.record = rec;
      cfg.record_is_default = false;
      const auto traj = simulate(p, cfg);
      if (traj.terminal == Trajectory::Terminal::LevelReached) ++hits;
      else REQUIRE(traj.terminal == Trajectory::Terminal::AllExtinct);
    }
    return static_cast<double>(hits) / reps;
  };

  const int reps = 4000;
  {
    const double expect = hitting_prob({2, 1}, 0, 1, 10);  // 0.500489
    const double se = std::sqrt(expect * (1 - expect) / reps);
    const double got = run_hits(2, 1, 1, 10, reps, 9001);
    CHECK(std::abs(got - expect) <= 3 * se);
  }
  {
    const double expect = hitting_prob({1, 1}, 0, 3, 10);  // 0.3 critical
    const double se = std::sqrt(expect * (1 - expect) / reps);
    const double got = run_hits(1, 1, 3, 10, reps, 9002);
    CHECK(std::abs(got - expect) <= 3 * se);
  }
}

TEST_CASE("statistical agreement with the extinction-time law") {
  // Subcritical line (b = 1, d = 2) from one individual: P(dead by t = 1)
  // = 0.7746.
  const auto p = linear_bd_params(1, 2);
  const int reps = 4000;
  int dead = 0;
  for (int r = 0; r < reps; ++r) {
    SimConfig cfg;
    cfg.seed = 77000 + static_cast<std::uint64_t>(r);
    cfg.horizon = 1.0;
    cfg.mutation2_enabled = false;
    cfg.initial_counts = {{0, 1, 0}};
    RecordPolicy rec;
    rec.stride = 0.0;
    cfg.record = rec;
    cfg.record_is_default = false;
    const auto traj = simulate(p, cfg);
    if (traj.final_state.counts[1] == 0) ++dead;
  }
  const double expect = extinction_cdf({1, 2}, 1, 1.0);
  const double se = std::sqrt(expect * (1 - expect) / reps);
  CHECK(std::abs(static_cast<double>(dead) / reps - expect) <= 3 * se);
}
