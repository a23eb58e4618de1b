// Trajectory post-processing: hitting-time resolution, final-state
// detection with entry-and-hold semantics, invasion persistence, cycle
// statistics and full phase reports.
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "clonal/phase.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace clonal;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

EcologyParams baseline_params(std::int64_t K, double alpha = 0.0) {
  EcologyParams p;
  p.beta = {2.0, 3.0, 0.5};
  p.delta = {0.5, 0.5, 0.5};
  p.comp = {{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}};
  p.carrying_capacity = K;
  p.alpha = alpha;
  return p;
}

TrajectorySample sample_at(double t, std::int64_t n0, std::int64_t n1,
                           std::int64_t n2) {
  TrajectorySample s;
  s.time = t;
  s.counts = {n0, n1, n2};
  s.event = EventKind::Sample;
  return s;
}

Trajectory synthetic(std::vector<TrajectorySample> samples,
                     Trajectory::Terminal terminal, std::int64_t K) {
  Trajectory t;
  t.samples = std::move(samples);
  t.terminal = terminal;
  t.final_state.counts = t.samples.back().counts;
  t.final_state.time = t.samples.back().time;
  t.carrying_capacity = K;
  t.horizon = t.final_state.time;
  t.seed = 1;
  t.extinct_at = {kNaN, kNaN, kNaN};
  return t;
}

}  // namespace

TEST_CASE("hitting-time resolution order") {
  auto traj = synthetic({sample_at(0.0, 150, 1, 0), sample_at(5.0, 140, 9, 0)},
                        Trajectory::Terminal::HorizonReached, 100);
  traj.levels[1] = {10, 999};
  traj.level_hit_times[1] = {2.5, kNaN};

  // Initial state resolves immediately.
  CHECK(hitting_time(traj, 0, 150) == 0.0);
  CHECK(hitting_time(traj, 1, 1) == 0.0);
  // Recorded crossing table.
  CHECK(hitting_time(traj, 1, 10) == 2.5);
  // Recorded but never hit.
  CHECK_FALSE(hitting_time(traj, 1, 999).has_value());
  // Unrecorded level without every-event recording: unresolvable.
  CHECK_THROWS_AS(hitting_time(traj, 1, 31), InsufficientRecordingError);
  CHECK_THROWS_AS(hitting_time(traj, 3, 1), DomainError);

  // Every-event trajectories fall back to a full scan.
  traj.every_event = true;
  CHECK(hitting_time(traj, 1, 9) == 5.0);
  CHECK_FALSE(hitting_time(traj, 1, 31).has_value());
}

TEST_CASE("final-state detection: axis hold with entry times") {
  const auto p = baseline_params(100);  // nbar = (1.5, 2.5, 0)
  const auto summary = fitness_summary(p);

  std::vector<TrajectorySample> rows = {sample_at(0, 150, 1, 0),
                                        sample_at(2, 100, 50, 0),
                                        sample_at(4, 50, 150, 0)};
  for (double t = 6.0; t <= 20.0; t += 1.0)
    rows.push_back(sample_at(t, 0, 250, 0));
  auto traj = synthetic(rows, Trajectory::Terminal::HorizonReached, 100);
  traj.extinct_at = {6.0, kNaN, 0.0};

  AnalysisConfig cfg;  // eps 0.1, window 3*log(100) = 13.8
  const auto fin = detect_final_state(traj, cfg, summary);
  REQUIRE(fin.determined);
  CHECK(fin.label == "n1");
  CHECK(fin.density[1] == doctest::Approx(2.5));
  CHECK(fin.entered_at == doctest::Approx(6.0));
  CHECK(fin.ball_entry == doctest::Approx(6.0));

  // The same evidence through the full report: extinction-complete sweep.
  const auto report = analyze_phases(traj, cfg, summary);
  REQUIRE(report.sweep_duration.has_value());
  CHECK(*report.sweep_duration == doctest::Approx(6.0));
  REQUIRE(report.ball_entry_time.has_value());
  CHECK(*report.ball_entry_time == doctest::Approx(6.0));

  // Phases tile [0, terminal]: a stochastic segment (mutant microscopic)
  // followed by a deterministic one.
  REQUIRE(!report.phases.empty());
  CHECK(report.phases.front().start == 0.0);
  for (std::size_t i = 0; i + 1 < report.phases.size(); ++i)
    CHECK(report.phases[i].end == doctest::Approx(report.phases[i + 1].start));
  CHECK(report.phases.back().end == doctest::Approx(report.terminal_time));
  CHECK(report.phases.front().kind == PhaseSegment::Kind::Stochastic);
  CHECK(report.phases.front().microscopic[1]);
  CHECK(report.phases.back().kind == PhaseSegment::Kind::Deterministic);
}

TEST_CASE("final-state detection: absorption, ambiguity and early stops") {
  const auto p = baseline_params(100);
  const auto summary = fitness_summary(p);
  AnalysisConfig cfg;

  // Total extinction is accepted without a holding window.
  auto dead = synthetic({sample_at(0, 150, 1, 0), sample_at(8, 20, 0, 0),
                         sample_at(10, 3, 0, 0), sample_at(12, 0, 0, 0)},
                        Trajectory::Terminal::AllExtinct, 100);
  dead.extinct_at = {12.0, 8.0, 0.0};
  const auto fin = detect_final_state(dead, cfg, summary);
  REQUIRE(fin.determined);
  CHECK(fin.label == "origin");
  CHECK(fin.entered_at == doctest::Approx(10.0));  // entered at 3/100 already
  CHECK(fin.ball_entry == doctest::Approx(10.0));

  // Far from every candidate: undetermined.
  std::vector<TrajectorySample> wander;
  for (double t = 0.0; t <= 20.0; t += 1.0)
    wander.push_back(sample_at(t, 80, 80, 0));
  const auto lost = detect_final_state(
      synthetic(wander, Trajectory::Terminal::HorizonReached, 100), cfg,
      summary);
  CHECK_FALSE(lost.determined);
  CHECK(lost.label == "undetermined");
  CHECK(std::isnan(lost.entered_at));
  CHECK(!lost.note.empty());

  // Too short for the trailing window.
  const auto brief = detect_final_state(
      synthetic({sample_at(0, 150, 1, 0), sample_at(5, 0, 250, 0)},
                Trajectory::Terminal::HorizonReached, 100),
      cfg, summary);
  CHECK_FALSE(brief.determined);

  // Early-stopped runs make no final-state claim.
  const auto early = detect_final_state(
      synthetic(wander, Trajectory::Terminal::ConditionDecided, 100), cfg,
      summary);
  CHECK_FALSE(early.determined);

  CHECK_THROWS_AS(detect_final_state(dead, AnalysisConfig{-1.0}, summary),
                  DomainError);
}

TEST_CASE("invasion persistence over a window") {
  std::vector<TrajectorySample> rows = {sample_at(0, 150, 1, 0)};
  for (double t = 3.0; t <= 20.0; t += 1.0) rows.push_back(sample_at(t, 140, 1, 8));
  const auto traj = synthetic(rows, Trajectory::Terminal::HorizonReached, 100);

  CHECK(detect_invasion(traj, 2, 0.05, 3.0));        // 8 > 5 throughout
  CHECK_FALSE(detect_invasion(traj, 2, 0.05, 0.0));  // t = 0 row has 0
  CHECK_FALSE(detect_invasion(traj, 2, 0.09, 3.0));  // 8 <= 9
  CHECK_FALSE(detect_invasion(traj, 2, 0.05, 25.0)); // empty window
  CHECK_THROWS_AS(detect_invasion(traj, 5, 0.05, 0.0), DomainError);
  CHECK_THROWS_AS(detect_invasion(traj, 2, 0.0, 0.0), DomainError);
}

TEST_CASE("cycle detection on a synthetic oscillation") {
  // Triangular bumps on integer counts: type 1 peaks at t = 5, 15, 25;
  // type 0 and type 2 each peak once inside both inter-peak intervals.
  auto bump = [](double t, double center, double halfwidth, double height) {
    const double v = (halfwidth - std::abs(t - center)) / halfwidth;
    return v > 0.0 ? static_cast<std::int64_t>(std::llround(height * v)) : 0;
  };
  std::vector<TrajectorySample> rows;
  for (int k = 0; k <= 150; ++k) {
    const double t = 0.2 * k;
    const std::int64_t y0 = 10 + bump(t, 9.0, 2, 50) + bump(t, 19.0, 2, 50);
    const std::int64_t y1 = 10 + bump(t, 5.0, 3, 90) + bump(t, 15.0, 3, 90) +
                            bump(t, 25.0, 3, 90);
    const std::int64_t y2 = 10 + bump(t, 11.4, 2, 50) + bump(t, 21.4, 2, 50);
    rows.push_back(sample_at(t, y0, y1, y2));
  }
  const auto traj = synthetic(rows, Trajectory::Terminal::HorizonReached, 1000);

  AnalysisConfig cfg;
  cfg.prominence = 5.0;
  cfg.smoothing = 0.0;
  const auto report = detect_cycles(traj, cfg);
  REQUIRE(report.count == 2);
  CHECK(report.cycles[0].start == doctest::Approx(5.0));
  CHECK(report.cycles[0].end == doctest::Approx(15.0));
  CHECK(report.cycles[0].duration == doctest::Approx(10.0));
  CHECK(report.cycles[1].duration == doctest::Approx(10.0));

  // Smoothing keeps symmetric apexes in place.
  cfg.smoothing = 0.5;
  CHECK(detect_cycles(traj, cfg).count == 2);

  // A prominence bar above the inner-peak height suppresses every cycle.
  cfg.smoothing = 0.0;
  cfg.prominence = 60.0;
  CHECK(detect_cycles(traj, cfg).count == 0);

  const auto json = nlohmann::json::parse(to_json(report));
  CHECK(json["count"] == 2);
  CHECK(json["cycles"].size() == 2);
}

TEST_CASE("phase report on a simulated sweep") {
  const auto p = baseline_params(300, 0.5);
  const auto summary = fitness_summary(p);
  SimConfig cfg;
  cfg.seed = 42;
  cfg.horizon = 40.0;
  const auto traj = simulate(p, cfg);

  // Stationary fluctuations around an equilibrium of ~n*K individuals have
  // scale sqrt(beta*nbar*K)/K (about 0.08 here), so the final-state ball
  // must be wider than that to hold over the trailing window.
  AnalysisConfig acfg;
  acfg.eps = 0.3;
  const auto report = analyze_phases(traj, acfg, summary);
  CHECK(report.seed == 42);
  CHECK(report.terminal == "horizon_reached");
  CHECK(report.terminal_time == doctest::Approx(40.0));

  REQUIRE(!report.phases.empty());
  CHECK(report.phases.front().start == 0.0);
  for (std::size_t i = 0; i + 1 < report.phases.size(); ++i)
    CHECK(report.phases[i].end == doctest::Approx(report.phases[i + 1].start));
  CHECK(report.phases.back().end == doctest::Approx(report.terminal_time));

  // Either the sweep completed (n1) or the mutant died (n0); both are
  // determined, extinction-complete final states at this horizon.
  REQUIRE(report.final_state.determined);
  CHECK((report.final_state.label == "n0" || report.final_state.label == "n1"));
  REQUIRE(report.sweep_duration.has_value());
  CHECK(*report.sweep_duration > 0.0);
  CHECK(*report.sweep_duration <= 40.0);
  REQUIRE(report.ball_entry_time.has_value());
  CHECK(*report.ball_entry_time <= *report.sweep_duration + 1e-12);

  // Hitting records quote recorded levels only, in-range times.
  for (const auto& h : report.hitting_times) {
    CHECK(h.time >= 0.0);
    CHECK(h.time <= 40.0);
    CHECK(hitting_time(traj, h.type, h.level) == h.time);
  }

  const auto json = nlohmann::json::parse(to_json(report));
  CHECK(json["terminal"] == "horizon_reached");
  CHECK(json["final_state"]["determined"].get<bool>());

  const auto csv = to_csv_row(report);
  CHECK(csv.rfind("seed,terminal,terminal_time,final_label,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
