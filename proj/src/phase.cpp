#include "clonal/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "clonal/lv.hpp"
#include "json.hpp"

namespace clonal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Row {
  double time;
  std::array<std::int64_t, 3> counts;
};

// Chronological rows with a synthesized terminal row, so trailing-window
// logic always sees the final state.
std::vector<Row> series(const Trajectory& traj) {
  std::vector<Row> rows;
  rows.reserve(traj.samples.size() + 1);
  for (const TrajectorySample& s : traj.samples)
    rows.push_back({s.time, s.counts});
  if (rows.empty() || rows.back().time < traj.final_state.time)
    rows.push_back({traj.final_state.time, traj.final_state.counts});
  return rows;
}

double effective_window(const AnalysisConfig& cfg, std::int64_t k) {
  if (cfg.final_window > 0.0) return cfg.final_window;
  return 3.0 * std::log(static_cast<double>(k));
}

double effective_prominence(const AnalysisConfig& cfg, std::int64_t k) {
  if (cfg.prominence > 0.0) return cfg.prominence;
  return std::max(std::floor(cfg.eps * cfg.eps * static_cast<double>(k)),
                  5.0);
}

void check_eps(const AnalysisConfig& cfg) {
  if (!(cfg.eps > 0.0))
    throw DomainError("analysis eps must be positive");
}

struct Candidate {
  std::string label;
  Vec3 density;
};

std::vector<Candidate> final_candidates(const FitnessSummary& summary) {
  std::vector<Candidate> out;
  out.push_back({"origin", {0.0, 0.0, 0.0}});
  static const char* axis_names[3] = {"n0", "n1", "n2"};
  for (int i = 0; i < 3; ++i)
    if (summary.nbar[i] > 0.0) {
      Vec3 v{0.0, 0.0, 0.0};
      v[i] = summary.nbar[i];
      out.push_back({axis_names[i], v});
    }
  static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  static const char* pair_names[3] = {"pair01", "pair02", "pair12"};
  for (int p = 0; p < 3; ++p) {
    const int i = pairs[p][0], j = pairs[p][1];
    if (const auto& eq = summary.pair_eq[i][j]; eq.has_value()) {
      Vec3 v{0.0, 0.0, 0.0};
      v[i] = (*eq)[0];
      v[j] = (*eq)[1];
      out.push_back({pair_names[p], v});
    }
  }
  if (const auto interior = interior_equilibrium(summary.params);
      interior.has_value() && (*interior)[0] > 0.0 &&
      (*interior)[1] > 0.0 && (*interior)[2] > 0.0)
    out.push_back({"interior", *interior});
  return out;
}

double l1_distance(const Row& row, const Vec3& density, double inv_k) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    d += std::abs(static_cast<double>(row.counts[i]) * inv_k - density[i]);
  return d;
}

// Peak detection with the scipy conventions: strictly-higher-than-both-
// neighbours local maxima (plateaus collapse to their midpoint), prominence
// = height above the higher of the two bracketing valleys, where each valley
// is the minimum between the peak and the nearest higher sample (or the
// series edge).
std::vector<int> prominent_maxima(const std::vector<double>& y,
                                  double prominence) {
  std::vector<int> peaks;
  const int n = static_cast<int>(y.size());
  int i = 1;
  while (i < n - 1) {
    if (y[i] > y[i - 1]) {
      int j = i;
      while (j < n - 1 && y[j + 1] == y[i]) ++j;  // plateau
      if (j < n - 1 && y[j + 1] < y[i]) peaks.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  std::vector<int> out;
  for (const int p : peaks) {
    double left_min = y[p];
    for (int q = p - 1; q >= 0; --q) {
      left_min = std::min(left_min, y[q]);
      if (y[q] > y[p]) break;
    }
    double right_min = y[p];
    for (int q = p + 1; q < n; ++q) {
      right_min = std::min(right_min, y[q]);
      if (y[q] > y[p]) break;
    }
    const double prom = y[p] - std::max(left_min, right_min);
    if (prom >= prominence && y[p] > 0.0) out.push_back(p);
  }
  return out;
}

}  // namespace

std::optional<double> hitting_time(const Trajectory& trajectory, int type,
                                   std::int64_t level) {
  if (type < 0 || type > 2)
    throw DomainError("hitting_time: type index out of range");
  if (!trajectory.samples.empty() &&
      trajectory.samples.front().counts[type] == level)
    return 0.0;
  const auto& levels = trajectory.levels[type];
  const auto it = std::lower_bound(levels.begin(), levels.end(), level);
  if (it != levels.end() && *it == level) return trajectory.hit_time(type, level);
  if (trajectory.every_event) {
    for (const TrajectorySample& s : trajectory.samples)
      if (s.counts[type] == level) return s.time;
    return std::nullopt;
  }
  throw InsufficientRecordingError(
      "hitting_time: level " + std::to_string(level) + " of type " +
      std::to_string(type) +
      " is neither recorded as a crossing level nor resolvable without "
      "every-event recording");
}

DetectedFinal detect_final_state(const Trajectory& trajectory,
                                 const AnalysisConfig& config,
                                 const FitnessSummary& summary) {
  check_eps(config);
  DetectedFinal out;
  out.entered_at = kNaN;
  out.ball_entry = kNaN;

  const std::vector<Row> rows = series(trajectory);
  const double terminal_time = rows.back().time;
  const double inv_k =
      1.0 / static_cast<double>(summary.params.carrying_capacity);
  const double window =
      effective_window(config, summary.params.carrying_capacity);
  const bool absorbed = trajectory.terminal == Trajectory::Terminal::AllExtinct;

  if (trajectory.terminal != Trajectory::Terminal::HorizonReached &&
      !absorbed) {
    out.note = "trajectory stopped early (" + std::string(to_string(
                   trajectory.terminal)) + "); no final-state claim";
    return out;
  }
  if (!absorbed && terminal_time < window) {
    out.note = "trajectory shorter than the required holding window";
    return out;
  }

  const double window_start = absorbed
                                  ? terminal_time
                                  : std::max(0.0, terminal_time - window);
  const std::vector<Candidate> candidates = final_candidates(summary);
  const Candidate* held = nullptr;
  int held_count = 0;
  for (const Candidate& cand : candidates) {
    bool holds = true;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      if (it->time < window_start) break;
      if (l1_distance(*it, cand.density, inv_k) > config.eps) {
        holds = false;
        break;
      }
    }
    if (holds) {
      held = &cand;
      ++held_count;
    }
  }
  if (held_count == 0) {
    out.note = "no candidate equilibrium holds over the trailing window";
    return out;
  }
  if (held_count > 1) {
    out.note = "several candidate balls hold simultaneously; shrink eps";
    return out;
  }

  out.determined = true;
  out.label = held->label;
  out.density = held->density;
  // Entry-and-hold: walk backwards over the maximal all-inside suffix.
  std::size_t first_of_suffix = rows.size();
  for (std::size_t idx = rows.size(); idx-- > 0;) {
    if (l1_distance(rows[idx], held->density, inv_k) > config.eps) break;
    first_of_suffix = idx;
  }
  out.entered_at = rows[first_of_suffix].time;
  for (const Row& row : rows)
    if (l1_distance(row, held->density, inv_k) <= config.eps) {
      out.ball_entry = row.time;
      break;
    }
  return out;
}

bool detect_invasion(const Trajectory& trajectory, int type, double floor,
                     double from_time) {
  if (type < 0 || type > 2)
    throw DomainError("detect_invasion: type index out of range");
  if (!(floor > 0.0)) throw DomainError("detect_invasion: floor must be > 0");
  const double threshold =
      floor * static_cast<double>(trajectory.carrying_capacity);
  const std::vector<Row> rows = series(trajectory);
  bool any = false;
  for (const Row& row : rows) {
    if (row.time < from_time) continue;
    any = true;
    if (static_cast<double>(row.counts[type]) <= threshold) return false;
  }
  return any;
}

CycleReport detect_cycles(const Trajectory& trajectory,
                          const AnalysisConfig& config) {
  check_eps(config);
  CycleReport report;
  // Uniform strided samples only; level-crossing rows would bias the
  // moving average.
  std::vector<double> t;
  std::array<std::vector<double>, 3> y;
  for (const TrajectorySample& s : trajectory.samples) {
    if (s.event != EventKind::Sample) continue;
    t.push_back(s.time);
    for (int i = 0; i < 3; ++i)
      y[i].push_back(static_cast<double>(s.counts[i]));
  }
  const int n = static_cast<int>(t.size());
  if (n < 3) return report;
  const double h = n >= 2 ? (t.back() - t.front()) / (n - 1) : 0.0;
  const int half = h > 0.0 && config.smoothing > 0.0
                       ? static_cast<int>(std::lround(config.smoothing / h))
                       : 0;
  std::array<std::vector<double>, 3> smooth;
  for (int i = 0; i < 3; ++i) {
    smooth[i].resize(n);
    if (half == 0) {
      smooth[i] = y[i];
      continue;
    }
    std::vector<double> prefix(n + 1, 0.0);
    for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + y[i][j];
    for (int j = 0; j < n; ++j) {
      const int lo = std::max(0, j - half);
      const int hi = std::min(n - 1, j + half);
      smooth[i][j] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    }
  }

  const double prominence =
      effective_prominence(config, trajectory.carrying_capacity);
  const std::vector<int> peaks1 = prominent_maxima(smooth[1], prominence);
  if (peaks1.size() < 2) return report;
  const std::vector<int> peaks0 = prominent_maxima(smooth[0], prominence);
  const std::vector<int> peaks2 = prominent_maxima(smooth[2], prominence);
  const auto count_between = [](const std::vector<int>& peaks, int lo,
                                int hi) {
    int c = 0;
    for (const int p : peaks)
      if (p > lo && p < hi) ++c;
    return c;
  };
  for (std::size_t k = 0; k + 1 < peaks1.size(); ++k) {
    const int lo = peaks1[k], hi = peaks1[k + 1];
    if (count_between(peaks0, lo, hi) >= 1 &&
        count_between(peaks2, lo, hi) >= 1) {
      Cycle c;
      c.start = t[lo];
      c.end = t[hi];
      c.duration = c.end - c.start;
      report.cycles.push_back(c);
    }
  }
  report.count = static_cast<int>(report.cycles.size());
  return report;
}

const char* to_string(PhaseSegment::Kind kind) {
  switch (kind) {
    case PhaseSegment::Kind::Stochastic: return "stochastic";
    case PhaseSegment::Kind::Deterministic: return "deterministic";
  }
  return "?";
}

PhaseReport analyze_phases(const Trajectory& trajectory,
                           const AnalysisConfig& config,
                           const FitnessSummary& summary) {
  check_eps(config);
  PhaseReport report;
  report.seed = trajectory.seed;
  report.terminal = to_string(trajectory.terminal);
  const std::vector<Row> rows = series(trajectory);
  report.terminal_time = rows.back().time;

  for (int i = 0; i < 3; ++i)
    for (std::size_t idx = 0; idx < trajectory.levels[i].size(); ++idx) {
      const double time = trajectory.level_hit_times[i][idx];
      if (!std::isnan(time))
        report.hitting_times.push_back({i, trajectory.levels[i][idx], time});
    }

  // Phase segmentation by the set of microscopic types (alive, below eps*K).
  const double eps_count =
      config.eps * static_cast<double>(summary.params.carrying_capacity);
  const auto micro_set = [&](const Row& row) {
    std::array<bool, 3> m{};
    for (int i = 0; i < 3; ++i)
      m[i] = row.counts[i] > 0 &&
             static_cast<double>(row.counts[i]) < eps_count;
    return m;
  };
  PhaseSegment current;
  current.start = 0.0;
  current.microscopic = micro_set(rows.front());
  current.kind = (current.microscopic[0] || current.microscopic[1] ||
                  current.microscopic[2])
                     ? PhaseSegment::Kind::Stochastic
                     : PhaseSegment::Kind::Deterministic;
  for (const Row& row : rows) {
    const std::array<bool, 3> m = micro_set(row);
    if (m != current.microscopic) {
      current.end = row.time;
      if (current.end > current.start) report.phases.push_back(current);
      current.start = row.time;
      current.microscopic = m;
      current.kind = (m[0] || m[1] || m[2])
                         ? PhaseSegment::Kind::Stochastic
                         : PhaseSegment::Kind::Deterministic;
    }
  }
  current.end = report.terminal_time;
  if (current.end >= current.start) report.phases.push_back(current);

  report.final_state = detect_final_state(trajectory, config, summary);
  if (report.final_state.determined) {
    report.ball_entry_time = report.final_state.ball_entry;
    double sweep = report.final_state.entered_at;
    bool complete = true;
    for (int i = 0; i < 3; ++i) {
      if (report.final_state.density[i] > 0.0) continue;
      const double extinct = trajectory.extinct_at[i];
      if (std::isnan(extinct)) {
        complete = false;
        break;
      }
      sweep = std::max(sweep, extinct);
    }
    if (complete) report.sweep_duration = sweep;
  }
  return report;
}

std::string to_json(const PhaseReport& report, int indent) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["terminal"] = report.terminal;
  j["terminal_time"] = report.terminal_time;
  nlohmann::json hits = nlohmann::json::array();
  for (const HittingRecord& h : report.hitting_times)
    hits.push_back({{"type", h.type}, {"level", h.level}, {"time", h.time}});
  j["hitting_times"] = std::move(hits);
  nlohmann::json phases = nlohmann::json::array();
  for (const PhaseSegment& s : report.phases)
    phases.push_back({{"kind", to_string(s.kind)},
                      {"microscopic", {s.microscopic[0], s.microscopic[1],
                                       s.microscopic[2]}},
                      {"start", s.start},
                      {"end", s.end}});
  j["phases"] = std::move(phases);
  nlohmann::json fin;
  fin["determined"] = report.final_state.determined;
  fin["label"] = report.final_state.label;
  if (report.final_state.determined) {
    fin["density"] = {report.final_state.density[0],
                      report.final_state.density[1],
                      report.final_state.density[2]};
    fin["entered_at"] = report.final_state.entered_at;
  }
  if (!report.final_state.note.empty()) fin["note"] = report.final_state.note;
  j["final_state"] = std::move(fin);
  if (report.ball_entry_time.has_value())
    j["ball_entry_time"] = *report.ball_entry_time;
  if (report.sweep_duration.has_value())
    j["sweep_duration"] = *report.sweep_duration;
  return j.dump(indent);
}

std::string to_json(const CycleReport& report, int indent) {
  nlohmann::json j;
  j["count"] = report.count;
  nlohmann::json cycles = nlohmann::json::array();
  for (const Cycle& c : report.cycles)
    cycles.push_back(
        {{"start", c.start}, {"end", c.end}, {"duration", c.duration}});
  j["cycles"] = std::move(cycles);
  return j.dump(indent);
}

std::string to_csv_row(const PhaseReport& report, const CycleReport* cycles) {
  std::ostringstream oss;
  oss << "seed,terminal,terminal_time,final_label,entered_at,ball_entry,"
         "sweep_duration,cycle_count,first_cycle_duration\n";
  char buf[256];
  const double entered = report.final_state.determined
                             ? report.final_state.entered_at
                             : kNaN;
  const double entry = report.ball_entry_time.value_or(kNaN);
  const double sweep = report.sweep_duration.value_or(kNaN);
  const int count = cycles != nullptr ? cycles->count : 0;
  const double first = (cycles != nullptr && !cycles->cycles.empty())
                           ? cycles->cycles.front().duration
                           : kNaN;
  std::snprintf(buf, sizeof(buf), "%llu,%s,%.17g,%s,%.17g,%.17g,%.17g,%d,%.17g\n",
                static_cast<unsigned long long>(report.seed),
                report.terminal.c_str(), report.terminal_time,
                report.final_state.label.c_str(), entered, entry, sweep,
                count, first);
  oss << buf;
  return oss.str();
}

}  // namespace clonal
