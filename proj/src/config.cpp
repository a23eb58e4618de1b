#include "clonal/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "clonal/errors.hpp"

namespace clonal {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": expected a number, got '" +
                      value + "'");
  }
}

std::int64_t parse_int(const std::string& section, const std::string& key,
                       const std::string& value) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& section, const std::string& key,
                const std::string& value) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("[" + section + "] " + key + ": expected a boolean, got '" +
                    value + "'");
}

Condition parse_condition(const std::string& section, const std::string& key,
                          const std::string& value) {
  const std::string v = lower(value);
  if (v == "none") return Condition::None;
  if (v == "mutant1") return Condition::Mutant1Survives;
  if (v == "mutant2") return Condition::Mutant2Survives;
  if (v == "both") return Condition::BothSurvive;
  throw ConfigError("[" + section + "] " + key +
                    ": expected none|mutant1|mutant2|both, got '" + value + "'");
}

// Tracks which keys were consumed so unknown keys can be reported.
class SectionReader {
 public:
  SectionReader(const ConfigFile& config, std::string section)
      : config_(config), section_(std::move(section)) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return config_.has(section_, key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return parse_double(section_, key, config_.get(section_, key));
  }

  double required_number(const std::string& key) {
    if (!has(key))
      throw ConfigError("[" + section_ + "] missing required key '" + key + "'");
    return parse_double(section_, key, config_.get(section_, key));
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    return parse_int(section_, key, config_.get(section_, key));
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    return parse_bool(section_, key, config_.get(section_, key));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return config_.get(section_, key);
  }

  void reject_unknown_keys() const {
    auto it = config_.sections.find(section_);
    if (it == config_.sections.end()) return;
    for (const auto& [key, value] : it->second) {
      if (!seen_.count(key))
        throw ConfigError("[" + section_ + "] unknown key '" + key + "'");
    }
  }

 private:
  const ConfigFile& config_;
  std::string section_;
  std::set<std::string> seen_;
};

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile config;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto comment = raw.find_first_of("#;");
    if (comment != std::string::npos) raw = raw.substr(0, comment);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      config.sections[section];  // register even if empty
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    if (section.empty()) fail(line_no, "key outside of any [section]");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    auto& sec = config.sections[section];
    if (sec.count(key)) fail(line_no, "duplicate key '" + key + "'");
    sec[key] = value;
  }
  return config;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  if (it == sections.end()) return false;
  return it->second.count(key) > 0;
}

const std::string& ConfigFile::get(const std::string& section,
                                   const std::string& key) const {
  auto it = sections.find(section);
  if (it == sections.end()) throw ConfigError("missing section [" + section + "]");
  auto kt = it->second.find(key);
  if (kt == it->second.end())
    throw ConfigError("[" + section + "] missing key '" + key + "'");
  return kt->second;
}

EcologyParams params_from_config(const ConfigFile& config) {
  if (!config.sections.count("params"))
    throw ConfigError("missing required section [params]");
  SectionReader sec(config, "params");
  EcologyParams params;
  for (int i = 0; i < 3; ++i) {
    params.beta[i] = sec.required_number("beta" + std::to_string(i));
    params.delta[i] = sec.required_number("delta" + std::to_string(i));
    for (int j = 0; j < 3; ++j)
      params.comp[i][j] =
          sec.required_number("c" + std::to_string(i) + std::to_string(j));
  }
  params.carrying_capacity =
      static_cast<std::int64_t>(sec.required_number("K"));
  params.alpha = sec.required_number("alpha");
  sec.reject_unknown_keys();
  try {
    validate(params);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("[params] ") + err.what());
  }
  return params;
}

SimConfig sim_from_config(const ConfigFile& config, const EcologyParams& params) {
  SectionReader sec(config, "sim");
  SimConfig sim;
  sim.seed = static_cast<std::uint64_t>(sec.integer("seed", 1));
  sim.horizon = sec.number("horizon", 0.0);
  sim.max_events = sec.integer("max_events", sim.max_events);
  sim.mutation1_enabled = sec.boolean("mutation1", true);
  sim.mutation2_enabled = sec.boolean("mutation2", true);
  sim.condition = parse_condition("sim", "condition", sec.text("condition", "none"));
  sim.condition_level = sec.integer("condition_level", 0);
  sim.stop_when_decided = sec.boolean("stop_when_decided", false);
  const bool custom_eps = sec.has("eps");
  const double eps = sec.number("eps", 0.1);
  const bool every_event = sec.boolean("every_event", false);
  const bool custom_stride = sec.has("stride");
  const double stride = sec.number("stride", 0.1);
  if (custom_eps || every_event || custom_stride) {
    sim.record = default_record_policy(params, eps);
    sim.record.every_event = every_event;
    sim.record.stride = stride;
    sim.record_is_default = false;
  }
  sec.reject_unknown_keys();
  return sim;
}

AnalysisConfig analysis_from_config(const ConfigFile& config) {
  SectionReader sec(config, "analysis");
  AnalysisConfig analysis;
  analysis.eps = sec.number("eps", analysis.eps);
  analysis.final_window = sec.number("final_window", analysis.final_window);
  analysis.prominence = sec.number("prominence", analysis.prominence);
  analysis.smoothing = sec.number("smoothing", analysis.smoothing);
  sec.reject_unknown_keys();
  return analysis;
}

ExperimentSpec experiment_spec_from_config(const ConfigFile& config) {
  for (const auto& [name, keys] : config.sections) {
    if (name != "params" && name != "sim" && name != "analysis" &&
        name != "experiment")
      throw ConfigError("unknown section [" + name + "]");
  }
  ExperimentSpec spec;
  spec.params = params_from_config(config);
  spec.sim = sim_from_config(config, spec.params);
  spec.analysis = analysis_from_config(config);
  SectionReader sec(config, "experiment");
  spec.replicates = static_cast<int>(sec.integer("replicates", 1));
  spec.parallelism = static_cast<int>(sec.integer("parallelism", 1));
  spec.conditioning =
      parse_condition("experiment", "conditioning", sec.text("conditioning", "none"));
  spec.max_attempts = static_cast<int>(sec.integer("max_attempts", 200));
  if (sec.has("targets")) {
    std::istringstream list(sec.text("targets", ""));
    std::string item;
    while (std::getline(list, item, ',')) {
      item = trim(item);
      if (!item.empty()) spec.targets.push_back(parse_target(item));
    }
  }
  sec.reject_unknown_keys();
  if (spec.replicates < 1) throw ConfigError("[experiment] replicates must be >= 1");
  if (spec.parallelism < 1) throw ConfigError("[experiment] parallelism must be >= 1");
  if (spec.max_attempts < 1) throw ConfigError("[experiment] max_attempts must be >= 1");
  return spec;
}

}  // namespace clonal
