// Structured text format for experiment specs: flat INI-style sections
// mirroring the library types.
//
//   [params]                         ; model parameters (required)
//   beta0 = 2.0   beta1 = 3.0 ...    ; one key per line
//   delta0 = 0.5 ...
//   c00 = 1.0 ... c22 = 1.0          ; competition matrix entries
//   K = 1000
//   alpha = 0.5
//
//   [sim]                            ; optional, defaults applied
//   seed = 1
//   horizon = 0                      ; <= 0: 50 * log K
//   max_events = 1000000000
//   eps = 0.1                        ; recording-level threshold
//   every_event = false
//   stride = 0.1
//   mutation1 = true
//   mutation2 = true
//   condition = none                 ; none|mutant1|mutant2|both
//   condition_level = 0              ; 0: floor(eps * K)
//   stop_when_decided = false
//
//   [analysis]                       ; optional
//   eps = 0.1
//   final_window = 0                 ; <= 0: 3 * log K
//   prominence = 0                   ; <= 0: max(floor(eps^2 K), 5)
//   smoothing = 0.5
//
//   [experiment]                     ; optional
//   replicates = 1000
//   parallelism = 1
//   conditioning = none              ; rejection sampling condition
//   max_attempts = 200
//   targets = invasion_prob(1), final_state_freq
//
// '#' and ';' start comments.  Unknown sections or keys are errors.
#pragma once

#include <map>
#include <string>

#include "clonal/ecology.hpp"
#include "clonal/experiment.hpp"
#include "clonal/gillespie.hpp"
#include "clonal/phase.hpp"

namespace clonal {

struct ConfigFile {
  // section -> key -> value (all raw strings; duplicate keys are errors)
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigFile parse(const std::string& text);  // ConfigError w/ lines
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section,
                         const std::string& key) const;  // ConfigError
};

EcologyParams params_from_config(const ConfigFile& config);
SimConfig sim_from_config(const ConfigFile& config,
                          const EcologyParams& params);
AnalysisConfig analysis_from_config(const ConfigFile& config);

// Composes the three loaders with the [experiment] section.
ExperimentSpec experiment_spec_from_config(const ConfigFile& config);

}  // namespace clonal
