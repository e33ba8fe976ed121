#pragma once

#include <string>

#include "occsim/sweeps.hpp"

namespace occsim {

/// Loads a scenario from its JSON form. Lengths are meters, speeds km/h,
/// angles degrees; see the README for the field reference. Throws
/// ConfigError with the offending field path.
ScenarioConfig load_scenario(const std::string& json_text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Loads a sweep experiment: a scenario plus a "sweep" object.
ExperimentSpec load_experiment(const std::string& json_text);
ExperimentSpec load_experiment_file(const std::string& path);

} // namespace occsim
