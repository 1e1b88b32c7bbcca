#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "polarpark/trajectory.hpp"

namespace polarpark {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parses a scenario document:
///
///   {
///     "schema_version": 1,
///     "name": "fig3-red",
///     "rho0": 1.0, "delta0": 0.0, "gamma0": -1.2566370614359172,
///     "dt": 0.001, "t_max": 30.0, "cutoff_rho": 0.01, "record_stride": 1,
///     "controller": {"name": "DeadbeatPower", "gains": {"c1": 2.05, "c2": 2.1, "v": 0.5}}
///   }
///
/// The initial pose may instead be given as "x0", "y0", "theta0". Unknown keys,
/// missing gains and a schema_version other than 1 are rejected with
/// InvalidScenario. The parsed scenario is validated.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scn);

/// Names of the built-in scenario sets, sorted.
std::vector<std::string> preset_names();
/// Scenarios of a preset (several for grid presets). Throws InvalidScenario
/// for an unknown name.
std::vector<Scenario> preset(std::string_view name);

}  // namespace polarpark
