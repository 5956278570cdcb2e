// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <string>

#include "b2dr/scenario/types.hpp"

namespace b2dr {

inline constexpr int kScenarioVersion = 1;

/// Decodes a scenario document without checking domain invariants.
/// Throws ParseError naming the offending field path.
ScenarioLog parse_scenario(const nlohmann::json& doc, std::string base_dir = ".");

/// Reads and parses a scenario file; image paths resolve against its directory.
ScenarioLog parse_scenario_file(const std::string& path);

/// parse_scenario_file followed by validation. A non-empty validation report
/// becomes an InvariantError listing every violation.
ScenarioLog load_scenario(const std::string& path);

nlohmann::json serialize_scenario(const ScenarioLog& log);

void save_scenario(const ScenarioLog& log, const std::string& path);

}  // namespace b2dr
