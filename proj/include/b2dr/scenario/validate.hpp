// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "b2dr/scenario/types.hpp"

namespace b2dr {

struct Violation {
  std::string entity;
  std::string rule;

  std::string to_string() const { return entity + ": " + rule; }
  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

inline constexpr double kKTolerance = 1e-9;

ValidationReport validate_scenario(const ScenarioLog& log);

/// True when no two non-adjacent edges of the closed ring intersect.
bool polygon_is_simple(const Polyline2& ring);

}  // namespace b2dr
