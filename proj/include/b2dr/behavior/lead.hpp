// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "b2dr/behavior/idm.hpp"
#include "b2dr/scenario/types.hpp"

namespace b2dr {

inline constexpr double kLeadCorridorMargin = 0.5;
inline constexpr double kDefaultLookahead = 60.0;

/// Nearest other box (the ego included) whose center lies inside the agent's
/// route corridor and at most `lookahead` meters ahead along the route.
/// The gap is measured along the route arc between bumpers and may be
/// non-positive when boxes already overlap.
std::optional<Lead> select_lead(const AgentBox& agent, const WorldState& world,
                                double lookahead = kDefaultLookahead,
                                double margin = kLeadCorridorMargin);

}  // namespace b2dr
