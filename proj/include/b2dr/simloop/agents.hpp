// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

#include "b2dr/render/backend.hpp"
#include "b2dr/simloop/config.hpp"

namespace b2dr {

/// What a planner sees at one planning tick. `world` and `log` are
/// privileged views for the built-in stand-in agents; image-driven agents
/// use only `frame`, `ego`, `route` and `goal`.
struct AgentInput {
  const RenderedFrame* frame = nullptr;
  EgoState ego;
  const Polyline2* route = nullptr;
  Vec2 goal = Vec2::Zero();
  const WorldState* world = nullptr;
  const ScenarioLog* log = nullptr;
};

using AgentContract = std::function<Trajectory(const AgentInput&)>;

/// Recorded ego pose at time t, linearly interpolated between frames and held
/// at either end of the log. Heading follows the nearer frame's recorded value
/// blended on the shortest arc.
Pose2 log_pose_at(const ScenarioLog& log, double t);

struct AgentOptions {
  int waypoints = 6;
  double waypoint_dt = 0.5;
  IdmParams idm;
  double lookahead = kDefaultLookahead;
};

/// "log-replay", "constant-velocity" or "idm-lane" (underscores accepted).
/// Throws ConfigError for other kinds.
AgentContract make_builtin_agent(const std::string& kind, const AgentOptions& options = {});

/// Throws InvariantError when the trajectory is empty or not finite.
void check_trajectory(const Trajectory& traj);

}  // namespace b2dr
