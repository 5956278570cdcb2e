// SPDX-License-Identifier: Apache-2.0
#include "b2dr/behavior/lead.hpp"

#include "b2dr/scenario/polyline.hpp"

namespace b2dr {

std::optional<Lead> select_lead(const AgentBox& agent, const WorldState& world, double lookahead,
                                double margin) {
  if (agent.route.size() < 2) return std::nullopt;
  const PolylinePath path(agent.route);
  const double half_width = 0.5 * agent.dims.width + margin;

  std::optional<Lead> best;
  double best_ahead = 0.0;
  auto consider = [&](const AgentBox& other) {
    const auto proj = path.project(other.center.head<2>());
    if (proj.distance > half_width) return;
    const double ahead = proj.arc - agent.route_progress;
    if (!(ahead > 0.0) || ahead > lookahead) return;
    if (best && ahead >= best_ahead) return;
    best_ahead = ahead;
    const Vec2 tangent = path.tangent_at(proj.arc);
    best = Lead{ahead - 0.5 * agent.dims.length - 0.5 * other.dims.length, other.velocity.dot(tangent)};
  };

  for (const auto& other : world.agents)
    if (other.id != agent.id) consider(other);
  consider(ego_as_box(world.ego, world.ego_dims));
  return best;
}

}  // namespace b2dr
