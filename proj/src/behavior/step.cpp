// SPDX-License-Identifier: Apache-2.0
#include "b2dr/behavior/step.hpp"

#include <algorithm>
#include <cmath>

#include "b2dr/common/angle.hpp"
#include "b2dr/scenario/polyline.hpp"

namespace b2dr {

WorldState step_agents(const WorldState& world, double dt, const IdmTable& params, double lookahead) {
  WorldState next = world;
  next.tick = world.tick + 1;
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    const AgentBox& agent = world.agents[i];
    if (!agent.dynamic || agent.route.size() < 2) continue;
    AgentBox& out = next.agents[i];

    const PolylinePath path(agent.route);
    const IdmParams p = params.for_agent(agent.class_id, agent.target_speed);
    const double v = agent.speed();
    double v_next = 0.0;
    try {
      const double a = idm_acceleration(v, select_lead(agent, world, lookahead), p);
      v_next = std::max(0.0, v + a * dt);
    } catch (const LeadOverlapError&) {
      v_next = 0.0;
    }

    double arc = agent.route_progress + v_next * dt;
    if (arc >= path.length()) {
      arc = path.length();
      v_next = 0.0;
      out.dynamic = false;
    }
    const Vec2 pos = path.point_at(arc);
    const Vec2 tangent = path.tangent_at(arc);
    out.route_progress = arc;
    out.center.x() = pos.x();
    out.center.y() = pos.y();
    out.yaw = wrap_angle(std::atan2(tangent.y(), tangent.x()));
    out.velocity = v_next * tangent;
  }
  return next;
}

}  // namespace b2dr
