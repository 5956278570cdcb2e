// SPDX-License-Identifier: Apache-2.0
#include "b2dr/simloop/agents.hpp"

#include <algorithm>
#include <cmath>

#include "b2dr/common/angle.hpp"
#include "b2dr/common/error.hpp"
#include "b2dr/scenario/polyline.hpp"
#include "b2dr/scenario/transforms.hpp"

namespace b2dr {

namespace {

constexpr double kIdmRolloutStep = 0.1;

Trajectory empty_plan(const AgentInput& in, const AgentOptions& o) {
  Trajectory t;
  t.waypoint_dt = o.waypoint_dt;
  t.plan_time = in.ego.time;
  t.waypoints.reserve(static_cast<std::size_t>(o.waypoints));
  return t;
}

Trajectory log_replay(const AgentInput& in, const AgentOptions& o) {
  if (in.log == nullptr) throw ConfigError("log-replay agent needs the scenario log");
  Trajectory t = empty_plan(in, o);
  for (int k = 1; k <= o.waypoints; ++k) {
    const Pose2 p = log_pose_at(*in.log, in.ego.time + k * o.waypoint_dt);
    t.waypoints.push_back(global_to_ego(p.position, in.ego));
  }
  return t;
}

Trajectory constant_velocity(const AgentInput& in, const AgentOptions& o) {
  Trajectory t = empty_plan(in, o);
  for (int k = 1; k <= o.waypoints; ++k) t.waypoints.emplace_back(in.ego.velocity * k * o.waypoint_dt, 0.0);
  return t;
}

Trajectory idm_lane(const AgentInput& in, const AgentOptions& o) {
  if (in.route == nullptr || in.route->size() < 2) throw ConfigError("idm-lane agent needs a route");
  const PolylinePath path(*in.route);
  double s = path.project(in.ego.position).arc;
  double v = std::max(0.0, in.ego.velocity);

  std::optional<Lead> lead;
  if (in.world != nullptr) {
    AgentBox self = ego_as_box(in.ego, in.world->ego_dims);
    self.route = *in.route;
    self.route_progress = s;
    lead = select_lead(self, *in.world, o.lookahead);
  }

  Trajectory t = empty_plan(in, o);
  const int per_waypoint = std::max(1, static_cast<int>(std::lround(o.waypoint_dt / kIdmRolloutStep)));
  const double h = o.waypoint_dt / per_waypoint;
  for (int k = 1; k <= o.waypoints; ++k) {
    for (int i = 0; i < per_waypoint; ++i) {
      double a = 0.0;
      try {
        a = idm_acceleration(v, lead, o.idm);
        v = std::max(0.0, v + a * h);
      } catch (const LeadOverlapError&) {
        v = 0.0;
      }
      s = std::min(s + v * h, path.length());
      if (lead) lead->gap += (std::max(0.0, lead->v_lead) - v) * h;
    }
    t.waypoints.push_back(global_to_ego(path.point_at(s), in.ego));
  }
  return t;
}

}  // namespace

Pose2 log_pose_at(const ScenarioLog& log, double t) {
  const auto& f = log.frames;
  if (f.empty()) throw InvariantError("scenario has no frames");
  if (t <= f.front().time) return Pose2{f.front().coord, f.front().heading};
  if (t >= f.back().time) return Pose2{f.back().coord, f.back().heading};
  const auto it = std::upper_bound(f.begin(), f.end(), t, [](double x, const RecordedFrame& r) { return x < r.time; });
  const RecordedFrame& b = *it;
  const RecordedFrame& a = *(it - 1);
  const double u = (t - a.time) / (b.time - a.time);
  return Pose2{a.coord + u * (b.coord - a.coord), wrap_angle(a.heading + u * wrap_angle(b.heading - a.heading))};
}

AgentContract make_builtin_agent(const std::string& kind, const AgentOptions& options) {
  std::string k = kind;
  std::replace(k.begin(), k.end(), '_', '-');
  if (k == "log-replay") return [options](const AgentInput& in) { return log_replay(in, options); };
  if (k == "constant-velocity") return [options](const AgentInput& in) { return constant_velocity(in, options); };
  if (k == "idm-lane") return [options](const AgentInput& in) { return idm_lane(in, options); };
  throw ConfigError("unknown agent kind '" + kind + "' (expected log-replay, constant-velocity or idm-lane)");
}

void check_trajectory(const Trajectory& traj) {
  if (traj.waypoints.empty()) throw InvariantError("agent returned an empty trajectory");
  if (!(traj.waypoint_dt > 0.0)) throw InvariantError("agent trajectory has waypoint_dt <= 0");
  for (const auto& w : traj.waypoints)
    if (!std::isfinite(w.x()) || !std::isfinite(w.y())) throw InvariantError("agent trajectory is not finite");
}

}  // namespace b2dr
