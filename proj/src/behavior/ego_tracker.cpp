// SPDX-License-Identifier: Apache-2.0
#include "b2dr/behavior/ego_tracker.hpp"

#include <cmath>
#include <sstream>

#include "b2dr/common/angle.hpp"
#include "b2dr/scenario/transforms.hpp"

namespace b2dr {

namespace {
constexpr double kHeadingHoldDistance = 1e-6;
constexpr double kHorizonSlack = 1e-9;
}  // namespace

EgoState track_ego_trajectory(const Trajectory& traj, const EgoState& ego_at_plan, double tau,
                              const EgoState& previous) {
  if (traj.waypoints.empty() || !(traj.waypoint_dt > 0.0))
    throw StalePlanError("stale plan: trajectory has no usable waypoints");
  if (tau < -kHorizonSlack || tau > traj.horizon() + kHorizonSlack) {
    std::ostringstream msg;
    msg << "stale plan: tau=" << tau << " s beyond horizon " << traj.horizon() << " s";
    throw StalePlanError(msg.str());
  }
  if (tau <= 0.0) return ego_at_plan;

  const std::size_t n = traj.waypoints.size();
  const double u = tau / traj.waypoint_dt;
  std::size_t seg = static_cast<std::size_t>(std::floor(u));
  if (seg >= n) seg = n - 1;
  const double frac = u - static_cast<double>(seg);
  const Vec2 a = seg == 0 ? Vec2::Zero() : traj.waypoints[seg - 1];
  const Vec2 b = traj.waypoints[seg];
  const Vec2 local = a + frac * (b - a);
  const Vec2 dir = b - a;

  EgoState out = ego_at_plan;
  out.time = ego_at_plan.time + tau;
  out.position = ego_to_global(local, ego_at_plan);
  out.heading = dir.norm() < kHeadingHoldDistance
                    ? previous.heading
                    : wrap_angle(ego_at_plan.heading + std::atan2(dir.y(), dir.x()));

  const double dt = out.time - previous.time;
  if (dt > 0.0) {
    const Vec2 disp = out.position - previous.position;
    const Vec2 fwd(std::cos(out.heading), std::sin(out.heading));
    out.velocity = disp.dot(fwd) >= 0.0 ? disp.norm() / dt : -disp.norm() / dt;
    out.acceleration = (out.velocity - previous.velocity) / dt;
  } else {
    out.velocity = previous.velocity;
    out.acceleration = previous.acceleration;
  }
  return out;
}

}  // namespace b2dr
