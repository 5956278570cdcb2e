// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "b2dr/common/error.hpp"
#include "b2dr/scenario/types.hpp"

namespace b2dr {

class StalePlanError : public Error {
 public:
  using Error::Error;
};

/// Ego pose `tau` seconds after `ego_at_plan` when following `traj`:
/// linear interpolation through the waypoints, starting from an implicit
/// waypoint at the ego origin. Velocity and acceleration are finite
/// differences against `previous`, the last tracked state.
EgoState track_ego_trajectory(const Trajectory& traj, const EgoState& ego_at_plan, double tau,
                              const EgoState& previous);

inline EgoState track_ego_trajectory(const Trajectory& traj, const EgoState& ego_at_plan, double tau) {
  return track_ego_trajectory(traj, ego_at_plan, tau, ego_at_plan);
}

}  // namespace b2dr
