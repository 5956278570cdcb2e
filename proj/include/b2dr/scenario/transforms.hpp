// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "b2dr/scenario/types.hpp"

namespace b2dr {

Vec2 global_to_ego(const Vec2& point, const EgoState& ego);
Vec3 global_to_ego(const Vec3& point, const EgoState& ego);
Vec2 ego_to_global(const Vec2& point, const EgoState& ego);
Vec3 ego_to_global(const Vec3& point, const EgoState& ego);

/// Pose-only ego used when transforming with a recorded frame's pose.
EgoState pose_state(const Vec2& position, double heading);

}  // namespace b2dr
