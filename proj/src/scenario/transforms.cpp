// SPDX-License-Identifier: Apache-2.0
#include "b2dr/scenario/transforms.hpp"

#include <cmath>

#include "b2dr/common/angle.hpp"

namespace b2dr {

Vec2 global_to_ego(const Vec2& point, const EgoState& ego) {
  const double c = std::cos(ego.heading);
  const double s = std::sin(ego.heading);
  const Vec2 d = point - ego.position;
  return Vec2(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
}

Vec3 global_to_ego(const Vec3& point, const EgoState& ego) {
  const Vec2 xy = global_to_ego(Vec2(point.head<2>()), ego);
  return Vec3(xy.x(), xy.y(), point.z());
}

Vec2 ego_to_global(const Vec2& point, const EgoState& ego) {
  const double c = std::cos(ego.heading);
  const double s = std::sin(ego.heading);
  return Vec2(ego.position.x() + c * point.x() - s * point.y(),
              ego.position.y() + s * point.x() + c * point.y());
}

Vec3 ego_to_global(const Vec3& point, const EgoState& ego) {
  const Vec2 xy = ego_to_global(Vec2(point.head<2>()), ego);
  return Vec3(xy.x(), xy.y(), point.z());
}

EgoState pose_state(const Vec2& position, double heading) {
  EgoState e;
  e.position = position;
  e.heading = wrap_angle(heading);
  return e;
}

}  // namespace b2dr
