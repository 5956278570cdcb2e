// SPDX-License-Identifier: Apache-2.0
#include "b2dr/geometry/projection.hpp"

namespace b2dr {

std::optional<PixelProjection> try_project(const Vec3& point_ego, const Mat4& K) {
  const Eigen::Vector4d h = K * point_ego.homogeneous();
  const double depth = h(2) / h(3);
  if (!(depth > 0.0)) return std::nullopt;
  return PixelProjection{h(0) / h(2), h(1) / h(2), depth};
}

PixelProjection project_point(const Vec3& point_ego, const Mat4& K) {
  const auto p = try_project(point_ego, K);
  if (!p) throw BehindCameraError();
  return *p;
}

Vec3 unproject(double u, double v, double depth, const Mat4& K_inv) {
  const Eigen::Vector4d h = K_inv * Eigen::Vector4d(u * depth, v * depth, depth, 1.0);
  return h.head<3>() / h(3);
}

}  // namespace b2dr
