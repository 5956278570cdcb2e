// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "b2dr/common/error.hpp"
#include "b2dr/scenario/types.hpp"

namespace b2dr {

struct PixelProjection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

class BehindCameraError : public Error {
 public:
  BehindCameraError() : Error("behind camera") {}
};

/// Homogeneous projection of an ego-frame point through a 4x4 K
/// (ego -> image-homogeneous). Throws BehindCameraError when depth <= 0.
PixelProjection project_point(const Vec3& point_ego, const Mat4& K);

/// As project_point, but returns nullopt for points at or behind the camera.
std::optional<PixelProjection> try_project(const Vec3& point_ego, const Mat4& K);

/// Inverse of project_point at a known depth.
Vec3 unproject(double u, double v, double depth, const Mat4& K_inv);

}  // namespace b2dr
