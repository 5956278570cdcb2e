// SPDX-License-Identifier: Apache-2.0
#include "b2dr/scenario/types.hpp"

#include <cmath>

namespace b2dr {
namespace {

std::array<Vec2, 4> rectangle(const Vec2& center, double yaw, double length, double width) {
  const Vec2 fwd(std::cos(yaw), std::sin(yaw));
  const Vec2 left(-fwd.y(), fwd.x());
  const Vec2 hl = 0.5 * length * fwd;
  const Vec2 hw = 0.5 * width * left;
  return {center + hl + hw, center - hl + hw, center - hl - hw, center + hl - hw};
}

}  // namespace

std::array<Vec3, 8> AgentBox::corners() const {
  const auto base = footprint();
  const double z0 = center.z() - 0.5 * dims.height;
  const double z1 = center.z() + 0.5 * dims.height;
  std::array<Vec3, 8> out;
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = Vec3(base[i].x(), base[i].y(), z0);
    out[i + 4] = Vec3(base[i].x(), base[i].y(), z1);
  }
  return out;
}

std::array<Vec2, 4> AgentBox::footprint() const {
  return rectangle(center.head<2>(), yaw, dims.length, dims.width);
}

Mat3 EgoState::ego_to_global() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  Mat3 m;
  m << c, -s, position.x(), s, c, position.y(), 0.0, 0.0, 1.0;
  return m;
}

Mat4 Camera::intrinsic_matrix() const {
  Mat4 m = Mat4::Identity();
  m(0, 0) = intrinsics.fx;
  m(1, 1) = intrinsics.fy;
  m(0, 2) = intrinsics.cx;
  m(1, 2) = intrinsics.cy;
  return m;
}

Mat4 Camera::K_at(int w, int h) const {
  if (w == width && h == height) return K;
  const double sx = static_cast<double>(w) / width;
  const double sy = static_cast<double>(h) / height;
  Mat4 s = Mat4::Identity();
  s(0, 0) = sx;
  s(1, 1) = sy;
  s(0, 2) = 0.5 * sx - 0.5;
  s(1, 2) = 0.5 * sy - 0.5;
  return s * K;
}

std::optional<std::size_t> CameraRig::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < cameras.size(); ++i)
    if (cameras[i].name == name) return i;
  return std::nullopt;
}

std::array<Vec2, 4> ego_footprint(const EgoState& ego, const BoxDims& dims) {
  return rectangle(ego.position, ego.heading, dims.length, dims.width);
}

AgentBox ego_as_box(const EgoState& ego, const BoxDims& dims) {
  AgentBox box;
  box.id = "ego";
  box.center = Vec3(ego.position.x(), ego.position.y(), 0.5 * dims.height);
  box.dims = dims;
  box.yaw = ego.heading;
  box.velocity = ego.velocity * Vec2(std::cos(ego.heading), std::sin(ego.heading));
  return box;
}

}  // namespace b2dr
