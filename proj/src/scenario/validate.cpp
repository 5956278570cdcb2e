// SPDX-License-Identifier: Apache-2.0
#include "b2dr/scenario/validate.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <set>

#include "b2dr/scenario/polyline.hpp"

namespace b2dr {
namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_touch(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

bool polygon_is_simple(const Polyline2& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (ring[i] == ring[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a1 = ring[i];
    const Vec2& a2 = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch(a1, a2, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

ValidationReport validate_scenario(const ScenarioLog& log) {
  ValidationReport out;
  auto add = [&out](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  if (log.rig.cameras.empty()) add("rig", "rig needs at least one camera");
  for (const auto& cam : log.rig.cameras) {
    const std::string e = "camera:" + cam.name;
    if (!(cam.intrinsics.fx > 0.0) || !(cam.intrinsics.fy > 0.0)) add(e, "focal lengths must be positive");
    if (!((cam.K - cam.composed_K()).cwiseAbs().maxCoeff() <= kKTolerance))
      add(e, "K differs from intrinsic*extrinsic");
    const Eigen::FullPivLU<Mat4> lu(cam.K);
    if (!lu.isInvertible()) add(e, "K must be invertible");
  }

  if (log.frames.size() < 2) add("scenario", "log needs at least 2 frames");
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const auto& f = log.frames[i];
    const std::string e = "frame[" + std::to_string(i) + "]";
    if (f.image_refs.size() != log.rig.cameras.size()) {
      add(e, "needs one image per camera");
    } else {
      for (std::size_t c = 0; c < f.image_refs.size(); ++c)
        if (f.image_refs[c].empty()) add(e, "missing image for camera " + log.rig.cameras[c].name);
    }
    if (i > 0 && !(f.time > log.frames[i - 1].time)) add(e, "frame times must be strictly increasing");
  }

  for (const auto& m : log.map) {
    const std::string e = "map:" + m.id;
    if (m.class_id >= log.classes.map.size()) add(e, "class_id out of range");
    if (m.kind == ElementKind::kLinestring) {
      if (m.vertices.size() < 2) add(e, "linestring needs ≥2 vertices");
    } else if (m.vertices.size() < 3) {
      add(e, "polygon needs ≥3 vertices");
    } else if (!polygon_is_simple(m.vertices)) {
      add(e, "polygon must be simple");
    }
  }
  for (std::size_t id : log.classes.drivable)
    if (id >= log.classes.map.size()) add("classes", "drivable class out of range");

  std::set<std::string> ids;
  for (const auto& a : log.initial_agents) {
    const std::string e = "agent:" + a.id;
    if (!ids.insert(a.id).second) add(e, "duplicate agent id");
    if (!(a.dims.length > 0.0 && a.dims.width > 0.0 && a.dims.height > 0.0))
      add(e, "dims must be strictly positive");
    if (!(a.yaw >= -std::numbers::pi && a.yaw < std::numbers::pi)) add(e, "yaw must lie in [-pi, pi)");
    if (a.class_id >= log.classes.box.size()) add(e, "class_id out of range");
    if (a.dynamic && a.route.size() < 2) add(e, "dynamic agent needs a route with ≥2 points");
  }

  if (!(polyline_length(log.ego_route) > 0.0)) add("ego_route", "ego_route arc length must be positive");
  return out;
}

}  // namespace b2dr
