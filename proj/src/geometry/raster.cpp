// SPDX-License-Identifier: Apache-2.0
#include "b2dr/geometry/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "b2dr/scenario/transforms.hpp"

namespace b2dr {

std::size_t ControlMaskStack::count(int c) const {
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  const auto begin = data.begin() + static_cast<std::ptrdiff_t>(plane * c);
  return static_cast<std::size_t>(std::count(begin, begin + static_cast<std::ptrdiff_t>(plane), 1));
}

std::vector<std::uint8_t> ControlMaskStack::union_mask() const {
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  std::vector<std::uint8_t> out(plane, 0);
  for (int c = 0; c < channels; ++c)
    for (std::size_t i = 0; i < plane; ++i) out[i] |= data[plane * c + i];
  return out;
}

const std::array<std::array<int, 2>, 12>& box_edges() {
  static const std::array<std::array<int, 2>, 12> edges{{{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                                          {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                                          {0, 4}, {1, 5}, {2, 6}, {3, 7}}};
  return edges;
}

namespace {

// Liang-Barsky against [xmin, xmax] x [ymin, ymax].
bool clip_to_rect(double& x0, double& y0, double& x1, double& y1, double xmin, double xmax,
                  double ymin, double ymax) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x0 - xmin, xmax - x0, y0 - ymin, ymax - y0};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      if (r > t1) return false;
      t0 = std::max(t0, r);
    } else {
      if (r < t0) return false;
      t1 = std::min(t1, r);
    }
  }
  const double nx0 = x0 + t0 * dx;
  const double ny0 = y0 + t0 * dy;
  x1 = x0 + t1 * dx;
  y1 = y0 + t1 * dy;
  x0 = nx0;
  y0 = ny0;
  return true;
}

long round_px(double x) { return static_cast<long>(std::floor(x + 0.5)); }

void bresenham(ControlMaskStack& masks, int channel, long x0, long y0, long x1, long y1) {
  const long dx = std::labs(x1 - x0);
  const long dy = -std::labs(y1 - y0);
  const long sx = x0 < x1 ? 1 : -1;
  const long sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  while (true) {
    if (x0 >= 0 && x0 < masks.width && y0 >= 0 && y0 < masks.height)
      masks.set(channel, static_cast<int>(y0), static_cast<int>(x0));
    if (x0 == x1 && y0 == y1) break;
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

void draw_segment(ControlMaskStack& masks, int channel, const Vec3& a_ego, const Vec3& b_ego,
                  const Mat4& K) {
  Eigen::Vector4d ha = K * a_ego.homogeneous();
  Eigen::Vector4d hb = K * b_ego.homogeneous();
  // depth > eps  <=>  h2 - eps * h3 > 0, linear along the segment.
  const double fa = ha(2) - kNearClipDepth * ha(3);
  const double fb = hb(2) - kNearClipDepth * hb(3);
  if (fa <= 0.0 && fb <= 0.0) return;
  if (fa <= 0.0) {
    ha = ha + (fa / (fa - fb)) * (hb - ha);
  } else if (fb <= 0.0) {
    hb = hb + (fb / (fb - fa)) * (ha - hb);
  }
  double u0 = ha(0) / ha(2);
  double v0 = ha(1) / ha(2);
  double u1 = hb(0) / hb(2);
  double v1 = hb(1) / hb(2);
  constexpr double kInset = 1e-9;
  if (!clip_to_rect(u0, v0, u1, v1, -0.5 + kInset, masks.width - 0.5 - kInset, -0.5 + kInset,
                    masks.height - 0.5 - kInset))
    return;
  bresenham(masks, channel, round_px(u0), round_px(v0), round_px(u1), round_px(v1));
}

ControlMaskStack rasterize_controls(const std::vector<AgentBox>& boxes,
                                    const std::vector<MapElement>& map, const EgoState& ego,
                                    const Mat4& K, const ClassTables& classes, int H, int W) {
  const int n_box = static_cast<int>(classes.box.size());
  ControlMaskStack masks(static_cast<int>(classes.channel_count()), H, W);

  for (const auto& box : boxes) {
    if (box.class_id >= classes.box.size()) continue;
    const auto corners = box.corners();
    std::array<Vec3, 8> local;
    for (std::size_t i = 0; i < 8; ++i) local[i] = global_to_ego(corners[i], ego);
    for (const auto& e : box_edges())
      draw_segment(masks, static_cast<int>(box.class_id), local[e[0]], local[e[1]], K);
  }

  for (const auto& element : map) {
    if (element.class_id >= classes.map.size() || element.vertices.size() < 2) continue;
    const int channel = n_box + static_cast<int>(element.class_id);
    const std::size_t n = element.vertices.size();
    const std::size_t edges = element.kind == ElementKind::kPolygon ? n : n - 1;
    for (std::size_t i = 0; i < edges; ++i) {
      const Vec2 a = global_to_ego(element.vertices[i], ego);
      const Vec2 b = global_to_ego(element.vertices[(i + 1) % n], ego);
      draw_segment(masks, channel, Vec3(a.x(), a.y(), 0.0), Vec3(b.x(), b.y(), 0.0), K);
    }
  }
  return masks;
}

}  // namespace b2dr
