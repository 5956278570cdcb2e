// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "b2dr/scenario/types.hpp"

namespace b2dr {

/// Per-class binary masks: box classes first, then map classes.
struct ControlMaskStack {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  ControlMaskStack() = default;
  ControlMaskStack(int c, int h, int w)
      : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, 0) {}

  std::uint8_t at(int c, int y, int x) const { return data[index(c, y, x)]; }
  void set(int c, int y, int x) { data[index(c, y, x)] = 1; }
  std::size_t count(int c) const;
  /// 1 where any channel is set.
  std::vector<std::uint8_t> union_mask() const;

  bool operator==(const ControlMaskStack&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height + y) * width + x;
  }
};

inline constexpr double kNearClipDepth = 0.1;

/// Projects one ego-frame 3D segment: clipped against depth > kNearClipDepth,
/// then against the image rectangle, drawn with integer line stepping into
/// `channel`.
void draw_segment(ControlMaskStack& masks, int channel, const Vec3& a_ego, const Vec3& b_ego,
                  const Mat4& K);

/// Wireframe boxes and map outlines projected into one camera. Boxes and map
/// vertices are in the global frame; map elements lie on the ground (z = 0).
/// K must already be expressed at resolution (W, H).
ControlMaskStack rasterize_controls(const std::vector<AgentBox>& boxes,
                                    const std::vector<MapElement>& map, const EgoState& ego,
                                    const Mat4& K, const ClassTables& classes, int H, int W);

/// The 12 wireframe edges of a box as corner index pairs.
const std::array<std::array<int, 2>, 12>& box_edges();

}  // namespace b2dr
