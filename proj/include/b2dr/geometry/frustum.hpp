// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "b2dr/scenario/types.hpp"

namespace b2dr {

struct DepthRange {
  double near = 1.0;
  double far = 60.0;
};

inline constexpr int kDefaultDepthBins = 64;

/// Pixel x depth lattice. Layout is row-major (v, u, k, component).
struct FrustumGrid {
  int height = 0;
  int width = 0;
  int depth = 0;
  std::vector<double> depth_bins;
  /// (u d, v d, d, 1) per entry.
  std::vector<double> points_hom;
  /// K^-1 applied and dehomogenized.
  std::vector<double> points_ego;

  std::size_t entry(int v, int u, int k) const {
    return (static_cast<std::size_t>(v) * width + u) * depth + k;
  }
  Vec3 ego_point(int v, int u, int k) const {
    const double* p = points_ego.data() + 3 * entry(v, u, k);
    return Vec3(p[0], p[1], p[2]);
  }
};

/// Depth bins uniform over [near, far]; D = 1 yields the single bin `near`.
std::vector<double> uniform_depth_bins(int D, DepthRange range);

FrustumGrid frustum_points(int H, int W, int D, DepthRange range, const Mat4& K);

/// Applies a rigid 4x4 transform to every ego point of the grid.
FrustumGrid transform_grid(const FrustumGrid& grid, const Mat4& transform);

}  // namespace b2dr
