// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "b2dr/geometry/frustum.hpp"

namespace b2dr {

inline constexpr int kDefaultPeDim = 64;

struct Roi {
  Vec3 min = Vec3(-60.0, -60.0, -5.0);
  Vec3 max = Vec3(60.0, 60.0, 10.0);
};

/// Per-pixel encodings, row-major (v, u, channel).
struct PeField {
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<double> encodings;

  const double* pixel(int v, int u) const {
    return encodings.data() + (static_cast<std::size_t>(v) * width + u) * dim;
  }
  bool operator==(const PeField&) const = default;
};

/// Number of sin/cos frequency pairs per coordinate for encoding size d_pe.
inline int pe_frequency_pairs(int d_pe) { return d_pe / 6; }

/// Fixed sinusoidal encoding: each frustum point is normalized into [0,1]^3
/// by the roi (clamped), each coordinate c contributes
/// sin(2^j pi c), cos(2^j pi c) for j < d_pe/6, and the D bins are averaged.
/// Channels beyond 6 * (d_pe/6) are zero.
PeField positional_encoding(const FrustumGrid& grid, const Roi& roi, int d_pe = kDefaultPeDim);

}  // namespace b2dr
