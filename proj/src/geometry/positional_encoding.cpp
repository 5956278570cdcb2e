// SPDX-License-Identifier: Apache-2.0
#include "b2dr/geometry/positional_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace b2dr {

PeField positional_encoding(const FrustumGrid& grid, const Roi& roi, int d_pe) {
  PeField pe;
  pe.height = grid.height;
  pe.width = grid.width;
  pe.dim = d_pe;
  pe.encodings.assign(static_cast<std::size_t>(grid.height) * grid.width * d_pe, 0.0);
  const int pairs = pe_frequency_pairs(d_pe);
  const Vec3 extent = roi.max - roi.min;
  const double inv_depth = 1.0 / grid.depth;

  std::vector<double> freq(static_cast<std::size_t>(pairs));
  for (int j = 0; j < pairs; ++j) freq[j] = std::ldexp(std::numbers::pi, j);

  for (int v = 0; v < grid.height; ++v) {
    for (int u = 0; u < grid.width; ++u) {
      double* out = pe.encodings.data() + (static_cast<std::size_t>(v) * grid.width + u) * d_pe;
      for (int k = 0; k < grid.depth; ++k) {
        const Vec3 p = grid.ego_point(v, u, k);
        for (int c = 0; c < 3; ++c) {
          const double n = std::clamp((p[c] - roi.min[c]) / extent[c], 0.0, 1.0);
          for (int j = 0; j < pairs; ++j) {
            const double a = freq[j] * n;
            out[(c * pairs + j) * 2] += std::sin(a);
            out[(c * pairs + j) * 2 + 1] += std::cos(a);
          }
        }
      }
      for (int i = 0; i < 6 * pairs; ++i) out[i] *= inv_depth;
    }
  }
  return pe;
}

}  // namespace b2dr
