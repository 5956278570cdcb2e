// SPDX-License-Identifier: Apache-2.0
#include "b2dr/geometry/frustum.hpp"

#include <Eigen/LU>

namespace b2dr {

std::vector<double> uniform_depth_bins(int D, DepthRange range) {
  std::vector<double> bins(static_cast<std::size_t>(D));
  for (int k = 0; k < D; ++k) {
    bins[k] = D == 1 ? range.near : range.near + (range.far - range.near) * k / (D - 1);
  }
  return bins;
}

FrustumGrid frustum_points(int H, int W, int D, DepthRange range, const Mat4& K) {
  FrustumGrid g;
  g.height = H;
  g.width = W;
  g.depth = D;
  g.depth_bins = uniform_depth_bins(D, range);
  const std::size_t entries = static_cast<std::size_t>(H) * W * D;
  g.points_hom.resize(4 * entries);
  g.points_ego.resize(3 * entries);
  const Mat4 K_inv = K.inverse();
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) {
      for (int k = 0; k < D; ++k) {
        const double d = g.depth_bins[k];
        const Eigen::Vector4d hom(u * d, v * d, d, 1.0);
        const Eigen::Vector4d p = K_inv * hom;
        const std::size_t e = g.entry(v, u, k);
        for (int c = 0; c < 4; ++c) g.points_hom[4 * e + c] = hom(c);
        for (int c = 0; c < 3; ++c) g.points_ego[3 * e + c] = p(c) / p(3);
      }
    }
  }
  return g;
}

FrustumGrid transform_grid(const FrustumGrid& grid, const Mat4& transform) {
  FrustumGrid out = grid;
  const Eigen::Matrix3d R = transform.topLeftCorner<3, 3>();
  const Eigen::Vector3d t = transform.topRightCorner<3, 1>();
  const std::size_t n = out.points_ego.size() / 3;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Map<Eigen::Vector3d> p(out.points_ego.data() + 3 * i);
    const Eigen::Vector3d q = R * p + t;
    out.points_ego[3 * i] = q.x();
    out.points_ego[3 * i + 1] = q.y();
    out.points_ego[3 * i + 2] = q.z();
  }
  return out;
}

}  // namespace b2dr
