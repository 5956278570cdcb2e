// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "b2dr/geometry/projection.hpp"
#include "b2dr/scenario/transforms.hpp"

namespace b2dr {

namespace {

constexpr std::array<Rgb, 8> kBoxPalette{{
    {0.90, 0.10, 0.10},
    {1.00, 0.55, 0.00},
    {0.85, 0.10, 0.85},
    {1.00, 0.90, 0.10},
    {0.10, 0.75, 0.95},
    {0.60, 0.30, 0.10},
    {0.10, 0.90, 0.30},
    {0.55, 0.10, 0.95},
}};

constexpr std::array<Rgb, 8> kMapPalette{{
    {0.15, 0.45, 0.45},
    {1.00, 1.00, 1.00},
    {0.20, 0.90, 0.90},
    {0.95, 0.95, 0.40},
    {0.75, 0.75, 0.75},
    {0.40, 0.60, 1.00},
    {0.95, 0.60, 0.70},
    {0.50, 0.80, 0.20},
}};

struct WarpSource {
  const Image* image;
  EgoState pose;
  Mat4 K;
  double weight;
};

int nearest_index(double x, int n) { return std::clamp(static_cast<int>(std::lround(x)), 0, n - 1); }

// Unwarped sample: the same normalized pixel position in the reference.
void sample_unwarped(const Image& ref, int u, int v, int W, int H, double out[3]) {
  const int x = nearest_index((u + 0.5) * ref.width / W - 0.5, ref.width);
  const int y = nearest_index((v + 0.5) * ref.height / H - 0.5, ref.height);
  for (int c = 0; c < 3; ++c) out[c] = ref.at(c, y, x);
}

}  // namespace

Rgb palette_color(int channel, const ClassTables& classes) {
  const int n_box = static_cast<int>(classes.box.size());
  if (channel < n_box) return kBoxPalette[static_cast<std::size_t>(channel) % kBoxPalette.size()];
  return kMapPalette[static_cast<std::size_t>(channel - n_box) % kMapPalette.size()];
}

Image horizon_gradient(int W, int H) {
  Image img(3, H, W);
  for (int v = 0; v < H; ++v) {
    const double t = H > 1 ? static_cast<double>(v) / (H - 1) : 0.0;
    for (int c = 0; c < 3; ++c) {
      const double val = kSkyColor[c] + t * (kGroundColor[c] - kSkyColor[c]);
      for (int u = 0; u < W; ++u) img.at(c, v, u) = val;
    }
  }
  return img;
}

Image reference_background(const Camera& cam, const EgoState& ego, const CameraReferences& refs, int W, int H) {
  std::vector<WarpSource> sources;
  for (const auto* r : {&refs.front, &refs.rear})
    if (*r)
      sources.push_back({&(*r)->image, (*r)->pose.as_state(), cam.K_at((*r)->image.width, (*r)->image.height),
                         1.0 / (std::abs((*r)->offset) + kBlendEpsilon)});
  if (sources.empty()) return horizon_gradient(W, H);
  double total = 0.0;
  for (const auto& s : sources) total += s.weight;

  const Mat4 K = cam.K_at(W, H);
  const Mat4 K_inv = K.inverse();
  const Vec3 center = (cam.extrinsic.inverse() * Eigen::Vector4d(0, 0, 0, 1)).head<3>();

  Image out(3, H, W);
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const Vec3 ray = unproject(u, v, 1.0, K_inv) - center;
      std::optional<Vec2> ground;
      if (ray.z() < -1e-9) {
        const double lambda = -center.z() / ray.z();
        if (lambda > 0.0 && lambda * ray.norm() <= kMaxGroundRange)
          ground = ego_to_global(Vec2((center + lambda * ray).head<2>()), ego);
      }
      double acc[3] = {0.0, 0.0, 0.0};
      for (const auto& s : sources) {
        double px[3];
        bool warped = false;
        if (ground) {
          const Vec2 local = global_to_ego(*ground, s.pose);
          if (auto p = try_project(Vec3(local.x(), local.y(), 0.0), s.K); p && p->depth > kNearClipDepth) {
            const double x = std::round(p->u);
            const double y = std::round(p->v);
            if (x >= 0 && y >= 0 && x < s.image->width && y < s.image->height) {
              for (int c = 0; c < 3; ++c) px[c] = s.image->at(c, static_cast<int>(y), static_cast<int>(x));
              warped = true;
            }
          }
        }
        if (!warped) sample_unwarped(*s.image, u, v, W, H, px);
        for (int c = 0; c < 3; ++c) acc[c] += s.weight * px[c];
      }
      for (int c = 0; c < 3; ++c) out.at(c, v, u) = acc[c] / total;
    }
  return out;
}

Image composite_masks(const Image& background, const ControlMaskStack& masks, const ClassTables& classes) {
  Image out = background;
  const int n_box = static_cast<int>(classes.box.size());
  std::vector<int> order;
  for (int ch = n_box; ch < masks.channels; ++ch) order.push_back(ch);
  for (int ch = 0; ch < std::min(n_box, masks.channels); ++ch) order.push_back(ch);
  for (int ch : order) {
    const Rgb color = palette_color(ch, classes);
    for (int y = 0; y < masks.height; ++y)
      for (int x = 0; x < masks.width; ++x)
        if (masks.at(ch, y, x))
          for (int c = 0; c < 3; ++c) out.at(c, y, x) = color[c];
  }
  return out;
}

std::vector<Image> raster_oracle_render(const RenderRequest& req) {
  std::vector<Image> images;
  images.reserve(req.rig.cameras.size());
  for (std::size_t c = 0; c < req.rig.cameras.size(); ++c) {
    const Image bg = reference_background(req.rig.cameras[c], req.world.ego, req.refs[c], req.width, req.height);
    images.push_back(composite_masks(bg, req.masks[c], req.classes));
  }
  return images;
}

}  // namespace b2dr
