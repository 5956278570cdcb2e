// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/toy.hpp"

#include <algorithm>
#include <cmath>

#include "b2dr/common/error.hpp"
#include "b2dr/diffusion/denoiser.hpp"
#include "b2dr/diffusion/latent.hpp"
#include "b2dr/diffusion/ops.hpp"
#include "b2dr/diffusion/sampler.hpp"
#include "b2dr/geometry/frustum.hpp"
#include "b2dr/geometry/positional_encoding.hpp"
#include "b2dr/render/oracle.hpp"
#include "b2dr/render/resample.hpp"

namespace b2dr {

namespace {

Mat4 planar_pose(const EgoState& pose) {
  Mat4 T = Mat4::Identity();
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  T(0, 0) = c;
  T(0, 1) = -s;
  T(1, 0) = s;
  T(1, 1) = c;
  T(0, 3) = pose.position.x();
  T(1, 3) = pose.position.y();
  return T;
}

void fill_pe(TokenMatrix& m, Eigen::Index row0, const PeField& pe) {
  for (int v = 0; v < pe.height; ++v)
    for (int u = 0; u < pe.width; ++u) {
      const double* p = pe.pixel(v, u);
      const Eigen::Index row = row0 + static_cast<Eigen::Index>(v) * pe.width + u;
      for (int k = 0; k < pe.dim; ++k) m(row, k) = p[k];
    }
}

void fill_features(TokenMatrix& m, Eigen::Index row0, const Field& latent, double gain) {
  for (int y = 0; y < latent.height; ++y)
    for (int x = 0; x < latent.width; ++x)
      for (int c = 0; c < latent.channels; ++c)
        m(row0 + static_cast<Eigen::Index>(y) * latent.width + x, c) = gain * latent.at(c, y, x);
}

Field to_latent(const Image& img, int W, int H) {
  return encode_latent(img.width == W && img.height == H ? img : resample_bilinear(img, W, H));
}

std::seed_seq::result_type low32(std::uint64_t v) { return static_cast<std::seed_seq::result_type>(v); }

std::mt19937_64 camera_rng(const RenderRequest& req, std::size_t camera) {
  std::seed_seq seq{low32(req.seed), low32(req.seed >> 32), low32(camera),
                    low32(static_cast<std::uint64_t>(req.world.tick))};
  return std::mt19937_64(seq);
}

}  // namespace

TokenMatrix attend_references(const Camera& cam, const EgoState& ego, const CameraReferences& refs,
                              const std::optional<Image>& prev, int latent_w, int latent_h,
                              const ToyConfig& cfg) {
  std::vector<const ReferenceImage*> present;
  for (const auto* r : {&refs.front, &refs.rear})
    if (*r) present.push_back(&**r);
  if (present.empty()) return {};
  const int W = latent_w * kLatentFactor;
  const int H = latent_h * kLatentFactor;
  const Eigen::Index n = static_cast<Eigen::Index>(latent_w) * latent_h;
  const int d = cfg.pe_dim;
  if (d < 3) throw ConfigError("toy renderer needs pe_dim >= 3");

  const Mat4 K = cam.K_at(latent_w, latent_h);
  const FrustumGrid grid = frustum_points(latent_h, latent_w, cfg.pe_depth_bins, DepthRange{}, K);

  TokenMatrix h_cur = TokenMatrix::Zero(n, d);
  TokenMatrix pe_cur = TokenMatrix::Zero(n, d);
  fill_pe(pe_cur, 0, positional_encoding(grid, Roi{}, d));
  if (prev) fill_features(h_cur, 0, to_latent(*prev, W, H), cfg.feature_gain);

  const Eigen::Index nk = n * static_cast<Eigen::Index>(present.size());
  TokenMatrix h_ref = TokenMatrix::Zero(nk, d);
  TokenMatrix pe_ref = TokenMatrix::Zero(nk, d);
  const Mat4 cur_from_global = planar_pose(ego).inverse();
  for (std::size_t i = 0; i < present.size(); ++i) {
    const Eigen::Index row0 = n * static_cast<Eigen::Index>(i);
    const Mat4 cur_from_ref = cur_from_global * planar_pose(present[i]->pose.as_state());
    fill_pe(pe_ref, row0, positional_encoding(transform_grid(grid, cur_from_ref), Roi{}, d));
    fill_features(h_ref, row0, to_latent(present[i]->image, W, H), cfg.feature_gain);
  }
  TokenMatrix out = reference_cross_attention(h_cur, pe_cur, h_ref, pe_ref);
  return out.leftCols(3) / cfg.feature_gain;
}

ToyTargets toy_targets(const RenderRequest& req, std::size_t camera, const ToyConfig& cfg,
                       const NoiseSchedule& sched, std::mt19937_64& rng) {
  if (req.width % kLatentFactor != 0 || req.height % kLatentFactor != 0)
    throw ShapeError("toy renderer needs a resolution divisible by " + std::to_string(kLatentFactor));
  const Camera& cam = req.rig.cameras[camera];
  const CameraReferences& refs = req.refs[camera];
  const ControlMaskStack& masks = req.masks[camera];
  const int W = req.width;
  const int H = req.height;

  const Image gradient = horizon_gradient(W, H);
  const Image ref_bg = reference_background(cam, req.world.ego, refs, W, H);
  ToyTargets t;
  t.has_refs = !refs.empty();
  t.uncond = encode_latent(gradient);
  t.layout = encode_latent(composite_masks(gradient, masks, req.classes));
  t.full = encode_latent(composite_masks(ref_bg, masks, req.classes));
  t.has_layout = t.layout != t.uncond;

  if (t.has_refs) {
    const int lw = W / kLatentFactor;
    const int lh = H / kLatentFactor;
    const TokenMatrix attended = attend_references(cam, req.world.ego, refs, req.prev_images[camera], lw, lh, cfg);
    const Field bg_latent = encode_latent(ref_bg);
    const std::vector<std::uint8_t> fg = masks.union_mask();
    for (int y = 0; y < lh; ++y)
      for (int x = 0; x < lw; ++x) {
        bool covered = false;
        for (int dy = 0; dy < kLatentFactor && !covered; ++dy)
          for (int dx = 0; dx < kLatentFactor && !covered; ++dx)
            covered = fg[static_cast<std::size_t>(y * kLatentFactor + dy) * W + x * kLatentFactor + dx] != 0;
        if (covered) continue;
        const Eigen::Index row = static_cast<Eigen::Index>(y) * lw + x;
        for (int c = 0; c < 3; ++c)
          t.full.at(c, y, x) += cfg.attention_weight * (attended(row, c) - bg_latent.at(c, y, x));
      }
  }

  if (const auto& prev = req.prev_images[camera]) {
    const LatentEncoder enc = [](const Field& img) { return encode_latent(img); };
    const ModulatedPrevious mod =
        req.prev_noise_level
            ? modulate_previous_at(*prev, *req.prev_noise_level, sched, rng, cfg.blur_std, enc)
            : modulate_previous(*prev, sched, cfg.modulation_max, rng, cfg.blur_std, enc);
    const double abar = sched.alpha_bar.at(static_cast<std::size_t>(mod.noise_level));
    const double lambda = cfg.prev_weight * abar;
    const double shrink = std::sqrt(abar);
    for (Field* mu : {&t.uncond, &t.layout, &t.full})
      for (std::size_t i = 0; i < mu->size(); ++i)
        mu->data[i] += lambda * (shrink * mod.corrupted.data[i] - mu->data[i]);
  }
  return t;
}

Field toy_diffusion_latent(const RenderRequest& req, std::size_t camera, const ToyConfig& cfg,
                           const NoiseSchedule& sched) {
  std::mt19937_64 rng = camera_rng(req, camera);
  const ToyTargets t = toy_targets(req, camera, cfg, sched, rng);
  const double sigma = cfg.sigma;
  const Denoiser denoiser = [&t, sigma, &sched](const Field& z, int step, const ConditionSet& cs) {
    const Field& mu = cs.layout ? (cs.refs ? t.full : t.layout) : (cs.refs ? t.full : t.uncond);
    return gaussian_posterior_eps(z, step, mu, sigma, sched);
  };
  GuidanceConfig guidance;
  guidance.reference_scale = cfg.reference_scale;
  const ConditionSet conds{true, t.has_refs};
  return sample(denoiser, conds, cfg.steps, sched, rng, t.uncond.channels, t.uncond.height, t.uncond.width,
                guidance);
}

std::vector<Image> toy_diffusion_render(const RenderRequest& req, const ToyConfig& cfg,
                                        const NoiseSchedule& sched) {
  std::vector<Image> images;
  for (std::size_t c = 0; c < req.rig.cameras.size(); ++c) {
    Image img = decode_latent(toy_diffusion_latent(req, c, cfg, sched));
    for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
    images.push_back(std::move(img));
  }
  return images;
}

ToyBackend::ToyBackend(ToyConfig cfg) : cfg_(cfg), sched_(default_schedule()) {}

std::vector<Image> ToyBackend::render(const RenderRequest& req) { return toy_diffusion_render(req, cfg_, sched_); }

}  // namespace b2dr
