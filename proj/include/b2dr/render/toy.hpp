// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "b2dr/diffusion/schedule.hpp"
#include "b2dr/geometry/attention.hpp"
#include "b2dr/render/backend.hpp"

namespace b2dr {

/// Per-branch target means of the toy conditioned denoiser for one camera.
struct ToyTargets {
  Field uncond;       // no layout, no references
  Field layout;       // oracle foreground over the plain gradient
  Field full;         // layout over the reference background, attention-corrected
  bool has_refs = false;
  bool has_layout = false;
};

/// Latent-space colors attended from the camera's references for every
/// latent cell of the current view. Returns an empty matrix without references.
TokenMatrix attend_references(const Camera& cam, const EgoState& ego, const CameraReferences& refs,
                              const std::optional<Image>& prev, int latent_w, int latent_h,
                              const ToyConfig& cfg);

ToyTargets toy_targets(const RenderRequest& req, std::size_t camera, const ToyConfig& cfg,
                       const NoiseSchedule& sched, std::mt19937_64& rng);

/// The sampled latent for one camera before decoding.
Field toy_diffusion_latent(const RenderRequest& req, std::size_t camera, const ToyConfig& cfg,
                           const NoiseSchedule& sched);

std::vector<Image> toy_diffusion_render(const RenderRequest& req, const ToyConfig& cfg,
                                        const NoiseSchedule& sched);

class ToyBackend : public RenderBackend {
 public:
  explicit ToyBackend(ToyConfig cfg = {});
  std::string id() const override { return "toy"; }
  std::vector<Image> render(const RenderRequest& req) override;

 private:
  ToyConfig cfg_;
  NoiseSchedule sched_;
};

}  // namespace b2dr
