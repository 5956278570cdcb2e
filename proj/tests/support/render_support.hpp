// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "b2dr/diffusion/latent.hpp"
#include "b2dr/diffusion/schedule.hpp"
#include "b2dr/render/oracle.hpp"
#include "b2dr/render/request.hpp"
#include "b2dr/render/resample.hpp"
#include "b2dr/render/toy.hpp"
#include "b2dr/retrieval/retrieval.hpp"
#include "b2dr/scenario/transforms.hpp"

namespace b2dr::test {

// Latent-cell change marking a cell as foreground. Pinned after one calibration
// pass on oracle composites, where it recovers the mask blocks almost exactly.
inline constexpr double kToyForegroundThreshold = 0.003;

// World at recorded frame k: ego on the logged pose, agents as first recorded.
inline WorldState recorded_world(const ScenarioLog& log, std::size_t k) {
  WorldState w;
  const auto& f = log.frames.at(k);
  w.ego = pose_state(f.coord, f.heading);
  w.ego.time = f.time;
  if (k + 1 < log.frames.size())
    w.ego.velocity = (log.frames[k + 1].coord - f.coord).norm() / (log.frames[k + 1].time - f.time);
  w.ego_dims = log.ego_dims;
  w.agents = log.initial_agents;
  w.map = &log.map;
  w.tick = static_cast<long>(k);
  return w;
}

inline std::vector<std::optional<Image>> recorded_prev(const ScenarioLog& log, std::size_t k, ImageStore& store,
                                                       int W, int H) {
  std::vector<std::optional<Image>> prev;
  for (const auto& ref : log.frames.at(k).image_refs) {
    const Image& img = store.get(ref);
    prev.emplace_back(img.width == W && img.height == H ? img : resample_bilinear(img, W, H));
  }
  return prev;
}

struct RequestOptions {
  bool prev = true;
  bool refs = true;
  std::uint64_t seed = 7;
  int width = kDefaultRenderWidth;
  int height = kDefaultRenderHeight;
};

inline RenderRequest recorded_request(const ScenarioLog& log, std::size_t k, ImageStore& store,
                                      const RequestOptions& o = {}) {
  const WorldState w = recorded_world(log, k);
  const RetrievedPair pair = o.refs ? nearest_pair(log, w.ego) : RetrievedPair{};
  std::vector<std::optional<Image>> prev;
  if (o.prev) prev = recorded_prev(log, k, store, o.width, o.height);
  return build_render_request(log, w, pair, std::move(prev), std::nullopt, o.seed, store, o.width, o.height);
}

inline std::vector<std::uint8_t> block_foreground(const ControlMaskStack& masks) {
  const auto fg = masks.union_mask();
  const int lw = masks.width / kLatentFactor, lh = masks.height / kLatentFactor;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(lw) * lh, 0);
  for (int y = 0; y < lh * kLatentFactor; ++y)
    for (int x = 0; x < lw * kLatentFactor; ++x)
      if (fg[static_cast<std::size_t>(y) * masks.width + x])
        out[static_cast<std::size_t>(y / kLatentFactor) * lw + x / kLatentFactor] = 1;
  return out;
}

struct CellIou {
  double iou = 0.0;
  std::size_t truth = 0;
  std::size_t predicted = 0;
};

// IoU between cells whose latent moved by more than `threshold` and mask blocks.
inline CellIou latent_change_iou(const Field& with, const Field& without, const ControlMaskStack& masks,
                                 double threshold = kToyForegroundThreshold) {
  const auto truth = block_foreground(masks);
  CellIou out;
  std::size_t inter = 0, uni = 0;
  for (int y = 0; y < with.height; ++y)
    for (int x = 0; x < with.width; ++x) {
      double diff = 0.0;
      for (int c = 0; c < with.channels; ++c) diff = std::max(diff, std::abs(with.at(c, y, x) - without.at(c, y, x)));
      const bool t = truth[static_cast<std::size_t>(y) * with.width + x] != 0;
      const bool p = diff > threshold;
      out.truth += t;
      out.predicted += p;
      inter += t && p;
      uni += t || p;
    }
  out.iou = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  return out;
}

inline RenderRequest without_masks(RenderRequest req) {
  for (auto& m : req.masks) std::fill(m.data.begin(), m.data.end(), std::uint8_t{0});
  return req;
}

// Foreground IoU of the toy renderer for one camera. Prediction thresholds the
// change between renders with and without control masks under the same seed,
// so the shared sampling noise cancels.
inline CellIou toy_foreground_iou(const RenderRequest& req, std::size_t camera, const ToyConfig& cfg = {},
                                  double threshold = kToyForegroundThreshold) {
  const NoiseSchedule& sched = default_schedule();
  const Field with = toy_diffusion_latent(req, camera, cfg, sched);
  const Field without = toy_diffusion_latent(without_masks(req), camera, cfg, sched);
  return latent_change_iou(with, without, req.masks[camera], threshold);
}

// Same measurement on the oracle: the calibration reference for the threshold.
inline CellIou oracle_foreground_iou(const RenderRequest& req, std::size_t camera,
                                     double threshold = kToyForegroundThreshold) {
  const Field with = encode_latent(raster_oracle_render(req)[camera]);
  const Field without = encode_latent(raster_oracle_render(without_masks(req))[camera]);
  return latent_change_iou(with, without, req.masks[camera], threshold);
}

}  // namespace b2dr::test
