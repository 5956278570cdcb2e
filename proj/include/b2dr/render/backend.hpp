// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "b2dr/render/request.hpp"

namespace b2dr {

struct RenderedFrame {
  /// One image per rig camera at the camera's native size, values in [0,1]
  /// on 8-bit levels.
  std::vector<Image> images;
  /// The same frames at the render resolution, the next request's prev.
  std::vector<Image> render_images;
  long tick = 0;
  std::string backend_id;
  double timing_ms = 0.0;
};

class RenderBackend {
 public:
  virtual ~RenderBackend() = default;
  virtual std::string id() const = 0;
  /// Per-camera images at the request's render resolution.
  virtual std::vector<Image> render(const RenderRequest& req) = 0;
};

struct ToyConfig {
  int steps = 20;
  double sigma = 0.1;
  double reference_scale = 2.0;
  int modulation_max = 300;
  double blur_std = 1.0;
  /// Weight of the corrupted previous latent in the conditioned mean, scaled by abar_n.
  double prev_weight = 0.3;
  /// Gain on the attention-retrieved reference colors in the background.
  double attention_weight = 0.5;
  int pe_dim = 64;
  int pe_depth_bins = 16;
  double feature_gain = 4.0;
};

struct RemoteConfig {
  /// "tcp://host:port" or "exec:<shell command>".
  std::string endpoint;
  int timeout_ms = 10000;
};

struct BackendOptions {
  ToyConfig toy;
  RemoteConfig remote;
};

/// "oracle", "toy" or "remote". Throws ConfigError for any other id.
std::unique_ptr<RenderBackend> make_backend(const std::string& id, const CameraRig& rig,
                                            const BackendOptions& options = {}, int width = kDefaultRenderWidth,
                                            int height = kDefaultRenderHeight);

/// Runs the backend, checks its output shape, clamps to [0,1], quantizes to
/// 8-bit levels and upsamples to each camera's native size. Backend failures
/// are rethrown with the backend id in the message.
RenderedFrame render_frame(RenderBackend& backend, const RenderRequest& req);

}  // namespace b2dr
