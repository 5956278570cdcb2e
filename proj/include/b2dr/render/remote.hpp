// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "b2dr/render/backend.hpp"
#include "b2dr/render/transport.hpp"

namespace b2dr {

/// Bridge-protocol client. The constructor connects and completes the
/// hello exchange; each render() sends one request and blocks for its frame.
class RemoteBackend : public RenderBackend {
 public:
  RemoteBackend(const RemoteConfig& cfg, const CameraRig& rig, int width, int height);
  /// Uses an already connected channel.
  RemoteBackend(std::unique_ptr<LineChannel> channel, const CameraRig& rig, int width, int height,
                int timeout_ms);
  std::string id() const override { return "remote"; }
  std::vector<Image> render(const RenderRequest& req) override;

 private:
  void handshake(const CameraRig& rig);
  std::string receive();

  std::unique_ptr<LineChannel> channel_;
  int width_;
  int height_;
  int timeout_ms_;
};

}  // namespace b2dr
