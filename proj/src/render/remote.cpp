// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/remote.hpp"

#include <spdlog/spdlog.h>

#include "b2dr/common/error.hpp"
#include "b2dr/render/protocol.hpp"

namespace b2dr {

RemoteBackend::RemoteBackend(const RemoteConfig& cfg, const CameraRig& rig, int width, int height)
    : RemoteBackend(open_endpoint(cfg.endpoint, cfg.timeout_ms), rig, width, height, cfg.timeout_ms) {}

RemoteBackend::RemoteBackend(std::unique_ptr<LineChannel> channel, const CameraRig& rig, int width, int height,
                             int timeout_ms)
    : channel_(std::move(channel)), width_(width), height_(height), timeout_ms_(timeout_ms) {
  handshake(rig);
}

std::string RemoteBackend::receive() {
  auto line = channel_->recv_line(timeout_ms_);
  if (!line) throw BackendError("renderer closed the connection");
  return *line;
}

void RemoteBackend::handshake(const CameraRig& rig) {
  channel_->send_line(bridge::make_hello(rig, width_, height_).dump());
  const auto msg = bridge::parse_message(receive());
  bridge::expect_type(msg, "hello_ack");
  if (!msg.contains("b2dr_bridge_version") || !msg["b2dr_bridge_version"].is_number_integer())
    throw ProtocolError("hello_ack: missing field 'b2dr_bridge_version'");
  const int version = msg["b2dr_bridge_version"].get<int>();
  if (version != bridge::kBridgeVersion)
    throw ProtocolError("bridge version mismatch: expected " + std::to_string(bridge::kBridgeVersion) + ", got " +
                        std::to_string(version));
  spdlog::info("bridge handshake complete, version {}", version);
}

std::vector<Image> RemoteBackend::render(const RenderRequest& req) {
  if (req.width != width_ || req.height != height_)
    throw ConfigError("request resolution differs from the negotiated one");
  channel_->send_line(bridge::encode_render(req).dump());
  const auto msg = bridge::parse_message(receive());
  return bridge::decode_frame(msg, req.world.tick, req.rig.cameras.size(), width_, height_);
}

}  // namespace b2dr
