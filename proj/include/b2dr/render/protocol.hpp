// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "b2dr/render/request.hpp"

namespace b2dr::bridge {

using json = nlohmann::json;

inline constexpr int kBridgeVersion = 1;

json make_hello(const CameraRig& rig, int width, int height);
json make_hello_ack();
json make_error(const std::string& message);
json make_frame(long tick, const std::vector<Image>& images);

/// The render message: per-camera prev/mask arrays in rig order and a flat
/// reference list tagged with camera name and side.
json encode_render(const RenderRequest& req);

/// Server-side view of a render message.
struct RenderMessage {
  long tick = 0;
  std::uint64_t seed = 0;
  std::vector<std::optional<Image>> prev;
  std::optional<int> prev_noise_level;
  std::vector<ControlMaskStack> masks;
  std::vector<CameraReferences> refs;
  Pose2 ego_pose;
  ClassTables classes;
  json boxes;
  json map;
};

struct HelloMessage {
  int version = 0;
  std::vector<std::string> camera_names;
  int width = 0;
  int height = 0;
};

/// Throws ProtocolError naming the offending field.
json parse_message(const std::string& line);
/// Throws ProtocolError unless `msg` has type `expected`.
void expect_type(const json& msg, const char* expected);
HelloMessage decode_hello(const json& msg);
RenderMessage decode_render(const json& msg, const std::vector<std::string>& camera_names);
/// Validates tick, camera count and image size of a frame reply.
std::vector<Image> decode_frame(const json& msg, long expected_tick, std::size_t cameras, int width,
                                int height);

}  // namespace b2dr::bridge
