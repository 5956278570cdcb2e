// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "b2dr/diffusion/field.hpp"
#include "b2dr/geometry/raster.hpp"
#include "b2dr/retrieval/retrieval.hpp"
#include "b2dr/scenario/types.hpp"

namespace b2dr {

inline constexpr int kDefaultRenderWidth = 400;
inline constexpr int kDefaultRenderHeight = 224;

struct Pose2 {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  EgoState as_state() const;
  bool operator==(const Pose2&) const = default;
};

enum class RefSide { kFront, kRear };
const char* to_string(RefSide side);

/// A retrieved recorded image with the pose it was captured at.
struct ReferenceImage {
  Image image;
  Pose2 pose;
  /// Signed along-track offset of the recorded frame from the ego.
  double offset = 0.0;
};

struct CameraReferences {
  std::optional<ReferenceImage> front;
  std::optional<ReferenceImage> rear;
  bool empty() const { return !front && !rear; }
};

struct RenderRequest {
  WorldState world;
  ClassTables classes;
  CameraRig rig;
  /// One stack per rig camera at the render resolution.
  std::vector<ControlMaskStack> masks;
  /// Previous frame per camera at the render resolution; absent on the first frame.
  std::vector<std::optional<Image>> prev_images;
  std::optional<int> prev_noise_level;
  std::vector<CameraReferences> refs;
  int width = kDefaultRenderWidth;
  int height = kDefaultRenderHeight;
  std::uint64_t seed = 0;

  /// Throws ShapeError or InvariantError when the per-camera lists disagree
  /// with the rig or the resolution.
  void check() const;
};

/// Decoded scenario images keyed by resolved path.
class ImageStore {
 public:
  explicit ImageStore(std::string base_dir = {}) : base_dir_(std::move(base_dir)) {}
  const Image& get(const std::string& ref);

 private:
  std::string base_dir_;
  std::map<std::string, Image> cache_;
};

/// Assembles the request for the current world: masks for every camera,
/// the retrieved pair's images (same camera), and the previous frame.
RenderRequest build_render_request(const ScenarioLog& log, const WorldState& world,
                                   const RetrievedPair& pair, std::vector<std::optional<Image>> prev,
                                   std::optional<int> prev_noise_level, std::uint64_t seed,
                                   ImageStore& images, int width = kDefaultRenderWidth,
                                   int height = kDefaultRenderHeight);

}  // namespace b2dr
