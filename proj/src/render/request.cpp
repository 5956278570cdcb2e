// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/request.hpp"

#include <filesystem>

#include "b2dr/common/error.hpp"
#include "b2dr/render/image_io.hpp"
#include "b2dr/scenario/transforms.hpp"

namespace b2dr {

EgoState Pose2::as_state() const { return pose_state(position, heading); }

const char* to_string(RefSide side) { return side == RefSide::kFront ? "front" : "rear"; }

void RenderRequest::check() const {
  if (width <= 0 || height <= 0) throw InvariantError("render resolution must be positive");
  const std::size_t n = rig.cameras.size();
  if (n == 0) throw InvariantError("render request has no cameras");
  if (masks.size() != n) throw ShapeError("render request: " + std::to_string(masks.size()) +
                                          " mask stacks for " + std::to_string(n) + " cameras");
  if (prev_images.size() != n) throw ShapeError("render request: prev image count differs from rig");
  if (refs.size() != n) throw ShapeError("render request: reference count differs from rig");
  const int channels = static_cast<int>(classes.channel_count());
  for (std::size_t i = 0; i < n; ++i) {
    const ControlMaskStack& m = masks[i];
    if (m.width != width || m.height != height || m.channels != channels)
      throw ShapeError("render request: mask stack for camera '" + rig.cameras[i].name + "' has wrong shape");
    if (prev_images[i] &&
        (prev_images[i]->channels != 3 || prev_images[i]->width != width || prev_images[i]->height != height))
      throw ShapeError("render request: prev image for camera '" + rig.cameras[i].name + "' is " +
                       prev_images[i]->shape_string());
    for (const auto* r : {&refs[i].front, &refs[i].rear})
      if (*r && (*r)->image.channels != 3) throw ShapeError("render request: reference image must be RGB");
  }
  if (prev_noise_level && *prev_noise_level < 0) throw InvariantError("prev_noise_level must be >= 0");
}

const Image& ImageStore::get(const std::string& ref) {
  std::filesystem::path p(ref);
  if (p.is_relative() && !base_dir_.empty()) p = std::filesystem::path(base_dir_) / p;
  const std::string key = p.lexically_normal().string();
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, read_png(key)).first;
  return it->second;
}

RenderRequest build_render_request(const ScenarioLog& log, const WorldState& world,
                                   const RetrievedPair& pair, std::vector<std::optional<Image>> prev,
                                   std::optional<int> prev_noise_level, std::uint64_t seed,
                                   ImageStore& images, int width, int height) {
  RenderRequest req;
  req.world = world;
  req.classes = log.classes;
  req.rig = log.rig;
  req.width = width;
  req.height = height;
  req.seed = seed;
  req.prev_noise_level = prev_noise_level;
  const std::size_t n = log.rig.cameras.size();
  if (prev.empty()) prev.resize(n);
  req.prev_images = std::move(prev);

  static const std::vector<MapElement> kNoMap;
  const std::vector<MapElement>& map = world.map != nullptr ? *world.map : kNoMap;
  for (std::size_t c = 0; c < n; ++c) {
    const Camera& cam = log.rig.cameras[c];
    req.masks.push_back(
        rasterize_controls(world.agents, map, world.ego, cam.K_at(width, height), log.classes, height, width));
    CameraReferences refs;
    auto fetch = [&](std::size_t idx, double offset) {
      const RecordedFrame& f = log.frames.at(idx);
      return ReferenceImage{images.get(f.image_refs.at(c)), Pose2{f.coord, f.heading}, offset};
    };
    if (pair.front) refs.front = fetch(*pair.front, pair.front_offset);
    if (pair.rear) refs.rear = fetch(*pair.rear, pair.rear_offset);
    req.refs.push_back(std::move(refs));
  }
  return req;
}

}  // namespace b2dr
