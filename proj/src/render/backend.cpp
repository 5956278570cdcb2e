// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/backend.hpp"

#include <algorithm>
#include <chrono>

#include "b2dr/common/error.hpp"
#include "b2dr/render/image_io.hpp"
#include "b2dr/render/oracle.hpp"
#include "b2dr/render/remote.hpp"
#include "b2dr/render/resample.hpp"
#include "b2dr/render/toy.hpp"

namespace b2dr {

std::unique_ptr<RenderBackend> make_backend(const std::string& id, const CameraRig& rig,
                                            const BackendOptions& options, int width, int height) {
  if (id == "oracle") return std::make_unique<OracleBackend>();
  if (id == "toy") return std::make_unique<ToyBackend>(options.toy);
  if (id == "remote") return std::make_unique<RemoteBackend>(options.remote, rig, width, height);
  throw ConfigError("unknown backend id '" + id + "' (expected oracle, toy or remote)");
}

RenderedFrame render_frame(RenderBackend& backend, const RenderRequest& req) {
  req.check();
  const std::string id = backend.id();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Image> raw;
  try {
    raw = backend.render(req);
  } catch (const TimeoutError& e) {
    throw TimeoutError("backend '" + id + "': " + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError("backend '" + id + "': " + e.what());
  } catch (const std::exception& e) {
    throw BackendError("backend '" + id + "': " + e.what());
  }
  const auto t1 = std::chrono::steady_clock::now();

  if (raw.size() != req.rig.cameras.size())
    throw BackendError("backend '" + id + "': returned " + std::to_string(raw.size()) + " images for " +
                       std::to_string(req.rig.cameras.size()) + " cameras");
  RenderedFrame out;
  out.tick = req.world.tick;
  out.backend_id = id;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const Image& img = raw[c];
    if (img.channels != 3 || img.width != req.width || img.height != req.height)
      throw BackendError("backend '" + id + "': image for camera '" + req.rig.cameras[c].name + "' is " +
                         img.shape_string());
    Image q = quantize_8bit(img);
    const Camera& cam = req.rig.cameras[c];
    Image native;
    if (cam.width >= q.width && cam.height >= q.height)
      native = bicubic_upsample(q, cam.width, cam.height);
    else
      native = resample_bilinear(q, cam.width, cam.height);
    out.images.push_back(quantize_8bit(native));
    out.render_images.push_back(std::move(q));
  }
  out.timing_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

}  // namespace b2dr
