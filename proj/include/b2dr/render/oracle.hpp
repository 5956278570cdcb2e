// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "b2dr/render/backend.hpp"

namespace b2dr {

using Rgb = std::array<double, 3>;

inline constexpr Rgb kSkyColor{0.55, 0.70, 0.90};
inline constexpr Rgb kGroundColor{0.35, 0.35, 0.35};
/// Added to |P| in the inverse-distance reference blend.
inline constexpr double kBlendEpsilon = 0.5;
/// Ground hits farther than this count as above the horizon.
inline constexpr double kMaxGroundRange = 500.0;

/// Fixed color of a mask channel: box classes and map classes draw from
/// separate tables.
Rgb palette_color(int channel, const ClassTables& classes);

/// Vertical gradient from sky at the top row to ground at the bottom row.
Image horizon_gradient(int W, int H);

/// Reference images warped to the current pose through the ground plane and
/// blended by inverse along-track distance. Falls back to the gradient when
/// no reference is present.
Image reference_background(const Camera& cam, const EgoState& ego, const CameraReferences& refs, int W, int H);

/// Flat palette colors over `background`: map channels first, boxes on top.
Image composite_masks(const Image& background, const ControlMaskStack& masks, const ClassTables& classes);

std::vector<Image> raster_oracle_render(const RenderRequest& req);

class OracleBackend : public RenderBackend {
 public:
  std::string id() const override { return "oracle"; }
  std::vector<Image> render(const RenderRequest& req) override { return raster_oracle_render(req); }
};

}  // namespace b2dr
