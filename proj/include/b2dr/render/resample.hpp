// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "b2dr/diffusion/field.hpp"

namespace b2dr {

/// Catmull-Rom bicubic (a = -0.5) upsampling with edge clamping, pixel
/// centers aligned. Throws ShapeError when the target is smaller than the source.
Image bicubic_upsample(const Image& img, int target_w, int target_h);

/// Bilinear resampling to any size, pixel centers aligned, edge clamped.
Image resample_bilinear(const Image& img, int target_w, int target_h);

}  // namespace b2dr
