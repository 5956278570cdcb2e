// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "b2dr/diffusion/field.hpp"

namespace b2dr {

inline constexpr int kLatentFactor = 8;

/// Stand-in encoder: area-average downsampling by `factor`, channels kept.
/// Dimensions must be multiples of the factor.
Field encode_latent(const Field& image, int factor = kLatentFactor);

/// Right inverse of encode_latent: each latent cell replicated over its block.
Field decode_latent(const Field& latent, int factor = kLatentFactor);

/// Raw dump: "B2DRLAT1", then u32 dtype (1 = f32), u32 C, H, W, then
/// C*H*W little-endian float32 values.
void write_latent_raw(const Field& latent, const std::string& path);
Field read_latent_raw(const std::string& path);

}  // namespace b2dr
