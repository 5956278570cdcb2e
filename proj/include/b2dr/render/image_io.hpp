// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "b2dr/diffusion/field.hpp"
#include "b2dr/geometry/raster.hpp"

namespace b2dr {

using Bytes = std::vector<std::uint8_t>;

/// Rounds every value to the nearest 8-bit level k/255 after clamping to [0,1].
Image quantize_8bit(const Image& img);

/// 8-bit RGB PNG. Values are clamped to [0,1] and rounded.
Bytes encode_png(const Image& rgb);
/// Decodes any 8-bit PNG (gray, RGB, RGBA) into a 3-channel image.
Image decode_png(const Bytes& png);

void write_png(const Image& rgb, const std::string& path);
Image read_png(const std::string& path);

/// Masks as a single 8-bit grayscale PNG of C pages stacked vertically
/// (height C*H, set pixels 255). The page count is stored in a
/// "b2dr_pages" text chunk.
Bytes encode_mask_pages(const ControlMaskStack& masks);
ControlMaskStack decode_mask_pages(const Bytes& png);
void write_mask_pages(const ControlMaskStack& masks, const std::string& path);

std::string base64_encode(const Bytes& data);
/// Throws ParseError on characters outside the standard alphabet or bad padding.
Bytes base64_decode(std::string_view text);

/// FNV-1a 64-bit over the bytes; used for stable image checksums.
std::uint64_t fnv1a(const Bytes& data);
std::uint64_t image_checksum(const Image& img);

}  // namespace b2dr
