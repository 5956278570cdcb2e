// SPDX-License-Identifier: Apache-2.0
#include "b2dr/diffusion/latent.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "b2dr/common/error.hpp"

namespace b2dr {

Field encode_latent(const Field& image, int factor) {
  if (factor < 1 || image.height % factor != 0 || image.width % factor != 0)
    throw ShapeError("encode_latent: image " + image.shape_string() + " not divisible by " + std::to_string(factor));
  const int h = image.height / factor;
  const int w = image.width / factor;
  Field out(image.channels, h, w);
  const double inv = 1.0 / (factor * factor);
  for (int c = 0; c < image.channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int dy = 0; dy < factor; ++dy)
          for (int dx = 0; dx < factor; ++dx) acc += image.at(c, y * factor + dy, x * factor + dx);
        out.at(c, y, x) = acc * inv;
      }
  return out;
}

Field decode_latent(const Field& latent, int factor) {
  Field out(latent.channels, latent.height * factor, latent.width * factor);
  for (int c = 0; c < out.channels; ++c)
    for (int y = 0; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x) out.at(c, y, x) = latent.at(c, y / factor, x / factor);
  return out;
}

namespace {

constexpr char kMagic[8] = {'B', '2', 'D', 'R', 'L', 'A', 'T', '1'};
constexpr std::uint32_t kDtypeF32 = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError("latent dump truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_latent_raw(const Field& latent, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write latent dump '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, kDtypeF32);
  put_u32(out, static_cast<std::uint32_t>(latent.channels));
  put_u32(out, static_cast<std::uint32_t>(latent.height));
  put_u32(out, static_cast<std::uint32_t>(latent.width));
  for (double v : latent.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

Field read_latent_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open latent dump '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ParseError("latent dump: bad magic");
  if (get_u32(in) != kDtypeF32) throw ParseError("latent dump: unsupported dtype");
  const int c = static_cast<int>(get_u32(in));
  const int h = static_cast<int>(get_u32(in));
  const int w = static_cast<int>(get_u32(in));
  Field f(c, h, w);
  for (double& v : f.data) v = std::bit_cast<float>(get_u32(in));
  return f;
}

}  // namespace b2dr
