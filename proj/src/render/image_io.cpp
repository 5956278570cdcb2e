// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "b2dr/common/error.hpp"

namespace b2dr {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  Bytes out;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw Error("png: cannot create write struct");
    info = png_create_info_struct(png);
    if (info == nullptr) {
      png_destroy_write_struct(&png, nullptr);
      throw Error("png: cannot create info struct");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  static void write_cb(png_structp p, png_bytep data, png_size_t len) {
    auto* self = static_cast<PngWriter*>(png_get_io_ptr(p));
    self->out.insert(self->out.end(), data, data + len);
  }
  static void flush_cb(png_structp) {}
};

Bytes write_rows(int width, int height, int color_type, int channels, const std::vector<std::uint8_t>& pixels,
                 const char* text_key = nullptr, const std::string& text_value = {}) {
  PngWriter w;
  if (setjmp(png_jmpbuf(w.png))) throw Error("png: encode failed");
  png_set_write_fn(w.png, &w, &PngWriter::write_cb, &PngWriter::flush_cb);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_text text{};
  std::string key_storage;
  std::string value_storage;
  if (text_key != nullptr) {
    key_storage = text_key;
    value_storage = text_value;
    text.compression = PNG_TEXT_COMPRESSION_NONE;
    text.key = key_storage.data();
    text.text = value_storage.data();
    png_set_text(w.png, w.info, &text, 1);
  }
  png_write_info(w.png, w.info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y)
    png_write_row(w.png, const_cast<png_bytep>(pixels.data() + stride * y));
  png_write_end(w.png, nullptr);
  return std::move(w.out);
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
  std::string pages_text;
};

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  const Bytes* src = nullptr;
  std::size_t pos = 0;

  explicit PngReader(const Bytes& bytes) : src(&bytes) {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw ParseError("png: cannot create read struct");
    info = png_create_info_struct(png);
    if (info == nullptr) {
      png_destroy_read_struct(&png, nullptr, nullptr);
      throw ParseError("png: cannot create info struct");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  static void read_cb(png_structp p, png_bytep data, png_size_t len) {
    auto* self = static_cast<PngReader*>(png_get_io_ptr(p));
    if (self->pos + len > self->src->size()) png_error(p, "truncated");
    std::memcpy(data, self->src->data() + self->pos, len);
    self->pos += len;
  }
};

DecodedPng read_rows(const Bytes& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw ParseError("png: bad signature");
  PngReader r(bytes);
  DecodedPng d;
  if (setjmp(png_jmpbuf(r.png))) throw ParseError("png: decode failed");
  png_set_read_fn(r.png, &r, &PngReader::read_cb);
  png_read_info(r.png, r.info);
  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int color = png_get_color_type(r.png, r.info);
  if (bit_depth == 16) png_set_strip_16(r.png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
  png_read_update_info(r.png, r.info);
  d.width = static_cast<int>(png_get_image_width(r.png, r.info));
  d.height = static_cast<int>(png_get_image_height(r.png, r.info));
  d.channels = png_get_channels(r.png, r.info);
  const std::size_t stride = png_get_rowbytes(r.png, r.info);
  d.pixels.resize(stride * d.height);
  for (int y = 0; y < d.height; ++y) png_read_row(r.png, d.pixels.data() + stride * y, nullptr);
  png_read_end(r.png, r.info);
  png_textp texts = nullptr;
  int n_text = 0;
  png_get_text(r.png, r.info, &texts, &n_text);
  for (int i = 0; i < n_text; ++i)
    if (std::strcmp(texts[i].key, "b2dr_pages") == 0) d.pages_text = texts[i].text;
  return d;
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const Bytes& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

}  // namespace

Image quantize_8bit(const Image& img) {
  Image out = img;
  for (double& v : out.data) v = to_byte(v) / 255.0;
  return out;
}

Bytes encode_png(const Image& rgb) {
  if (rgb.channels != 3) throw ShapeError("encode_png expects 3 channels, got " + rgb.shape_string());
  std::vector<std::uint8_t> px(static_cast<std::size_t>(rgb.width) * rgb.height * 3);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x)
      for (int c = 0; c < 3; ++c) px[(static_cast<std::size_t>(y) * rgb.width + x) * 3 + c] = to_byte(rgb.at(c, y, x));
  return write_rows(rgb.width, rgb.height, PNG_COLOR_TYPE_RGB, 3, px);
}

Image decode_png(const Bytes& png) {
  const DecodedPng d = read_rows(png);
  Image img(3, d.height, d.width);
  for (int y = 0; y < d.height; ++y)
    for (int x = 0; x < d.width; ++x) {
      const std::uint8_t* p = d.pixels.data() + (static_cast<std::size_t>(y) * d.width + x) * d.channels;
      for (int c = 0; c < 3; ++c) {
        const int src = d.channels >= 3 ? c : 0;
        img.at(c, y, x) = p[src] / 255.0;
      }
    }
  return img;
}

void write_png(const Image& rgb, const std::string& path) { write_file(encode_png(rgb), path); }
Image read_png(const std::string& path) { return decode_png(read_file(path)); }

Bytes encode_mask_pages(const ControlMaskStack& masks) {
  const int total_h = masks.channels * masks.height;
  std::vector<std::uint8_t> px(static_cast<std::size_t>(total_h) * masks.width);
  for (int c = 0; c < masks.channels; ++c)
    for (int y = 0; y < masks.height; ++y)
      for (int x = 0; x < masks.width; ++x)
        px[(static_cast<std::size_t>(c) * masks.height + y) * masks.width + x] = masks.at(c, y, x) ? 255 : 0;
  return write_rows(masks.width, std::max(total_h, 0), PNG_COLOR_TYPE_GRAY, 1, px, "b2dr_pages",
                    std::to_string(masks.channels));
}

ControlMaskStack decode_mask_pages(const Bytes& png) {
  const DecodedPng d = read_rows(png);
  if (d.pages_text.empty()) throw ParseError("mask png: missing b2dr_pages chunk");
  int pages = 0;
  try {
    pages = std::stoi(d.pages_text);
  } catch (const std::exception&) {
    throw ParseError("mask png: bad b2dr_pages value");
  }
  if (pages <= 0 || d.height % pages != 0) throw ParseError("mask png: height not divisible by page count");
  ControlMaskStack m(pages, d.height / pages, d.width);
  for (int c = 0; c < pages; ++c)
    for (int y = 0; y < m.height; ++y)
      for (int x = 0; x < m.width; ++x) {
        const std::size_t row = static_cast<std::size_t>(c) * m.height + y;
        if (d.pixels[(row * d.width + x) * d.channels] >= 128) m.set(c, y, x);
      }
  return m;
}

void write_mask_pages(const ControlMaskStack& masks, const std::string& path) {
  write_file(encode_mask_pages(masks), path);
}

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const Bytes& data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    const std::uint32_t v = data[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

Bytes base64_decode(std::string_view text) {
  std::array<int, 256> lut;
  lut.fill(-1);
  for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(kAlphabet[i])] = i;
  if (text.size() % 4 != 0) throw ParseError("base64: length not a multiple of 4");
  Bytes out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char ch = text[i + j];
      if (ch == '=') {
        if (i + 4 != text.size() || j < 2) throw ParseError("base64: misplaced padding");
        vals[j] = 0;
        ++pad;
      } else {
        if (pad > 0) throw ParseError("base64: data after padding");
        vals[j] = lut[static_cast<unsigned char>(ch)];
        if (vals[j] < 0) throw ParseError("base64: invalid character");
      }
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::uint64_t fnv1a(const Bytes& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t image_checksum(const Image& img) {
  Bytes bytes;
  bytes.reserve(img.size());
  for (double v : img.data) bytes.push_back(to_byte(v));
  return fnv1a(bytes);
}

}  // namespace b2dr
