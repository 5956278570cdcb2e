// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "b2dr/common/error.hpp"

namespace b2dr {

namespace {

constexpr double kCubicA = -0.5;

double cubic_weight(double x) {
  x = std::abs(x);
  if (x <= 1.0) return ((kCubicA + 2.0) * x - (kCubicA + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((kCubicA * x - 5.0 * kCubicA) * x + 8.0 * kCubicA) * x - 4.0 * kCubicA;
  return 0.0;
}

struct Taps {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> cubic_taps(int src, int dst) {
  std::vector<Taps> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double x = (i + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(x));
    const double f = x - base;
    for (int k = 0; k < 4; ++k) {
      taps[i].index[k] = std::clamp(base - 1 + k, 0, src - 1);
      taps[i].weight[k] = cubic_weight(f - (k - 1));
    }
  }
  return taps;
}

}  // namespace

Image bicubic_upsample(const Image& img, int target_w, int target_h) {
  if (target_w < img.width || target_h < img.height)
    throw ShapeError("bicubic_upsample: target " + std::to_string(target_w) + "x" + std::to_string(target_h) +
                     " smaller than source " + std::to_string(img.width) + "x" + std::to_string(img.height));
  if (target_w == img.width && target_h == img.height) return img;
  const auto tx = cubic_taps(img.width, target_w);
  const auto ty = cubic_taps(img.height, target_h);

  Image horiz(img.channels, img.height, target_w);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < target_w; ++x) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += tx[x].weight[k] * img.at(c, y, tx[x].index[k]);
        horiz.at(c, y, x) = acc;
      }
  Image out(img.channels, target_h, target_w);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < target_h; ++y)
      for (int x = 0; x < target_w; ++x) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += ty[y].weight[k] * horiz.at(c, ty[y].index[k], x);
        out.at(c, y, x) = acc;
      }
  return out;
}

Image resample_bilinear(const Image& img, int target_w, int target_h) {
  if (target_w == img.width && target_h == img.height) return img;
  Image out(img.channels, target_h, target_w);
  const double sx = static_cast<double>(img.width) / target_w;
  const double sy = static_cast<double>(img.height) / target_h;
  for (int y = 0; y < target_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < target_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < img.channels; ++c) {
        const double top = img.at(c, y0, x0) * (1 - wx) + img.at(c, y0, x1) * wx;
        const double bot = img.at(c, y1, x0) * (1 - wx) + img.at(c, y1, x1) * wx;
        out.at(c, y, x) = top * (1 - wy) + bot * wy;
      }
    }
  }
  return out;
}

}  // namespace b2dr
