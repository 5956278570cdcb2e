// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace b2dr {

/// Channel-major real field (C, H, W). Used for images in [0,1] and latents.
struct Field {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Field() = default;
  Field(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  std::span<double> span() { return data; }
  std::span<const double> span() const { return data; }

  bool same_shape(const Field& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
  std::string shape_string() const;

  bool operator==(const Field&) const = default;
};

using LatentField = Field;
using Image = Field;

/// Throws ShapeError naming `what` when the shapes differ.
void require_same_shape(const Field& a, const Field& b, const char* what);

}  // namespace b2dr
