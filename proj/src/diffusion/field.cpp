// SPDX-License-Identifier: Apache-2.0
#include "b2dr/diffusion/field.hpp"

#include "b2dr/common/error.hpp"

namespace b2dr {

std::string Field::shape_string() const {
  return "(" + std::to_string(channels) + "," + std::to_string(height) + "," + std::to_string(width) + ")";
}

void require_same_shape(const Field& a, const Field& b, const char* what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
}

}  // namespace b2dr
