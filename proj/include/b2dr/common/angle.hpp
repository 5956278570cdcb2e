// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

namespace b2dr {

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  double out = r - std::numbers::pi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (out >= std::numbers::pi) out -= kTwoPi;
  return out;
}

}  // namespace b2dr
