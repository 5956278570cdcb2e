// SPDX-License-Identifier: Apache-2.0
#include "b2dr/scenario/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace b2dr {

PolylinePath::PolylinePath(Polyline2 points) : points_(std::move(points)) {
  cumulative_.reserve(points_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0) total += (points_[i] - points_[i - 1]).norm();
    cumulative_.push_back(total);
  }
}

std::size_t PolylinePath::segment_at(double s) const {
  // Index i such that cumulative_[i] <= s < cumulative_[i+1], restricted to
  // non-degenerate segments where possible.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  if (i + 1 >= points_.size()) i = points_.size() - 2;
  return i;
}

Vec2 PolylinePath::point_at(double s) const {
  if (points_.empty()) return Vec2::Zero();
  if (points_.size() == 1) return points_.front();
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_at(s);
  const double seg = cumulative_[i + 1] - cumulative_[i];
  if (seg <= 0.0) return points_[i];
  const double f = (s - cumulative_[i]) / seg;
  return points_[i] + f * (points_[i + 1] - points_[i]);
}

Vec2 PolylinePath::tangent_at(double s) const {
  if (points_.size() < 2) return Vec2(1.0, 0.0);
  s = std::clamp(s, 0.0, length());
  std::size_t i = segment_at(s);
  // Walk forward, then backward, past zero-length segments.
  for (std::size_t j = i; j + 1 < points_.size(); ++j) {
    const Vec2 d = points_[j + 1] - points_[j];
    if (d.norm() > 0.0) return d.normalized();
  }
  for (std::size_t j = i; j-- > 0;) {
    const Vec2 d = points_[j + 1] - points_[j];
    if (d.norm() > 0.0) return d.normalized();
  }
  return Vec2(1.0, 0.0);
}

PolylinePath::Projection PolylinePath::project(const Vec2& p) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  if (points_.empty()) return best;
  if (points_.size() == 1) {
    best.distance = (p - points_[0]).norm();
    return best;
  }
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double len2 = d.squaredNorm();
    double f = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
    f = std::clamp(f, 0.0, 1.0);
    const Vec2 q = a + f * d;
    const double dist = (p - q).norm();
    if (dist < best.distance) {
      best.distance = dist;
      best.arc = cumulative_[i] + f * std::sqrt(len2);
      const Vec2 t = len2 > 0.0 ? Vec2(d / std::sqrt(len2)) : tangent_at(cumulative_[i]);
      const Vec2 r = p - q;
      best.lateral = t.x() * r.y() - t.y() * r.x();
    }
  }
  return best;
}

double polyline_length(const Polyline2& points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += (points[i] - points[i - 1]).norm();
  return total;
}

}  // namespace b2dr
