// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "b2dr/scenario/types.hpp"

namespace b2dr {

/// Arc-length parameterized view of a 2D polyline.
class PolylinePath {
 public:
  explicit PolylinePath(Polyline2 points);

  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const Polyline2& points() const { return points_; }

  /// Point at arc length s, clamped to [0, length()].
  Vec2 point_at(double s) const;

  /// Unit tangent of the segment containing s. Zero-length segments are
  /// skipped; a fully degenerate path yields (1, 0).
  Vec2 tangent_at(double s) const;

  struct Projection {
    double arc = 0.0;
    /// Signed lateral offset, positive to the left of travel.
    double lateral = 0.0;
    double distance = 0.0;
  };

  /// Nearest point on the polyline. Ties resolve to the earliest segment.
  Projection project(const Vec2& p) const;

 private:
  std::size_t segment_at(double s) const;

  Polyline2 points_;
  std::vector<double> cumulative_;
};

double polyline_length(const Polyline2& points);

}  // namespace b2dr
