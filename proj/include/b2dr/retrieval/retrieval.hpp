// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "b2dr/common/error.hpp"
#include "b2dr/scenario/types.hpp"

namespace b2dr {

inline constexpr double kMinRetrievalSpeed = 0.1;

class DegenerateHeadingError : public Error {
 public:
  DegenerateHeadingError() : Error("degenerate heading") {}
};

/// Signed along-track offsets (coord_i - ego_coord) . v/|v| in meters.
/// Throws DegenerateHeadingError when |ego_velocity| <= kMinRetrievalSpeed.
std::vector<double> signed_offsets(const std::vector<RecordedFrame>& frames, const Vec2& ego_coord,
                                   const Vec2& ego_velocity);

struct RetrievedPair {
  std::optional<std::size_t> front;
  std::optional<std::size_t> rear;
  double front_offset = 0.0;
  double rear_offset = 0.0;

  bool operator==(const RetrievedPair&) const = default;
};

/// Closest frame ahead (smallest P >= 0) and behind (largest P < 0) along the
/// given direction.
RetrievedPair nearest_pair(const std::vector<RecordedFrame>& frames, const Vec2& ego_coord,
                           const Vec2& ego_velocity);

/// Direction of travel for retrieval: the velocity vector, or the heading unit
/// vector when the ego is (nearly) stationary.
Vec2 retrieval_direction(const EgoState& ego);

RetrievedPair nearest_pair(const ScenarioLog& log, const EgoState& ego);

struct DistanceInterval {
  double lo;
  double hi;
};

inline constexpr std::array<DistanceInterval, 3> kReferenceIntervals{{{2.0, 5.0}, {5.0, 10.0}, {10.0, 15.0}}};
inline constexpr std::array<double, 3> kReferenceIntervalProbabilities{0.1, 0.3, 0.6};

/// Interval index containing |offset|, or -1. Intervals are half-open except
/// the last, which includes 15 m.
int interval_of(double abs_offset);

struct SampledPair {
  RetrievedPair pair;
  /// Interval drawn per side; -1 when the side fell back to nearest_pair.
  int front_interval = -1;
  int rear_interval = -1;
};

/// Training-time reference selection: per side, draw a distance interval with
/// probabilities (0.1, 0.3, 0.6), renormalized over non-empty intervals, and
/// choose uniformly among frames in it.
SampledPair hierarchical_sample(const ScenarioLog& log, const EgoState& ego, std::mt19937_64& rng);

SampledPair hierarchical_sample(const std::vector<RecordedFrame>& frames, const Vec2& ego_coord,
                                const Vec2& direction, std::mt19937_64& rng);

}  // namespace b2dr
