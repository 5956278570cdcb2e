// SPDX-License-Identifier: Apache-2.0
#include "b2dr/retrieval/retrieval.hpp"

#include <cmath>

namespace b2dr {

std::vector<double> signed_offsets(const std::vector<RecordedFrame>& frames, const Vec2& ego_coord,
                                   const Vec2& ego_velocity) {
  const double speed = ego_velocity.norm();
  if (!(speed > kMinRetrievalSpeed)) throw DegenerateHeadingError();
  const Vec2 dir = ego_velocity / speed;
  std::vector<double> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back((f.coord - ego_coord).dot(dir));
  return out;
}

RetrievedPair nearest_pair(const std::vector<RecordedFrame>& frames, const Vec2& ego_coord,
                           const Vec2& ego_velocity) {
  const std::vector<double> p = signed_offsets(frames, ego_coord, ego_velocity);
  RetrievedPair out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= 0.0) {
      if (!out.front || p[i] < out.front_offset) {
        out.front = i;
        out.front_offset = p[i];
      }
    } else if (!out.rear || p[i] > out.rear_offset) {
      out.rear = i;
      out.rear_offset = p[i];
    }
  }
  return out;
}

Vec2 retrieval_direction(const EgoState& ego) {
  const Vec2 heading(std::cos(ego.heading), std::sin(ego.heading));
  const Vec2 v = ego.velocity * heading;
  return v.norm() > kMinRetrievalSpeed ? v : heading;
}

RetrievedPair nearest_pair(const ScenarioLog& log, const EgoState& ego) {
  return nearest_pair(log.frames, ego.position, retrieval_direction(ego));
}

int interval_of(double abs_offset) {
  for (std::size_t k = 0; k < kReferenceIntervals.size(); ++k) {
    const auto& iv = kReferenceIntervals[k];
    const bool last = k + 1 == kReferenceIntervals.size();
    if (abs_offset >= iv.lo && (abs_offset < iv.hi || (last && abs_offset <= iv.hi)))
      return static_cast<int>(k);
  }
  return -1;
}

namespace {

struct SideDraw {
  std::optional<std::size_t> frame;
  int interval = -1;
};

SideDraw draw_side(const std::array<std::vector<std::size_t>, 3>& buckets, std::mt19937_64& rng) {
  double total = 0.0;
  for (std::size_t k = 0; k < buckets.size(); ++k)
    if (!buckets[k].empty()) total += kReferenceIntervalProbabilities[k];
  if (total <= 0.0) return {};

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = unit(rng) * total;
  double acc = 0.0;
  std::size_t chosen = 0;
  // Falls through to the last non-empty bucket when r rounds up to total.
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    if (buckets[k].empty()) continue;
    chosen = k;
    acc += kReferenceIntervalProbabilities[k];
    if (r < acc) break;
  }
  std::uniform_int_distribution<std::size_t> pick(0, buckets[chosen].size() - 1);
  return {buckets[chosen][pick(rng)], static_cast<int>(chosen)};
}

}  // namespace

SampledPair hierarchical_sample(const std::vector<RecordedFrame>& frames, const Vec2& ego_coord,
                                const Vec2& direction, std::mt19937_64& rng) {
  const std::vector<double> p = signed_offsets(frames, ego_coord, direction);
  std::array<std::vector<std::size_t>, 3> front_buckets;
  std::array<std::vector<std::size_t>, 3> rear_buckets;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int k = interval_of(std::abs(p[i]));
    if (k < 0) continue;
    (p[i] >= 0.0 ? front_buckets : rear_buckets)[k].push_back(i);
  }

  SampledPair out;
  const SideDraw front = draw_side(front_buckets, rng);
  const SideDraw rear = draw_side(rear_buckets, rng);
  if (!front.frame || !rear.frame) {
    const RetrievedPair nearest = nearest_pair(frames, ego_coord, direction);
    if (!front.frame) {
      out.pair.front = nearest.front;
      out.pair.front_offset = nearest.front_offset;
    }
    if (!rear.frame) {
      out.pair.rear = nearest.rear;
      out.pair.rear_offset = nearest.rear_offset;
    }
  }
  if (front.frame) {
    out.pair.front = front.frame;
    out.pair.front_offset = p[*front.frame];
    out.front_interval = front.interval;
  }
  if (rear.frame) {
    out.pair.rear = rear.frame;
    out.pair.rear_offset = p[*rear.frame];
    out.rear_interval = rear.interval;
  }
  return out;
}

SampledPair hierarchical_sample(const ScenarioLog& log, const EgoState& ego, std::mt19937_64& rng) {
  return hierarchical_sample(log.frames, ego.position, retrieval_direction(ego), rng);
}

}  // namespace b2dr
