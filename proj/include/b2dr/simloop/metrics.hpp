// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "b2dr/simloop/config.hpp"

namespace b2dr {

inline constexpr const char* kScoreName = "R-CLS-lite";

/// Separating-axis overlap test of two convex quadrilaterals. Touching
/// counts as overlap.
bool rectangles_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b);

/// (ego, agent id) for every agent whose footprint overlaps the ego's.
std::vector<std::pair<std::string, std::string>> collision_check(const WorldState& world);

/// Even-odd test on the closed polygon: points on an edge are inside.
bool point_in_polygon(const Vec2& p, const Polyline2& polygon);

/// 1 iff every ego footprint corner lies in some drivable polygon. A map
/// without drivable polygons counts as compliant.
int drivable_compliance(const WorldState& world, const ClassTables& classes);

double progress_score(const std::vector<EgoState>& history, const Polyline2& route);

struct ComfortSample {
  double accel = 0.0;
  double jerk = 0.0;
  double yaw_rate = 0.0;
  bool compliant = true;
};
/// Finite-difference kinematics at ticks k >= 2.
std::vector<ComfortSample> comfort_samples(const std::vector<EgoState>& history, const ComfortLimits& limits);
double comfort_score(const std::vector<EgoState>& history, const ComfortLimits& limits = {});

/// True when constant-velocity extrapolation of the ego and the agents
/// produces an ego collision at some substep t <= threshold (t = 0 included).
bool ttc_violation(const WorldState& world, const TtcConfig& cfg = {});
double ttc_score(const std::vector<WorldState>& history, const TtcConfig& cfg = {});

struct MetricsReport {
  int collision_gate = 1;
  int drivable_gate = 1;
  double progress = 0.0;
  double comfort = 1.0;
  double ttc_score = 1.0;
  double composite = 0.0;
  std::vector<std::string> events;

  static double composite_of(int collision_gate, int drivable_gate, double progress, double ttc, double comfort) {
    return collision_gate * drivable_gate * (5.0 * progress + 5.0 * ttc + 2.0 * comfort) / 12.0;
  }
  bool operator==(const MetricsReport&) const = default;
};

/// Scores a finished run. `history` holds the world at every simulated tick.
MetricsReport compute_metrics(const std::vector<WorldState>& history, const ScenarioLog& log, const SimConfig& cfg,
                              std::vector<std::string> events = {});

}  // namespace b2dr
