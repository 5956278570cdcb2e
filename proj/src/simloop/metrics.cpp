// SPDX-License-Identifier: Apache-2.0
#include "b2dr/simloop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "b2dr/common/angle.hpp"
#include "b2dr/scenario/polyline.hpp"

namespace b2dr {

namespace {

constexpr double kEdgeTolerance = 1e-9;

std::pair<double, double> project_onto(const std::array<Vec2, 4>& quad, const Vec2& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec2& p : quad) {
    const double d = p.dot(axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

bool separated_along_edges(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  for (int i = 0; i < 4; ++i) {
    const Vec2 edge = a[(i + 1) % 4] - a[i];
    const Vec2 axis(-edge.y(), edge.x());
    if (axis.squaredNorm() == 0.0) continue;
    const auto [amin, amax] = project_onto(a, axis);
    const auto [bmin, bmax] = project_onto(b, axis);
    if (amax < bmin || bmax < amin) return true;
  }
  return false;
}

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  if (len == 0.0) return (p - a).norm() <= kEdgeTolerance;
  const double cross = ab.x() * (p.y() - a.y()) - ab.y() * (p.x() - a.x());
  if (std::abs(cross) / len > kEdgeTolerance) return false;
  const double t = ab.dot(p - a) / (len * len);
  return t >= -kEdgeTolerance / len && t <= 1.0 + kEdgeTolerance / len;
}

std::array<Vec2, 4> footprint_at(const Vec2& center, double yaw, const BoxDims& dims) {
  const Vec2 f(std::cos(yaw), std::sin(yaw));
  const Vec2 l(-f.y(), f.x());
  const double hl = 0.5 * dims.length;
  const double hw = 0.5 * dims.width;
  return {center + hl * f + hw * l, center - hl * f + hw * l, center - hl * f - hw * l, center + hl * f - hw * l};
}

}  // namespace

bool rectangles_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  return !separated_along_edges(a, b) && !separated_along_edges(b, a);
}

std::vector<std::pair<std::string, std::string>> collision_check(const WorldState& world) {
  std::vector<std::pair<std::string, std::string>> pairs;
  const auto ego = ego_footprint(world.ego, world.ego_dims);
  for (const auto& agent : world.agents)
    if (rectangles_overlap(ego, agent.footprint())) pairs.emplace_back("ego", agent.id);
  return pairs;
}

bool point_in_polygon(const Vec2& p, const Polyline2& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (on_segment(p, polygon[i], polygon[(i + 1) % n])) return true;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

int drivable_compliance(const WorldState& world, const ClassTables& classes) {
  if (world.map == nullptr) return 1;
  std::vector<const Polyline2*> drivable;
  for (const auto& e : *world.map)
    if (e.kind == ElementKind::kPolygon &&
        std::find(classes.drivable.begin(), classes.drivable.end(), e.class_id) != classes.drivable.end())
      drivable.push_back(&e.vertices);
  if (drivable.empty()) return 1;
  for (const Vec2& corner : ego_footprint(world.ego, world.ego_dims)) {
    const bool inside = std::any_of(drivable.begin(), drivable.end(),
                                    [&](const Polyline2* poly) { return point_in_polygon(corner, *poly); });
    if (!inside) return 0;
  }
  return 1;
}

double progress_score(const std::vector<EgoState>& history, const Polyline2& route) {
  if (history.empty()) return 0.0;
  const PolylinePath path(route);
  if (!(path.length() > 0.0)) return 0.0;
  const double s0 = path.project(history.front().position).arc;
  const double s1 = path.project(history.back().position).arc;
  return std::clamp((s1 - s0) / path.length(), 0.0, 1.0);
}

std::vector<ComfortSample> comfort_samples(const std::vector<EgoState>& history, const ComfortLimits& limits) {
  std::vector<ComfortSample> out;
  for (std::size_t k = 2; k < history.size(); ++k) {
    const EgoState& e0 = history[k - 2];
    const EgoState& e1 = history[k - 1];
    const EgoState& e2 = history[k];
    const double dt1 = e1.time - e0.time;
    const double dt2 = e2.time - e1.time;
    ComfortSample s;
    if (dt1 > 0.0 && dt2 > 0.0) {
      const double a_prev = (e1.velocity - e0.velocity) / dt1;
      s.accel = (e2.velocity - e1.velocity) / dt2;
      s.jerk = (s.accel - a_prev) / dt2;
      s.yaw_rate = wrap_angle(e2.heading - e1.heading) / dt2;
      s.compliant = s.accel <= limits.max_accel && s.accel >= -limits.max_decel &&
                    std::abs(s.jerk) <= limits.max_jerk && std::abs(s.yaw_rate) <= limits.max_yaw_rate;
    }
    out.push_back(s);
  }
  return out;
}

double comfort_score(const std::vector<EgoState>& history, const ComfortLimits& limits) {
  const auto samples = comfort_samples(history, limits);
  if (samples.empty()) return 1.0;
  const auto ok = std::count_if(samples.begin(), samples.end(), [](const ComfortSample& s) { return s.compliant; });
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

bool ttc_violation(const WorldState& world, const TtcConfig& cfg) {
  const Vec2 ego_dir(std::cos(world.ego.heading), std::sin(world.ego.heading));
  const int n = static_cast<int>(std::floor(cfg.horizon / cfg.substep + 1e-9));
  for (int i = 0; i <= n; ++i) {
    const double t = i * cfg.substep;
    if (t > cfg.threshold + 1e-12) break;
    const auto ego = footprint_at(world.ego.position + world.ego.velocity * t * ego_dir, world.ego.heading,
                                  world.ego_dims);
    for (const auto& a : world.agents) {
      const auto other = footprint_at(a.center.head<2>() + a.velocity * t, a.yaw, a.dims);
      if (rectangles_overlap(ego, other)) return true;
    }
  }
  return false;
}

double ttc_score(const std::vector<WorldState>& history, const TtcConfig& cfg) {
  if (history.empty()) return 1.0;
  const auto ok = std::count_if(history.begin(), history.end(),
                                [&](const WorldState& w) { return !ttc_violation(w, cfg); });
  return static_cast<double>(ok) / static_cast<double>(history.size());
}

MetricsReport compute_metrics(const std::vector<WorldState>& history, const ScenarioLog& log, const SimConfig& cfg,
                              std::vector<std::string> events) {
  MetricsReport r;
  r.events = std::move(events);
  std::vector<EgoState> egos;
  egos.reserve(history.size());
  for (const auto& w : history) {
    egos.push_back(w.ego);
    for (const auto& [a, b] : collision_check(w)) {
      r.collision_gate = 0;
      r.events.push_back("tick " + std::to_string(w.tick) + ": collision " + a + "/" + b);
    }
    if (drivable_compliance(w, log.classes) == 0) {
      r.drivable_gate = 0;
      r.events.push_back("tick " + std::to_string(w.tick) + ": ego outside drivable area");
    }
  }
  r.progress = progress_score(egos, log.ego_route);
  r.comfort = comfort_score(egos, cfg.comfort);
  r.ttc_score = ttc_score(history, cfg.ttc);
  r.composite = MetricsReport::composite_of(r.collision_gate, r.drivable_gate, r.progress, r.ttc_score, r.comfort);
  return r;
}

}  // namespace b2dr
