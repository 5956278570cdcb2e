// SPDX-License-Identifier: Apache-2.0
// Generates the shipped scenario fixtures: a straight road, a curve and a
// crossing, each with a two-camera rig and ray-cast ground-texture images.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include "b2dr/common/angle.hpp"
#include "b2dr/geometry/projection.hpp"
#include "b2dr/render/image_io.hpp"
#include "b2dr/scenario/polyline.hpp"
#include "b2dr/scenario/scenario_io.hpp"
#include "b2dr/scenario/transforms.hpp"
#include "b2dr/scenario/validate.hpp"

namespace fs = std::filesystem;
using namespace b2dr;

namespace {

constexpr int kWidth = 400;
constexpr int kHeight = 224;
constexpr double kSpeed = 5.0;
constexpr double kFrameDt = 0.5;
constexpr int kFrames = 21;
constexpr double kLaneOffset = 2.5;
constexpr double kHalfRoad = 5.0;

Camera make_camera(const std::string& name, bool rear, int w, int h) {
  Camera c;
  c.name = name;
  c.width = w;
  c.height = h;
  c.intrinsics = {0.5 * w, 0.5 * w, 0.5 * w - 0.5, 0.5 * h - 0.5};
  Mat3 R;
  Vec3 mount;
  if (!rear) {
    R << 0, -1, 0, 0, 0, -1, 1, 0, 0;
    mount = Vec3(1.5, 0.0, 1.6);
  } else {
    R << 0, 1, 0, 0, 0, -1, -1, 0, 0;
    mount = Vec3(-1.0, 0.0, 1.6);
  }
  c.extrinsic.setIdentity();
  c.extrinsic.topLeftCorner<3, 3>() = R;
  c.extrinsic.topRightCorner<3, 1>() = -R * mount;
  c.K = c.composed_K();
  return c;
}

ClassTables classes() {
  ClassTables t;
  t.box = {"car", "truck", "pedestrian", "cyclist"};
  t.map = {"drivable_area", "lane_divider", "road_edge", "crosswalk", "stop_line"};
  t.drivable = {0};
  return t;
}

/// Offsets a polyline sideways (positive = left).
Polyline2 offset_polyline(const Polyline2& line, double d) {
  Polyline2 out;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const Vec2 a = line[i == 0 ? 0 : i - 1];
    const Vec2 b = line[i + 1 < line.size() ? i + 1 : i];
    const Vec2 t = (b - a).normalized();
    out.push_back(line[i] + d * Vec2(-t.y(), t.x()));
  }
  return out;
}

Polyline2 band_polygon(const Polyline2& center, double half) {
  Polyline2 left = offset_polyline(center, half);
  Polyline2 right = offset_polyline(center, -half);
  Polyline2 poly = right;
  for (auto it = left.rbegin(); it != left.rend(); ++it) poly.push_back(*it);
  return poly;
}

double distance_to_polyline(const Vec2& p, const Polyline2& line) {
  double best = 1e18;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec2 ab = line[i + 1] - line[i];
    const double t = std::clamp(ab.dot(p - line[i]) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (line[i] + t * ab - p).norm());
  }
  return best;
}

bool inside(const Vec2& p, const Polyline2& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y()))
      in = !in;
  }
  return in;
}

Vec3 ground_color(const Vec2& g, const ScenarioLog& log) {
  for (const auto& e : log.map) {
    if (e.kind != ElementKind::kLinestring) continue;
    const double d = distance_to_polyline(g, e.vertices);
    if (e.class_id == 1 && d < 0.12 && std::fmod(std::abs(g.x() + g.y()) + 100.0, 4.0) < 2.0) return {0.95, 0.85, 0.3};
    if (e.class_id == 2 && d < 0.15) return {0.92, 0.92, 0.92};
  }
  bool road = false;
  for (const auto& e : log.map)
    if (e.kind == ElementKind::kPolygon && e.class_id == 0 && inside(g, e.vertices)) road = true;
  const int cx = static_cast<int>(std::floor(g.x() / 2.0));
  const int cy = static_cast<int>(std::floor(g.y() / 2.0));
  const double checker = ((cx + cy) & 1) ? 0.04 : -0.04;
  if (road) return {0.33 + checker, 0.33 + checker, 0.35 + checker};
  return {0.25 + checker, 0.45 + checker, 0.20 + checker};
}

Image render_recorded(const Camera& cam, const EgoState& pose, const ScenarioLog& log) {
  Image img(3, cam.height, cam.width);
  const Mat4 K_inv = cam.K.inverse();
  const Vec3 center = (cam.extrinsic.inverse() * Eigen::Vector4d(0, 0, 0, 1)).head<3>();
  for (int v = 0; v < cam.height; ++v)
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 ray = unproject(u, v, 1.0, K_inv) - center;
      Vec3 color;
      if (ray.z() < -1e-9 && -center.z() / ray.z() * ray.norm() < 400.0) {
        const double lambda = -center.z() / ray.z();
        color = ground_color(ego_to_global(Vec2((center + lambda * ray).head<2>()), pose), log);
      } else {
        const double t = static_cast<double>(v) / cam.height;
        color = Vec3(0.55, 0.70, 0.90) * (1.0 - 0.3 * t) + Vec3(0.9, 0.9, 0.95) * 0.3 * t;
      }
      for (int c = 0; c < 3; ++c) img.at(c, v, u) = color[c];
    }
  return img;
}

AgentBox car(const std::string& id, std::size_t cls, const Polyline2& route, double progress, double speed,
             bool dynamic) {
  const PolylinePath path(route);
  AgentBox a;
  a.id = id;
  a.class_id = cls;
  a.dims = cls == 1   ? BoxDims{8.0, 2.5, 3.2}
           : cls == 2 ? BoxDims{0.6, 0.6, 1.7}
           : cls == 3 ? BoxDims{1.8, 0.6, 1.6}
                      : BoxDims{4.5, 1.9, 1.5};
  const Vec2 p = path.point_at(progress);
  const Vec2 t = path.tangent_at(progress);
  a.center = Vec3(p.x(), p.y(), 0.5 * a.dims.height);
  a.yaw = wrap_angle(std::atan2(t.y(), t.x()));
  a.dynamic = dynamic;
  a.velocity = dynamic ? Vec2(speed * t) : Vec2::Zero();
  if (dynamic) {
    a.route = route;
    a.target_speed = speed;
    a.route_progress = progress;
  }
  return a;
}

/// Frames along the ego path at constant speed, headings from the path tangent.
void record_frames(ScenarioLog& log, const Polyline2& ego_path, const std::string& dir, int frames, double dt) {
  const PolylinePath path(ego_path);
  fs::create_directories(fs::path(dir) / "images");
  for (int i = 0; i < frames; ++i) {
    RecordedFrame f;
    const double s = kSpeed * dt * i;
    f.coord = path.point_at(s);
    const Vec2 t = path.tangent_at(s);
    f.heading = wrap_angle(std::atan2(t.y(), t.x()));
    f.time = dt * i;
    const EgoState pose = pose_state(f.coord, f.heading);
    for (const auto& cam : log.rig.cameras) {
      char name[64];
      std::snprintf(name, sizeof name, "images/frame_%03d_%s.png", i, cam.name.c_str());
      write_png(render_recorded(cam, pose, log), (fs::path(dir) / name).string());
      f.image_refs.push_back(name);
    }
    log.frames.push_back(std::move(f));
  }
  log.ego_route = {};
  const double total = kSpeed * dt * (frames - 1);
  for (double s = 0.0; s < total; s += 1.0) log.ego_route.push_back(path.point_at(s));
  log.ego_route.push_back(path.point_at(total));
  log.goal = log.ego_route.back();
}

void add_road(ScenarioLog& log, const std::string& prefix, const Polyline2& center) {
  log.map.push_back({prefix + "_area", band_polygon(center, kHalfRoad), 0, ElementKind::kPolygon});
  log.map.push_back({prefix + "_divider", center, 1, ElementKind::kLinestring});
  log.map.push_back({prefix + "_edge_l", offset_polyline(center, kHalfRoad), 2, ElementKind::kLinestring});
  log.map.push_back({prefix + "_edge_r", offset_polyline(center, -kHalfRoad), 2, ElementKind::kLinestring});
}

ScenarioLog base_log() {
  ScenarioLog log;
  log.classes = classes();
  log.rig.cameras = {make_camera("front", false, kWidth, kHeight), make_camera("rear", true, kWidth, kHeight)};
  return log;
}

void finish(ScenarioLog& log, const std::string& dir, const std::string& name) {
  const auto violations = validate_scenario(log);
  for (const auto& v : violations) std::cerr << name << ": " << v.to_string() << '\n';
  if (!violations.empty()) throw std::runtime_error("fixture " + name + " is invalid");
  save_scenario(log, (fs::path(dir) / "scenario.json").string());
  std::cout << "wrote " << (fs::path(dir) / "scenario.json").string() << '\n';
}

void make_straight(const std::string& root) {
  const std::string dir = root + "/data/fixtures/straight";
  ScenarioLog log = base_log();
  const Polyline2 center{{-30.0, 0.0}, {160.0, 0.0}};
  add_road(log, "main", center);
  log.map.push_back({"crosswalk_1", {{70, -5}, {73, -5}, {73, 5}, {70, 5}}, 3, ElementKind::kPolygon});
  log.map.push_back({"stop_1", {{68, -5}, {68, 0}}, 4, ElementKind::kLinestring});
  const Polyline2 lane_r{{-30.0, -kLaneOffset}, {160.0, -kLaneOffset}};
  const Polyline2 lane_l{{160.0, kLaneOffset}, {-30.0, kLaneOffset}};
  log.initial_agents.push_back(car("lead", 0, lane_r, 50.0, 6.0, true));
  log.initial_agents.push_back(car("oncoming", 1, lane_l, 60.0, 4.0, true));
  log.initial_agents.push_back(car("parked", 0, Polyline2{{0, 7.5}, {200, 7.5}}, 75.0, 0.0, false));
  record_frames(log, Polyline2{{0.0, -kLaneOffset}, {150.0, -kLaneOffset}}, dir, kFrames, kFrameDt);
  finish(log, dir, "straight");
}

Polyline2 curve_center() {
  // 15 m straight along x, then a left arc of radius 32.5 m, then straight.
  Polyline2 pts;
  for (double x = -30.0; x < 15.0; x += 5.0) pts.emplace_back(x, 0.0);
  const double r = 32.5;
  const Vec2 c(15.0, r);
  const double sweep = std::numbers::pi / 2.0;
  for (int i = 0; i <= 60; ++i) {
    const double a = -std::numbers::pi / 2.0 + sweep * i / 60.0;
    pts.emplace_back(c.x() + r * std::cos(a), c.y() + r * std::sin(a));
  }
  for (double y = r + 5.0; y <= r + 40.0; y += 5.0) pts.emplace_back(15.0 + r, y);
  return pts;
}

void make_curve(const std::string& root) {
  const std::string dir = root + "/data/fixtures/curve";
  ScenarioLog log = base_log();
  const Polyline2 center = curve_center();
  add_road(log, "bend", center);
  const Polyline2 lane_r = offset_polyline(center, -kLaneOffset);
  Polyline2 lane_l = offset_polyline(center, kLaneOffset);
  std::reverse(lane_l.begin(), lane_l.end());
  log.initial_agents.push_back(car("lead", 0, lane_r, 70.0, 5.5, true));
  log.initial_agents.push_back(car("oncoming", 0, lane_l, 40.0, 5.0, true));
  log.initial_agents.push_back(car("walker", 2, Polyline2{{0, 8}, {100, 8}}, 22.0, 0.0, false));
  log.initial_agents.push_back(car("rider", 3, Polyline2{{-10, -7}, {100, -7}}, 18.0, 0.0, false));
  // The ego lane starts 30 m into the offset centerline (x = 0).
  const PolylinePath lane(lane_r);
  Polyline2 ego_path;
  for (double s = 30.0; s <= lane.length(); s += 0.5) ego_path.push_back(lane.point_at(s));
  record_frames(log, ego_path, dir, kFrames, kFrameDt);
  finish(log, dir, "curve");
}

void make_crossing(const std::string& root) {
  const std::string dir = root + "/data/fixtures/crossing";
  ScenarioLog log = base_log();
  add_road(log, "ew", Polyline2{{-30.0, 0.0}, {120.0, 0.0}});
  // North-south road split around the junction so lane markings do not cross.
  log.map.push_back({"ns_area", band_polygon(Polyline2{{40.0, -60.0}, {40.0, 60.0}}, kHalfRoad), 0, ElementKind::kPolygon});
  log.map.push_back({"ns_divider_s", {{40.0, -60.0}, {40.0, -5.0}}, 1, ElementKind::kLinestring});
  log.map.push_back({"ns_divider_n", {{40.0, 5.0}, {40.0, 60.0}}, 1, ElementKind::kLinestring});
  log.map.push_back({"crosswalk_w", {{33, -5}, {35, -5}, {35, 5}, {33, 5}}, 3, ElementKind::kPolygon});
  log.map.push_back({"stop_w", {{32, -5}, {32, 0}}, 4, ElementKind::kLinestring});
  const Polyline2 northbound{{42.5, -60.0}, {42.5, 60.0}};
  const Polyline2 southbound{{37.5, 60.0}, {37.5, -60.0}};
  // Crossing traffic clears the junction seconds before the ego reaches it.
  log.initial_agents.push_back(car("cross_n", 0, northbound, 45.0, 7.0, true));
  log.initial_agents.push_back(car("cross_s", 1, southbound, 45.0, 5.0, true));
  log.initial_agents.push_back(car("waiting", 0, Polyline2{{42.5, -60.0}, {42.5, 60.0}}, 40.0, 0.0, false));
  record_frames(log, Polyline2{{0.0, -kLaneOffset}, {110.0, -kLaneOffset}}, dir, kFrames, kFrameDt);
  finish(log, dir, "crossing");
}

void make_minimal(const std::string& root) {
  const std::string dir = root + "/tests/data/minimal";
  ScenarioLog log;
  log.classes = classes();
  log.rig.cameras = {make_camera("front", false, 64, 32)};
  add_road(log, "main", Polyline2{{-20.0, 0.0}, {40.0, 0.0}});
  log.initial_agents.push_back(car("parked", 0, Polyline2{{0, 7.5}, {60, 7.5}}, 20.0, 0.0, false));
  record_frames(log, Polyline2{{0.0, -kLaneOffset}, {10.0, -kLaneOffset}}, dir, 2, 1.0);
  finish(log, dir, "minimal");

  // Same scenario with a two-vertex drivable polygon.
  nlohmann::json doc = serialize_scenario(log);
  doc["map"][0]["vertices"] = nlohmann::json::array({nlohmann::json::array({0, 0}), nlohmann::json::array({1, 0})});
  std::ofstream(fs::path(dir) / "broken_polygon.json") << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <repo-root>\n";
    return 1;
  }
  const std::string root = argv[1];
  make_straight(root);
  make_curve(root);
  make_crossing(root);
  make_minimal(root);
  return 0;
}
