// SPDX-License-Identifier: Apache-2.0
#include "b2dr/scenario/scenario_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "b2dr/common/angle.hpp"
#include "b2dr/common/error.hpp"
#include "b2dr/scenario/polyline.hpp"
#include "b2dr/scenario/validate.hpp"

namespace b2dr {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError("scenario field '" + path + "': " + what);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& v, const std::string& path) {
  array(v, path);
  if (v.size() != N) fail(path, "expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Mat4 mat4(const json& v, const std::string& path) {
  array(v, path);
  if (v.size() != 4) fail(path, "expected 4 rows");
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    const Eigen::Vector4d row = vec<4>(v[r], path + "[" + std::to_string(r) + "]");
    m.row(r) = row.transpose();
  }
  return m;
}

Polyline2 polyline(const json& v, const std::string& path) {
  array(v, path);
  Polyline2 out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(vec<2>(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> names(const json& v, const std::string& path) {
  array(v, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(text(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::size_t class_index(const json& v, const std::vector<std::string>& table, const std::string& path) {
  if (v.is_number_integer()) {
    const long long idx = v.get<long long>();
    if (idx < 0) fail(path, "negative class index");
    return static_cast<std::size_t>(idx);
  }
  const std::string name = text(v, path);
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i] == name) return i;
  fail(path, "unknown class '" + name + "'");
}

json class_ref(std::size_t id, const std::vector<std::string>& table) {
  if (id < table.size()) return table[id];
  return id;
}

json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Mat4& m) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
  return rows;
}
json to_json(const Polyline2& p) {
  json out = json::array();
  for (const auto& v : p) out.push_back(to_json(v));
  return out;
}

ClassTables parse_classes(const json& doc) {
  const json& c = member(doc, "classes", "");
  ClassTables t;
  t.box = names(member(c, "box", "classes"), "classes.box");
  t.map = names(member(c, "map", "classes"), "classes.map");
  if (c.contains("drivable")) {
    const json& d = array(c["drivable"], "classes.drivable");
    for (std::size_t i = 0; i < d.size(); ++i)
      t.drivable.push_back(class_index(d[i], t.map, "classes.drivable[" + std::to_string(i) + "]"));
  }
  return t;
}

Camera parse_camera(const json& v, const std::string& path) {
  Camera cam;
  cam.name = text(member(v, "name", path), path + ".name");
  cam.intrinsics.fx = number(member(v, "fx", path), path + ".fx");
  cam.intrinsics.fy = number(member(v, "fy", path), path + ".fy");
  cam.intrinsics.cx = number(member(v, "cx", path), path + ".cx");
  cam.intrinsics.cy = number(member(v, "cy", path), path + ".cy");
  cam.width = integer(member(v, "width", path), path + ".width");
  cam.height = integer(member(v, "height", path), path + ".height");
  if (cam.width <= 0 || cam.height <= 0) fail(path, "image size must be positive");
  cam.extrinsic = mat4(member(v, "extrinsic", path), path + ".extrinsic");
  cam.K = v.contains("K") ? mat4(v["K"], path + ".K") : cam.composed_K();
  return cam;
}

}  // namespace

ScenarioLog parse_scenario(const json& doc, std::string base_dir) {
  if (!doc.is_object()) fail("", "document must be an object");
  const json& version = member(doc, "b2dr_scenario_version", "");
  if (integer(version, "b2dr_scenario_version") != kScenarioVersion)
    fail("b2dr_scenario_version", "unsupported version " + version.dump());

  ScenarioLog log;
  log.base_dir = std::move(base_dir);
  log.classes = parse_classes(doc);

  const json& cams = array(member(doc, "cameras", ""), "cameras");
  for (std::size_t i = 0; i < cams.size(); ++i)
    log.rig.cameras.push_back(parse_camera(cams[i], "cameras[" + std::to_string(i) + "]"));

  if (doc.contains("ego")) {
    const BoxDims d{number(member(doc["ego"], "length", "ego"), "ego.length"),
                    number(member(doc["ego"], "width", "ego"), "ego.width"),
                    number(member(doc["ego"], "height", "ego"), "ego.height")};
    log.ego_dims = d;
  }

  const json& frames = array(member(doc, "frames", ""), "frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string path = "frames[" + std::to_string(i) + "]";
    const json& f = frames[i];
    RecordedFrame rf;
    rf.coord = vec<2>(member(f, "coord", path), path + ".coord");
    rf.heading = wrap_angle(number(member(f, "heading", path), path + ".heading"));
    rf.time = number(member(f, "time", path), path + ".time");
    const json& images = member(f, "images", path);
    if (!images.is_object()) fail(path + ".images", "expected an object keyed by camera name");
    rf.image_refs.assign(log.rig.cameras.size(), std::string());
    for (const auto& [cam_name, ref] : images.items()) {
      const auto idx = log.rig.index_of(cam_name);
      if (!idx) fail(path + ".images." + cam_name, "no camera with this name");
      rf.image_refs[*idx] = text(ref, path + ".images." + cam_name);
    }
    log.frames.push_back(std::move(rf));
  }

  const json& map = array(member(doc, "map", ""), "map");
  for (std::size_t i = 0; i < map.size(); ++i) {
    const std::string path = "map[" + std::to_string(i) + "]";
    MapElement e;
    e.id = text(member(map[i], "id", path), path + ".id");
    e.class_id = class_index(member(map[i], "class", path), log.classes.map, path + ".class");
    const std::string kind = text(member(map[i], "kind", path), path + ".kind");
    if (kind == "polygon") e.kind = ElementKind::kPolygon;
    else if (kind == "linestring") e.kind = ElementKind::kLinestring;
    else fail(path + ".kind", "expected 'polygon' or 'linestring'");
    e.vertices = polyline(member(map[i], "vertices", path), path + ".vertices");
    log.map.push_back(std::move(e));
  }

  const json& agents = array(member(doc, "agents", ""), "agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    AgentBox box;
    box.id = text(member(a, "id", path), path + ".id");
    box.class_id = class_index(member(a, "class", path), log.classes.box, path + ".class");
    box.center = vec<3>(member(a, "center", path), path + ".center");
    const Vec3 dims = vec<3>(member(a, "dims", path), path + ".dims");
    box.dims = {dims.x(), dims.y(), dims.z()};
    box.yaw = wrap_angle(number(member(a, "yaw", path), path + ".yaw"));
    box.velocity = a.contains("velocity") ? Vec2(vec<2>(a["velocity"], path + ".velocity")) : Vec2::Zero();
    if (a.contains("route")) box.route = polyline(a["route"], path + ".route");
    if (a.contains("target_speed")) box.target_speed = number(a["target_speed"], path + ".target_speed");
    if (a.contains("dynamic")) {
      if (!a["dynamic"].is_boolean()) fail(path + ".dynamic", "expected a boolean");
      box.dynamic = a["dynamic"].get<bool>();
    } else {
      box.dynamic = box.route.size() >= 2;
    }
    if (box.route.size() >= 2) box.route_progress = PolylinePath(box.route).project(box.center.head<2>()).arc;
    log.initial_agents.push_back(std::move(box));
  }

  log.ego_route = polyline(member(doc, "ego_route", ""), "ego_route");
  log.goal = vec<2>(member(doc, "goal", ""), "goal");
  return log;
}

ScenarioLog parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("scenario file '" + path + "': " + e.what());
  }
  const std::filesystem::path p(path);
  std::string dir = p.has_parent_path() ? p.parent_path().string() : std::string(".");
  return parse_scenario(doc, std::move(dir));
}

ScenarioLog load_scenario(const std::string& path) {
  ScenarioLog log = parse_scenario_file(path);
  const ValidationReport report = validate_scenario(log);
  if (!report.empty()) {
    std::ostringstream msg;
    msg << "scenario '" << path << "' violates " << report.size() << " invariant(s):";
    for (const auto& v : report) msg << "\n  " << v.to_string();
    throw InvariantError(msg.str());
  }
  return log;
}

nlohmann::json serialize_scenario(const ScenarioLog& log) {
  json doc;
  doc["b2dr_scenario_version"] = kScenarioVersion;
  json drivable = json::array();
  for (std::size_t id : log.classes.drivable) drivable.push_back(class_ref(id, log.classes.map));
  doc["classes"] = {{"box", log.classes.box}, {"map", log.classes.map}, {"drivable", drivable}};
  doc["ego"] = {{"length", log.ego_dims.length}, {"width", log.ego_dims.width}, {"height", log.ego_dims.height}};

  json cams = json::array();
  for (const auto& c : log.rig.cameras) {
    cams.push_back({{"name", c.name},
                    {"fx", c.intrinsics.fx},
                    {"fy", c.intrinsics.fy},
                    {"cx", c.intrinsics.cx},
                    {"cy", c.intrinsics.cy},
                    {"width", c.width},
                    {"height", c.height},
                    {"extrinsic", to_json(c.extrinsic)},
                    {"K", to_json(c.K)}});
  }
  doc["cameras"] = cams;

  json frames = json::array();
  for (const auto& f : log.frames) {
    json images = json::object();
    for (std::size_t i = 0; i < f.image_refs.size() && i < log.rig.cameras.size(); ++i)
      if (!f.image_refs[i].empty()) images[log.rig.cameras[i].name] = f.image_refs[i];
    frames.push_back({{"coord", to_json(f.coord)}, {"heading", f.heading}, {"time", f.time}, {"images", images}});
  }
  doc["frames"] = frames;

  json map = json::array();
  for (const auto& e : log.map) {
    map.push_back({{"id", e.id},
                   {"class", class_ref(e.class_id, log.classes.map)},
                   {"kind", e.kind == ElementKind::kPolygon ? "polygon" : "linestring"},
                   {"vertices", to_json(e.vertices)}});
  }
  doc["map"] = map;

  json agents = json::array();
  for (const auto& a : log.initial_agents) {
    json j = {{"id", a.id},
              {"class", class_ref(a.class_id, log.classes.box)},
              {"center", to_json(a.center)},
              {"dims", json::array({a.dims.length, a.dims.width, a.dims.height})},
              {"yaw", a.yaw},
              {"velocity", to_json(a.velocity)},
              {"dynamic", a.dynamic}};
    if (!a.route.empty()) j["route"] = to_json(a.route);
    if (a.target_speed) j["target_speed"] = *a.target_speed;
    agents.push_back(std::move(j));
  }
  doc["agents"] = agents;
  doc["ego_route"] = to_json(log.ego_route);
  doc["goal"] = to_json(log.goal);
  return doc;
}

void save_scenario(const ScenarioLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file '" + path + "'");
  out << serialize_scenario(log).dump(2) << '\n';
}

}  // namespace b2dr
