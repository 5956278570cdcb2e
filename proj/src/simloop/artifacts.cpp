// SPDX-License-Identifier: Apache-2.0
#include "b2dr/simloop/artifacts.hpp"

#include <filesystem>

#include "b2dr/common/error.hpp"
#include "b2dr/render/image_io.hpp"

namespace b2dr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

const json& need(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(std::string("steps record: missing field '") + key + "'");
  return obj.at(key);
}

double num(const json& obj, const char* key) {
  const json& v = need(obj, key);
  if (!v.is_number()) throw ParseError(std::string("steps record: field '") + key + "' must be a number");
  return v.get<double>();
}

Vec2 vec2(const json& obj, const char* key) {
  const json& v = need(obj, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(std::string("steps record: field '") + key + "' must be [x, y]");
  return Vec2(v[0].get<double>(), v[1].get<double>());
}

}  // namespace

json metrics_to_json(const MetricsReport& r, const RunResult* run) {
  json doc = {{"score_name", kScoreName},
              {"collision_gate", r.collision_gate},
              {"drivable_gate", r.drivable_gate},
              {"progress", r.progress},
              {"comfort", r.comfort},
              {"ttc_score", r.ttc_score},
              {"composite", r.composite},
              {"events", r.events}};
  if (run != nullptr) {
    doc["ticks"] = run->records.empty() ? 0 : run->records.back().tick;
    doc["planner_invocations"] = run->planner_calls;
    doc["render_invocations"] = run->render_calls;
  }
  return doc;
}

MetricsReport metrics_from_json(const json& doc) {
  MetricsReport r;
  try {
    r.collision_gate = doc.at("collision_gate").get<int>();
    r.drivable_gate = doc.at("drivable_gate").get<int>();
    r.progress = doc.at("progress").get<double>();
    r.comfort = doc.at("comfort").get<double>();
    r.ttc_score = doc.at("ttc_score").get<double>();
    r.composite = doc.at("composite").get<double>();
    r.events = doc.at("events").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("metrics document: ") + e.what());
  }
  return r;
}

std::string frame_image_name(const std::string& camera, long tick) {
  return "frames/cam_" + camera + "_" + std::to_string(tick) + ".png";
}

json step_record_to_json(const StepRecord& rec, const ClassTables&) {
  const EgoState& e = rec.world.ego;
  json agents = json::array();
  for (const auto& a : rec.world.agents)
    agents.push_back({{"id", a.id},
                      {"class", a.class_id},
                      {"center", vec(a.center)},
                      {"dims", json::array({a.dims.length, a.dims.width, a.dims.height})},
                      {"yaw", a.yaw},
                      {"velocity", vec(a.velocity)},
                      {"dynamic", a.dynamic},
                      {"route_progress", a.route_progress}});
  json traj = nullptr;
  if (rec.trajectory) {
    json wps = json::array();
    for (const auto& w : rec.trajectory->waypoints) wps.push_back(vec(w));
    traj = {{"waypoints", wps}, {"waypoint_dt", rec.trajectory->waypoint_dt}, {"plan_time", rec.trajectory->plan_time}};
  }
  json frame = nullptr;
  if (rec.frame) frame = {{"backend", rec.frame->backend_id}, {"images", json::array()}};
  json collisions = json::array();
  for (const auto& [a, b] : rec.metrics.collisions) collisions.push_back(json::array({a, b}));
  return {{"tick", rec.tick},
          {"time", e.time},
          {"ego",
           {{"position", vec(e.position)},
            {"heading", e.heading},
            {"velocity", e.velocity},
            {"acceleration", e.acceleration},
            {"steering_angle", e.steering_angle},
            {"dims", json::array({rec.world.ego_dims.length, rec.world.ego_dims.width, rec.world.ego_dims.height})}}},
          {"agents", agents},
          {"trajectory", traj},
          {"frame", frame},
          {"metrics",
           {{"collisions", collisions},
            {"drivable", rec.metrics.drivable},
            {"ttc_violation", rec.metrics.ttc_violation}}}};
}

WorldState world_from_step_json(const json& line, const std::vector<MapElement>* map) {
  WorldState w;
  w.map = map;
  const json& tick = need(line, "tick");
  if (!tick.is_number_integer()) throw ParseError("steps record: field 'tick' must be an integer");
  w.tick = tick.get<long>();
  const json& e = need(line, "ego");
  w.ego.position = vec2(e, "position");
  w.ego.heading = num(e, "heading");
  w.ego.velocity = num(e, "velocity");
  w.ego.acceleration = num(e, "acceleration");
  w.ego.steering_angle = num(e, "steering_angle");
  w.ego.time = num(line, "time");
  if (e.contains("dims")) {
    const json& d = e["dims"];
    if (!d.is_array() || d.size() != 3) throw ParseError("steps record: field 'ego.dims' must be [l, w, h]");
    w.ego_dims = BoxDims{d[0].get<double>(), d[1].get<double>(), d[2].get<double>()};
  }
  const json& agents = need(line, "agents");
  if (!agents.is_array()) throw ParseError("steps record: field 'agents' must be an array");
  for (const auto& a : agents) {
    AgentBox b;
    const json& id = need(a, "id");
    if (!id.is_string()) throw ParseError("steps record: agent id must be a string");
    b.id = id.get<std::string>();
    const json& cls = need(a, "class");
    if (!cls.is_number_unsigned() && !cls.is_number_integer()) throw ParseError("steps record: agent class must be an index");
    b.class_id = cls.get<std::size_t>();
    const json& c = need(a, "center");
    if (!c.is_array() || c.size() != 3) throw ParseError("steps record: agent center must be [x, y, z]");
    b.center = Vec3(c[0].get<double>(), c[1].get<double>(), c[2].get<double>());
    const json& d = need(a, "dims");
    if (!d.is_array() || d.size() != 3) throw ParseError("steps record: agent dims must be [l, w, h]");
    b.dims = BoxDims{d[0].get<double>(), d[1].get<double>(), d[2].get<double>()};
    b.yaw = num(a, "yaw");
    b.velocity = vec2(a, "velocity");
    if (a.contains("dynamic") && a["dynamic"].is_boolean()) b.dynamic = a["dynamic"].get<bool>();
    if (a.contains("route_progress") && a["route_progress"].is_number()) b.route_progress = a["route_progress"].get<double>();
    w.agents.push_back(std::move(b));
  }
  return w;
}

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

ArtifactWriter::ArtifactWriter(const std::string& out_dir, const ScenarioLog& log) : out_dir_(out_dir), log_(&log) {
  fs::create_directories(fs::path(out_dir) / "frames");
  const std::string steps = (fs::path(out_dir) / "steps.jsonl").string();
  steps_.open(steps, std::ios::trunc);
  if (!steps_) throw Error("cannot write '" + steps + "'");
}

void ArtifactWriter::write(const StepRecord& rec) {
  json line = step_record_to_json(rec, log_->classes);
  if (rec.frame) {
    for (std::size_t c = 0; c < rec.frame->images.size(); ++c) {
      const std::string name = frame_image_name(log_->rig.cameras[c].name, rec.tick);
      write_png(rec.frame->images[c], (fs::path(out_dir_) / name).string());
      line["frame"]["images"].push_back(name);
    }
  }
  steps_ << line.dump() << '\n';
  steps_.flush();
}

void ArtifactWriter::finish(const RunResult& result) {
  steps_.close();
  write_json_file(metrics_to_json(result.report, &result), (fs::path(out_dir_) / "metrics.json").string());
}

}  // namespace b2dr
