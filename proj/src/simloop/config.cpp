// SPDX-License-Identifier: Apache-2.0
#include "b2dr/simloop/config.hpp"

#include <fstream>
#include <set>

#include "b2dr/common/error.hpp"

namespace b2dr {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config field '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError("config: unknown field '" + (where.empty() ? key : where + "." + key) + "'");
}

double num(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError("config field '" + where + "' must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError("config field '" + where + "' must be an integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError("config field '" + where + "' must be a boolean");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError("config field '" + where + "' must be a string");
  return v.get<std::string>();
}

IdmParams parse_idm(const json& v, IdmParams p, const std::string& where) {
  reject_unknown(v, {"v0", "T", "s0", "a_max", "b", "delta"}, where);
  if (v.contains("v0")) p.v0 = num(v["v0"], where + ".v0");
  if (v.contains("T")) p.T_headway = num(v["T"], where + ".T");
  if (v.contains("s0")) p.s0 = num(v["s0"], where + ".s0");
  if (v.contains("a_max")) p.a_max = num(v["a_max"], where + ".a_max");
  if (v.contains("b")) p.b_comf = num(v["b"], where + ".b");
  if (v.contains("delta")) p.delta = num(v["delta"], where + ".delta");
  if (!p.valid()) throw ConfigError("config field '" + where + "' holds invalid IDM parameters");
  return p;
}

json idm_json(const IdmParams& p) {
  return {{"v0", p.v0}, {"T", p.T_headway}, {"s0", p.s0}, {"a_max", p.a_max}, {"b", p.b_comf}, {"delta", p.delta}};
}

}  // namespace

void SimConfig::check() const {
  if (world_hz <= 0 || planner_hz <= 0) throw ConfigError("world_hz and planner_hz must be positive");
  if (world_hz % planner_hz != 0)
    throw ConfigError("world_hz " + std::to_string(world_hz) + " is not divisible by planner_hz " +
                      std::to_string(planner_hz));
  if (horizon_s && !(*horizon_s > 0.0)) throw ConfigError("horizon_s must be > 0");
  if (render_width <= 0 || render_height <= 0) throw ConfigError("render resolution must be positive");
  if (waypoints < 1 || !(waypoint_dt > 0.0)) throw ConfigError("trajectory needs >= 1 waypoint and waypoint_dt > 0");
  if (waypoints * waypoint_dt + 1e-9 < 1.0 / planner_hz)
    throw ConfigError("trajectory horizon shorter than the planning interval");
  if (!idm.valid()) throw ConfigError("invalid IDM parameters");
  if (!(ttc.substep > 0.0) || ttc.horizon < 0.0) throw ConfigError("ttc substep must be > 0");
  if (toy.steps < 1 || !(toy.sigma > 0.0)) throw ConfigError("toy renderer needs steps >= 1 and sigma > 0");
}

SimConfig parse_sim_config(const json& doc, SimConfig c) {
  reject_unknown(doc,
                 {"world_hz", "planner_hz", "horizon_s", "seed", "backend", "idm", "idm_per_class", "idm_lookahead",
                  "comfort", "ttc", "stop_on_collision", "training_mode_retrieval", "resolution", "waypoints",
                  "waypoint_dt", "toy", "remote"},
                 "");
  if (doc.contains("world_hz")) c.world_hz = integer(doc["world_hz"], "world_hz");
  if (doc.contains("planner_hz")) c.planner_hz = integer(doc["planner_hz"], "planner_hz");
  if (doc.contains("horizon_s") && !doc["horizon_s"].is_null()) c.horizon_s = num(doc["horizon_s"], "horizon_s");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
      throw ConfigError("config field 'seed' must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("backend")) c.backend = text(doc["backend"], "backend");
  if (doc.contains("idm")) c.idm = parse_idm(doc["idm"], c.idm, "idm");
  if (doc.contains("idm_per_class")) {
    const json& v = doc["idm_per_class"];
    if (!v.is_object()) throw ConfigError("config field 'idm_per_class' must be an object");
    for (const auto& [name, params] : v.items())
      c.idm_per_class[name] = parse_idm(params, c.idm, "idm_per_class." + name);
  }
  if (doc.contains("idm_lookahead")) c.idm_lookahead = num(doc["idm_lookahead"], "idm_lookahead");
  if (doc.contains("comfort")) {
    const json& v = doc["comfort"];
    reject_unknown(v, {"max_accel", "max_decel", "max_jerk", "max_yaw_rate"}, "comfort");
    if (v.contains("max_accel")) c.comfort.max_accel = num(v["max_accel"], "comfort.max_accel");
    if (v.contains("max_decel")) c.comfort.max_decel = num(v["max_decel"], "comfort.max_decel");
    if (v.contains("max_jerk")) c.comfort.max_jerk = num(v["max_jerk"], "comfort.max_jerk");
    if (v.contains("max_yaw_rate")) c.comfort.max_yaw_rate = num(v["max_yaw_rate"], "comfort.max_yaw_rate");
  }
  if (doc.contains("ttc")) {
    const json& v = doc["ttc"];
    reject_unknown(v, {"threshold", "horizon", "substep"}, "ttc");
    if (v.contains("threshold")) c.ttc.threshold = num(v["threshold"], "ttc.threshold");
    if (v.contains("horizon")) c.ttc.horizon = num(v["horizon"], "ttc.horizon");
    if (v.contains("substep")) c.ttc.substep = num(v["substep"], "ttc.substep");
  }
  if (doc.contains("stop_on_collision")) c.stop_on_collision = boolean(doc["stop_on_collision"], "stop_on_collision");
  if (doc.contains("training_mode_retrieval"))
    c.training_mode_retrieval = boolean(doc["training_mode_retrieval"], "training_mode_retrieval");
  if (doc.contains("resolution")) {
    const json& v = doc["resolution"];
    reject_unknown(v, {"width", "height"}, "resolution");
    if (v.contains("width")) c.render_width = integer(v["width"], "resolution.width");
    if (v.contains("height")) c.render_height = integer(v["height"], "resolution.height");
  }
  if (doc.contains("waypoints")) c.waypoints = integer(doc["waypoints"], "waypoints");
  if (doc.contains("waypoint_dt")) c.waypoint_dt = num(doc["waypoint_dt"], "waypoint_dt");
  if (doc.contains("toy")) {
    const json& v = doc["toy"];
    reject_unknown(v,
                   {"steps", "sigma", "reference_scale", "modulation_max", "blur_std", "prev_weight",
                    "attention_weight", "pe_dim", "pe_depth_bins", "feature_gain"},
                   "toy");
    ToyConfig& t = c.toy;
    if (v.contains("steps")) t.steps = integer(v["steps"], "toy.steps");
    if (v.contains("sigma")) t.sigma = num(v["sigma"], "toy.sigma");
    if (v.contains("reference_scale")) t.reference_scale = num(v["reference_scale"], "toy.reference_scale");
    if (v.contains("modulation_max")) t.modulation_max = integer(v["modulation_max"], "toy.modulation_max");
    if (v.contains("blur_std")) t.blur_std = num(v["blur_std"], "toy.blur_std");
    if (v.contains("prev_weight")) t.prev_weight = num(v["prev_weight"], "toy.prev_weight");
    if (v.contains("attention_weight")) t.attention_weight = num(v["attention_weight"], "toy.attention_weight");
    if (v.contains("pe_dim")) t.pe_dim = integer(v["pe_dim"], "toy.pe_dim");
    if (v.contains("pe_depth_bins")) t.pe_depth_bins = integer(v["pe_depth_bins"], "toy.pe_depth_bins");
    if (v.contains("feature_gain")) t.feature_gain = num(v["feature_gain"], "toy.feature_gain");
  }
  if (doc.contains("remote")) {
    const json& v = doc["remote"];
    reject_unknown(v, {"endpoint", "timeout_ms"}, "remote");
    if (v.contains("endpoint")) c.remote.endpoint = text(v["endpoint"], "remote.endpoint");
    if (v.contains("timeout_ms")) c.remote.timeout_ms = integer(v["timeout_ms"], "remote.timeout_ms");
  }
  c.check();
  return c;
}

SimConfig load_sim_config(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file '" + path + "' is not valid JSON");
  return parse_sim_config(doc, std::move(base));
}

json sim_config_to_json(const SimConfig& c) {
  json per_class = json::object();
  for (const auto& [name, p] : c.idm_per_class) per_class[name] = idm_json(p);
  json doc = {{"world_hz", c.world_hz},
              {"planner_hz", c.planner_hz},
              {"horizon_s", c.horizon_s ? json(*c.horizon_s) : json(nullptr)},
              {"seed", c.seed},
              {"backend", c.backend},
              {"idm", idm_json(c.idm)},
              {"idm_per_class", per_class},
              {"idm_lookahead", c.idm_lookahead},
              {"comfort",
               {{"max_accel", c.comfort.max_accel},
                {"max_decel", c.comfort.max_decel},
                {"max_jerk", c.comfort.max_jerk},
                {"max_yaw_rate", c.comfort.max_yaw_rate}}},
              {"ttc", {{"threshold", c.ttc.threshold}, {"horizon", c.ttc.horizon}, {"substep", c.ttc.substep}}},
              {"stop_on_collision", c.stop_on_collision},
              {"training_mode_retrieval", c.training_mode_retrieval},
              {"resolution", {{"width", c.render_width}, {"height", c.render_height}}},
              {"waypoints", c.waypoints},
              {"waypoint_dt", c.waypoint_dt},
              {"toy",
               {{"steps", c.toy.steps},
                {"sigma", c.toy.sigma},
                {"reference_scale", c.toy.reference_scale},
                {"modulation_max", c.toy.modulation_max},
                {"blur_std", c.toy.blur_std},
                {"prev_weight", c.toy.prev_weight},
                {"attention_weight", c.toy.attention_weight},
                {"pe_dim", c.toy.pe_dim},
                {"pe_depth_bins", c.toy.pe_depth_bins},
                {"feature_gain", c.toy.feature_gain}}},
              {"remote", {{"endpoint", c.remote.endpoint}, {"timeout_ms", c.remote.timeout_ms}}}};
  return doc;
}

IdmTable make_idm_table(const SimConfig& cfg, const ClassTables& classes) {
  IdmTable table;
  table.fallback = cfg.idm;
  table.per_class.resize(classes.box.size());
  for (const auto& [name, p] : cfg.idm_per_class) {
    std::size_t idx = classes.box.size();
    for (std::size_t i = 0; i < classes.box.size(); ++i)
      if (classes.box[i] == name) idx = i;
    if (idx == classes.box.size()) throw ConfigError("idm_per_class names unknown box class '" + name + "'");
    table.per_class[idx] = p;
  }
  return table;
}

}  // namespace b2dr
