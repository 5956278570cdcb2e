// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>

#include "b2dr/behavior/idm.hpp"
#include "b2dr/behavior/lead.hpp"
#include "b2dr/render/backend.hpp"
#include "b2dr/scenario/types.hpp"

namespace b2dr {

struct ComfortLimits {
  double max_accel = 2.4;   // m/s^2
  double max_decel = 4.05;  // m/s^2, magnitude
  double max_jerk = 8.37;   // m/s^3
  double max_yaw_rate = 0.95;  // rad/s
  bool operator==(const ComfortLimits&) const = default;
};

struct TtcConfig {
  double threshold = 0.95;  // s
  double horizon = 1.0;     // s
  double substep = 0.1;     // s
  bool operator==(const TtcConfig&) const = default;
};

struct SimConfig {
  int world_hz = 10;
  int planner_hz = 2;
  /// Simulation length; defaults to the recorded log's duration.
  std::optional<double> horizon_s;
  std::uint64_t seed = 0;
  std::string backend = "oracle";
  IdmParams idm;
  /// Per box-class overrides keyed by class name.
  std::map<std::string, IdmParams> idm_per_class;
  double idm_lookahead = kDefaultLookahead;
  ComfortLimits comfort;
  TtcConfig ttc;
  bool stop_on_collision = true;
  bool training_mode_retrieval = false;
  int render_width = kDefaultRenderWidth;
  int render_height = kDefaultRenderHeight;
  int waypoints = 6;
  double waypoint_dt = 0.5;
  ToyConfig toy;
  RemoteConfig remote;

  /// Throws ConfigError for rates that do not divide, non-positive horizon
  /// and other unusable values.
  void check() const;
  int ticks_per_plan() const { return world_hz / planner_hz; }
  double dt() const { return 1.0 / world_hz; }
};

/// Overrides defaults with the fields present in `doc`. Unknown fields are
/// rejected with ConfigError.
SimConfig parse_sim_config(const nlohmann::json& doc, SimConfig base = {});
SimConfig load_sim_config(const std::string& path, SimConfig base = {});
nlohmann::json sim_config_to_json(const SimConfig& cfg);

IdmTable make_idm_table(const SimConfig& cfg, const ClassTables& classes);

}  // namespace b2dr
