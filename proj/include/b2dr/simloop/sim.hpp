// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "b2dr/render/backend.hpp"
#include "b2dr/simloop/agents.hpp"
#include "b2dr/simloop/metrics.hpp"

namespace b2dr {

struct InstantMetrics {
  std::vector<std::pair<std::string, std::string>> collisions;
  int drivable = 1;
  bool ttc_violation = false;
  bool operator==(const InstantMetrics&) const = default;
};

struct StepRecord {
  long tick = 0;
  WorldState world;
  std::optional<RenderedFrame> frame;
  std::optional<Trajectory> trajectory;
  InstantMetrics metrics;
};

struct SimState {
  const ScenarioLog* log = nullptr;
  SimConfig cfg;
  IdmTable idm;
  WorldState world;
  std::mt19937_64 rng;
  /// Last rendered frame per camera at the render resolution.
  std::vector<std::optional<Image>> prev_images;
  std::optional<Trajectory> plan;
  EgoState plan_ego;
  long plan_tick = 0;
  long total_ticks = 0;
  int planner_calls = 0;
  int render_calls = 0;
  bool terminated = false;
  std::vector<std::string> events;
  std::shared_ptr<RenderBackend> backend;
  std::shared_ptr<ImageStore> images;

  /// Everything except the backend and image cache handles.
  bool same_as(const SimState& o) const;
};

/// Initial ego from the first recorded frames; velocity is the finite
/// difference of the first two coords along the recorded heading.
EgoState initial_ego(const ScenarioLog& log);

/// Throws ConfigError for an invalid config. `backend` overrides the one
/// named in the config when given.
SimState reset(const ScenarioLog& log, const SimConfig& cfg, std::shared_ptr<RenderBackend> backend = nullptr);

bool is_planner_tick(const SimState& state);

StepRecord step(SimState& state, const AgentContract& agent);

/// World at a recorded frame with the ego on its logged poses and the agents
/// rolled forward by IDM at the simulation rate.
WorldState log_replay_world(const ScenarioLog& log, std::size_t frame, const SimConfig& cfg);

using RecordSink = std::function<void(const StepRecord&)>;

struct RunResult {
  MetricsReport report;
  std::vector<StepRecord> records;
  int planner_calls = 0;
  int render_calls = 0;
};

/// Steps to termination and scores the run. Each record is passed to `sink`
/// as soon as it exists, so a failure mid-run leaves the partial log behind.
RunResult run(const ScenarioLog& log, const AgentContract& agent, const SimConfig& cfg,
              const RecordSink& sink = {}, std::shared_ptr<RenderBackend> backend = nullptr);

}  // namespace b2dr
