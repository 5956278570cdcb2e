// SPDX-License-Identifier: Apache-2.0
#include "b2dr/simloop/sim.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "b2dr/behavior/ego_tracker.hpp"
#include "b2dr/behavior/step.hpp"
#include "b2dr/common/error.hpp"
#include "b2dr/render/resample.hpp"
#include "b2dr/retrieval/retrieval.hpp"

namespace b2dr {

bool SimState::same_as(const SimState& o) const {
  return log == o.log && sim_config_to_json(cfg) == sim_config_to_json(o.cfg) && world == o.world && rng == o.rng &&
         prev_images == o.prev_images && plan == o.plan && plan_ego == o.plan_ego && plan_tick == o.plan_tick &&
         total_ticks == o.total_ticks && planner_calls == o.planner_calls && render_calls == o.render_calls &&
         terminated == o.terminated && events == o.events;
}

EgoState initial_ego(const ScenarioLog& log) {
  if (log.frames.size() < 2) throw InvariantError("scenario needs at least 2 frames");
  const RecordedFrame& f0 = log.frames[0];
  const RecordedFrame& f1 = log.frames[1];
  EgoState ego;
  ego.position = f0.coord;
  ego.heading = f0.heading;
  ego.time = f0.time;
  const double dt = f1.time - f0.time;
  if (dt > 0.0) ego.velocity = (f1.coord - f0.coord).dot(Vec2(std::cos(f0.heading), std::sin(f0.heading))) / dt;
  return ego;
}

SimState reset(const ScenarioLog& log, const SimConfig& cfg, std::shared_ptr<RenderBackend> backend) {
  cfg.check();
  SimState s;
  s.log = &log;
  s.cfg = cfg;
  s.idm = make_idm_table(cfg, log.classes);
  s.world.ego = initial_ego(log);
  s.world.ego_dims = log.ego_dims;
  s.world.agents = log.initial_agents;
  s.world.map = &log.map;
  s.world.tick = 0;
  s.rng.seed(cfg.seed);

  const double horizon = cfg.horizon_s ? *cfg.horizon_s : log.frames.back().time - log.frames.front().time;
  if (!(horizon > 0.0)) throw ConfigError("simulation horizon must be > 0");
  s.total_ticks = std::max<long>(1, std::lround(horizon * cfg.world_hz));

  s.images = std::make_shared<ImageStore>(log.base_dir);
  for (const auto& ref : log.frames.front().image_refs) {
    const Image& img = s.images->get(ref);
    s.prev_images.emplace_back(resample_bilinear(img, cfg.render_width, cfg.render_height));
  }
  if (backend) {
    s.backend = std::move(backend);
  } else {
    BackendOptions opts;
    opts.toy = cfg.toy;
    opts.remote = cfg.remote;
    s.backend = make_backend(cfg.backend, log.rig, opts, cfg.render_width, cfg.render_height);
  }
  return s;
}

bool is_planner_tick(const SimState& state) { return state.world.tick % state.cfg.ticks_per_plan() == 0; }

StepRecord step(SimState& st, const AgentContract& agent) {
  if (st.terminated) throw InvariantError("step called on a terminated simulation");
  const ScenarioLog& log = *st.log;
  StepRecord rec;
  rec.tick = st.world.tick;
  rec.world = st.world;
  rec.metrics.collisions = collision_check(st.world);
  rec.metrics.drivable = drivable_compliance(st.world, log.classes);
  rec.metrics.ttc_violation = ttc_violation(st.world, st.cfg.ttc);

  if (st.world.tick >= st.total_ticks) {
    st.terminated = true;
    return rec;
  }
  if (!rec.metrics.collisions.empty() && st.cfg.stop_on_collision) {
    st.events.push_back("tick " + std::to_string(rec.tick) + ": run stopped on collision");
    st.terminated = true;
    return rec;
  }

  if (is_planner_tick(st)) {
    const RetrievedPair pair = st.cfg.training_mode_retrieval ? hierarchical_sample(log, st.world.ego, st.rng).pair
                                                              : nearest_pair(log, st.world.ego);
    const std::uint64_t seed = st.rng();
    const RenderRequest req = build_render_request(log, st.world, pair, st.prev_images, std::nullopt, seed, *st.images,
                                                   st.cfg.render_width, st.cfg.render_height);
    rec.frame = render_frame(*st.backend, req);
    ++st.render_calls;
    st.prev_images.assign(rec.frame->render_images.begin(), rec.frame->render_images.end());

    AgentInput in;
    in.frame = &*rec.frame;
    in.ego = st.world.ego;
    in.route = &log.ego_route;
    in.goal = log.goal;
    in.world = &st.world;
    in.log = &log;
    Trajectory traj = agent(in);
    check_trajectory(traj);
    ++st.planner_calls;
    st.plan = traj;
    st.plan_ego = st.world.ego;
    st.plan_tick = st.world.tick;
    rec.trajectory = std::move(traj);
    spdlog::debug("tick {}: planned {} waypoints", rec.tick, rec.trajectory->waypoints.size());
  }

  if (!st.plan) throw InvariantError("no plan available at tick " + std::to_string(rec.tick));
  const double tau = static_cast<double>(st.world.tick + 1 - st.plan_tick) / st.cfg.world_hz;
  EgoState next_ego;
  try {
    next_ego = track_ego_trajectory(*st.plan, st.plan_ego, tau, st.world.ego);
  } catch (const StalePlanError& e) {
    st.events.push_back("tick " + std::to_string(rec.tick) + ": " + e.what());
    spdlog::warn("tick {}: {}", rec.tick, e.what());
    st.terminated = true;
    return rec;
  }
  WorldState next = step_agents(st.world, st.cfg.dt(), st.idm, st.cfg.idm_lookahead);
  next.ego = next_ego;
  st.world = std::move(next);
  return rec;
}

WorldState log_replay_world(const ScenarioLog& log, std::size_t frame, const SimConfig& cfg) {
  if (frame >= log.frames.size()) throw ConfigError("frame index out of range");
  cfg.check();
  const IdmTable idm = make_idm_table(cfg, log.classes);
  WorldState w;
  w.ego = initial_ego(log);
  w.ego_dims = log.ego_dims;
  w.agents = log.initial_agents;
  w.map = &log.map;
  const double t0 = log.frames.front().time;
  const long ticks = std::lround((log.frames[frame].time - t0) * cfg.world_hz);
  for (long k = 1; k <= ticks; ++k) {
    WorldState next = step_agents(w, cfg.dt(), idm, cfg.idm_lookahead);
    const double t = t0 + static_cast<double>(k) / cfg.world_hz;
    const Pose2 pose = log_pose_at(log, t);
    EgoState ego = w.ego;
    const Vec2 fwd(std::cos(pose.heading), std::sin(pose.heading));
    const double v = (pose.position - w.ego.position).dot(fwd) * cfg.world_hz;
    ego.acceleration = (v - ego.velocity) * cfg.world_hz;
    ego.velocity = v;
    ego.position = pose.position;
    ego.heading = pose.heading;
    ego.time = t;
    next.ego = ego;
    w = std::move(next);
  }
  return w;
}

RunResult run(const ScenarioLog& log, const AgentContract& agent, const SimConfig& cfg, const RecordSink& sink,
              std::shared_ptr<RenderBackend> backend) {
  SimState st = reset(log, cfg, std::move(backend));
  RunResult result;
  while (!st.terminated) {
    StepRecord rec = step(st, agent);
    if (sink) sink(rec);
    result.records.push_back(std::move(rec));
  }
  std::vector<WorldState> history;
  history.reserve(result.records.size());
  for (const auto& r : result.records) history.push_back(r.world);
  result.report = compute_metrics(history, log, cfg, st.events);
  result.planner_calls = st.planner_calls;
  result.render_calls = st.render_calls;
  return result;
}

}  // namespace b2dr
