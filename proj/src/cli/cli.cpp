// SPDX-License-Identifier: Apache-2.0
#include "b2dr/cli/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "b2dr/common/error.hpp"
#include "b2dr/common/log.hpp"
#include "b2dr/render/image_io.hpp"
#include "b2dr/render/resample.hpp"
#include "b2dr/render/transport.hpp"
#include "b2dr/scenario/scenario_io.hpp"
#include "b2dr/scenario/validate.hpp"
#include "b2dr/simloop/artifacts.hpp"

namespace b2dr {

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string scenario;
  std::string agent = "log-replay";
  std::string backend;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
};

struct RenderArgs {
  std::string scenario;
  long tick = 0;
  std::string backend = "oracle";
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
};

struct MetricsArgs {
  std::string steps;
  std::string scenario;
  std::string config;
};

struct ServeArgs {
  std::string renderer_listen = "127.0.0.1:7701";
  std::string sim_listen = "127.0.0.1:7700";
  int timeout_ms = -1;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw ParseError(std::string(what) + " file not found: '" + path + "'");
}

SimConfig config_for(const std::string& path) {
  if (path.empty()) return SimConfig{};
  require_file(path, "config");
  return load_sim_config(path);
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  require_file(a.scenario, "scenario");
  const ScenarioLog log = load_scenario(a.scenario);
  SimConfig cfg = config_for(a.config);
  cfg.seed = a.seed;
  if (!a.backend.empty()) cfg.backend = a.backend;
  cfg.check();
  AgentOptions opts;
  opts.waypoints = cfg.waypoints;
  opts.waypoint_dt = cfg.waypoint_dt;
  opts.idm = cfg.idm;
  opts.lookahead = cfg.idm_lookahead;
  const AgentContract agent = make_builtin_agent(a.agent, opts);

  ArtifactWriter writer(a.out, log);
  const RunResult result = run(log, agent, cfg, [&](const StepRecord& rec) { writer.write(rec); });
  writer.finish(result);
  std::ostringstream line;
  line << kScoreName << " composite " << std::setprecision(6) << std::fixed << result.report.composite;
  out << line.str() << '\n';
  return kExitOk;
}

int cmd_validate(const std::string& scenario, std::ostream& out) {
  require_file(scenario, "scenario");
  const ScenarioLog log = parse_scenario_file(scenario);
  const auto violations = validate_scenario(log);
  for (const auto& v : violations) out << v.to_string() << '\n';
  return violations.empty() ? kExitOk : kExitInputError;
}

int cmd_render(const RenderArgs& a, std::ostream& out) {
  require_file(a.scenario, "scenario");
  const ScenarioLog log = load_scenario(a.scenario);
  if (a.tick < 0 || static_cast<std::size_t>(a.tick) >= log.frames.size())
    throw ConfigError("tick " + std::to_string(a.tick) + " out of range: scenario has " +
                      std::to_string(log.frames.size()) + " frames");
  SimConfig cfg = config_for(a.config);
  cfg.seed = a.seed;
  cfg.backend = a.backend;
  cfg.check();
  const auto frame = static_cast<std::size_t>(a.tick);
  const WorldState world = log_replay_world(log, frame, cfg);

  ImageStore images(log.base_dir);
  std::vector<std::optional<Image>> prev;
  const RecordedFrame& prev_frame = log.frames[frame == 0 ? 0 : frame - 1];
  for (const auto& ref : prev_frame.image_refs)
    prev.emplace_back(resample_bilinear(images.get(ref), cfg.render_width, cfg.render_height));
  const RenderRequest req = build_render_request(log, world, nearest_pair(log, world.ego), std::move(prev),
                                                 std::nullopt, cfg.seed, images, cfg.render_width, cfg.render_height);
  BackendOptions opts;
  opts.toy = cfg.toy;
  opts.remote = cfg.remote;
  const auto backend = make_backend(cfg.backend, log.rig, opts, cfg.render_width, cfg.render_height);
  const RenderedFrame rendered = render_frame(*backend, req);

  fs::create_directories(a.out);
  for (std::size_t c = 0; c < log.rig.cameras.size(); ++c) {
    const std::string& name = log.rig.cameras[c].name;
    const fs::path img = fs::path(a.out) / ("cam_" + name + ".png");
    const fs::path mask = fs::path(a.out) / ("masks_" + name + ".png");
    write_png(rendered.images[c], img.string());
    write_mask_pages(req.masks[c], mask.string());
    out << img.string() << ' ' << std::hex << std::setw(16) << std::setfill('0')
        << image_checksum(rendered.images[c]) << std::dec << '\n';
  }
  return kExitOk;
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  require_file(a.steps, "steps");
  require_file(a.scenario, "scenario");
  const ScenarioLog log = load_scenario(a.scenario);
  const SimConfig cfg = config_for(a.config);
  std::ifstream in(a.steps);
  std::vector<WorldState> history;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw ParseError("steps line " + std::to_string(line_no) + ": invalid JSON");
    try {
      history.push_back(world_from_step_json(doc, &log.map));
    } catch (const ParseError& e) {
      throw ParseError("steps line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  const MetricsReport report = compute_metrics(history, log, cfg);
  out << metrics_to_json(report).dump(2) << '\n';
  return kExitOk;
}

int cmd_bridge_serve(const ServeArgs& a, std::ostream& out) {
  const auto [rhost, rport] = parse_host_port(a.renderer_listen);
  const auto [shost, sport] = parse_host_port(a.sim_listen);
  TcpListener renderer_listener(rhost, rport);
  TcpListener sim_listener(shost, sport);
  out << "renderer " << rhost << ':' << renderer_listener.port() << " simulator " << shost << ':'
      << sim_listener.port() << std::endl;
  auto renderer = renderer_listener.accept(a.timeout_ms);
  spdlog::info("renderer attached");
  auto sim = sim_listener.accept(a.timeout_ms);
  spdlog::info("simulator attached");
  relay_bytes(*sim, *renderer);
  spdlog::info("bridge session closed");
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging_from_env();
  CLI::App app{"Closed-loop generative driving simulation"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a closed-loop simulation and write artifacts");
  run_cmd->add_option("--scenario", run_args.scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--agent", run_args.agent, "log-replay | constant-velocity | idm-lane");
  run_cmd->add_option("--backend", run_args.backend, "oracle | toy | remote (default from config, else oracle)");
  run_cmd->add_option("--config", run_args.config, "Simulation config JSON");
  run_cmd->add_option("--seed", run_args.seed, "Random seed (default 0)");
  run_cmd->add_option("--out", run_args.out, "Output directory")->required();

  std::string validate_scenario_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and print violations");
  validate_cmd->add_option("--scenario", validate_scenario_path, "Scenario JSON file")->required();

  RenderArgs render_args;
  auto* render_cmd = app.add_subcommand("render", "Render one recorded tick");
  render_cmd->add_option("--scenario", render_args.scenario, "Scenario JSON file")->required();
  render_cmd->add_option("--tick", render_args.tick, "Recorded frame index")->required();
  render_cmd->add_option("--backend", render_args.backend, "oracle | toy | remote");
  render_cmd->add_option("--config", render_args.config, "Simulation config JSON");
  render_cmd->add_option("--seed", render_args.seed, "Random seed (default 0)");
  render_cmd->add_option("--out", render_args.out, "Output directory")->required();

  MetricsArgs metrics_args;
  auto* metrics_cmd = app.add_subcommand("metrics", "Recompute the report from steps.jsonl");
  metrics_cmd->add_option("--steps", metrics_args.steps, "steps.jsonl from a run")->required();
  metrics_cmd->add_option("--scenario", metrics_args.scenario, "Scenario JSON file")->required();
  metrics_cmd->add_option("--config", metrics_args.config, "Simulation config JSON");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("bridge-serve", "Relay one bridge session between a renderer and the simulator");
  serve_cmd->add_option("--renderer-listen", serve_args.renderer_listen, "host:port the renderer connects to");
  serve_cmd->add_option("--sim-listen", serve_args.sim_listen, "host:port the simulator connects to");
  serve_cmd->add_option("--timeout-ms", serve_args.timeout_ms, "Accept timeout (negative waits forever)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, out);
    if (*validate_cmd) return cmd_validate(validate_scenario_path, out);
    if (*render_cmd) return cmd_render(render_args, out);
    if (*metrics_cmd) return cmd_metrics(metrics_args, out);
    if (*serve_cmd) return cmd_bridge_serve(serve_args, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InvariantError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitInputError;
}

}  // namespace b2dr
