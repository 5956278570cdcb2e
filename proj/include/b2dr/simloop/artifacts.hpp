// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <json.hpp>
#include <string>

#include "b2dr/simloop/sim.hpp"

namespace b2dr {

nlohmann::json metrics_to_json(const MetricsReport& report, const RunResult* run = nullptr);
MetricsReport metrics_from_json(const nlohmann::json& doc);

/// One steps.jsonl line; frame images are referenced by relative path.
nlohmann::json step_record_to_json(const StepRecord& rec, const ClassTables& classes);
/// World state of a steps.jsonl line, with `map` attached.
WorldState world_from_step_json(const nlohmann::json& line, const std::vector<MapElement>* map);

std::string frame_image_name(const std::string& camera, long tick);

/// Streams steps.jsonl and frame PNGs into an output directory (created if absent).
class ArtifactWriter {
 public:
  ArtifactWriter(const std::string& out_dir, const ScenarioLog& log);
  void write(const StepRecord& rec);
  void finish(const RunResult& result);
  const std::string& out_dir() const { return out_dir_; }

 private:
  std::string out_dir_;
  const ScenarioLog* log_;
  std::ofstream steps_;
};

/// Deterministic text form: two-space indentation and a trailing newline.
void write_json_file(const nlohmann::json& doc, const std::string& path);

}  // namespace b2dr
