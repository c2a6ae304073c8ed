#pragma once

#include <optional>
#include <string>

#include "gevi/evolution.hpp"
#include "gevi/layout.hpp"
#include "json.hpp"

namespace gevi {

struct PipelineConfig {
  std::string messages_path;
  std::string actors_path;  // empty: no actor filtering
  int window_days = 30;
  int step_days = 15;
  std::optional<std::string> range_start;  // ISO-8601; default: earliest message
  std::optional<std::string> range_end;    // default: latest message
  int k = 3;
  EvolutionParams evolution;
  int sweeps = 4;
  LayoutMetrics metrics;
  std::string output_path = "artifact.json";
  std::string listen = "127.0.0.1:8080";

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

/// Keys: messages, actors, window_days, step_days, range_start, range_end, k,
/// th, sh, min_lifespan, sweeps, output, listen. Unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path);

/// Everything that influences the computed artifact (input paths and the
/// listen address are excluded).
nlohmann::json config_echo(const PipelineConfig& config);

}  // namespace gevi
