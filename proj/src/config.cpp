#include "gevi/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "gevi/time.hpp"

namespace gevi {

void PipelineConfig::validate() const {
  if (window_days <= 0) throw std::invalid_argument("window_days must be positive");
  if (step_days <= 0) throw std::invalid_argument("step_days must be positive");
  if (step_days > window_days) throw std::invalid_argument("step_days must not exceed window_days");
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (sweeps < 0) throw std::invalid_argument("sweeps must not be negative");
  if (range_start) parse_instant(*range_start);
  if (range_end) parse_instant(*range_end);
  evolution.validate();
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known{"messages", "actors", "window_days", "step_days", "range_start",
                                           "range_end", "k", "th", "sh", "min_lifespan", "sweeps",
                                           "output", "listen"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  try {
    if (j.contains("messages")) base.messages_path = j.at("messages").get<std::string>();
    if (j.contains("actors")) base.actors_path = j.at("actors").get<std::string>();
    if (j.contains("window_days")) base.window_days = j.at("window_days").get<int>();
    if (j.contains("step_days")) base.step_days = j.at("step_days").get<int>();
    if (j.contains("range_start")) base.range_start = j.at("range_start").get<std::string>();
    if (j.contains("range_end")) base.range_end = j.at("range_end").get<std::string>();
    if (j.contains("k")) base.k = j.at("k").get<int>();
    if (j.contains("th")) base.evolution.th = j.at("th").get<double>();
    if (j.contains("sh")) base.evolution.sh = j.at("sh").get<double>();
    if (j.contains("min_lifespan")) base.evolution.min_lifespan = j.at("min_lifespan").get<int>();
    if (j.contains("sweeps")) base.sweeps = j.at("sweeps").get<int>();
    if (j.contains("output")) base.output_path = j.at("output").get<std::string>();
    if (j.contains("listen")) base.listen = j.at("listen").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return base;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json config_echo(const PipelineConfig& c) {
  nlohmann::json j;
  j["window_days"] = c.window_days;
  j["step_days"] = c.step_days;
  j["range_start"] = c.range_start ? nlohmann::json(*c.range_start) : nlohmann::json(nullptr);
  j["range_end"] = c.range_end ? nlohmann::json(*c.range_end) : nlohmann::json(nullptr);
  j["k"] = c.k;
  j["th"] = c.evolution.th;
  j["sh"] = c.evolution.sh;
  j["min_lifespan"] = c.evolution.min_lifespan;
  j["sweeps"] = c.sweeps;
  return j;
}

}  // namespace gevi
