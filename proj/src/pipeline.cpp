#include "gevi/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace gevi {

using nlohmann::json;

json IngestResult::counters() const {
  return {{"rows", rows},
          {"parsed_messages", parsed_messages},
          {"malformed_rows", issues.size()},
          {"filtered_messages", messages.size()}};
}

IngestResult ingest(std::istream& in, const ActorSet* actors, const PipelineConfig& config) {
  config.validate();
  IngestResult r;
  auto parsed = parse_messages(in);
  r.rows = parsed.rows;
  r.parsed_messages = parsed.messages.size();
  r.issues = std::move(parsed.issues);
  r.messages = actors ? filter_actors(parsed.messages, *actors) : std::move(parsed.messages);

  Instant start, end;
  if (config.range_start) {
    start = parse_instant(*config.range_start);
  } else if (!r.messages.empty()) {
    start = std::min_element(r.messages.begin(), r.messages.end(), [](const auto& a, const auto& b) {
              return a.timestamp < b.timestamp;
            })->timestamp;
  } else {
    throw std::invalid_argument("no messages to derive range_start from");
  }
  if (config.range_end) {
    end = parse_instant(*config.range_end);
  } else if (!r.messages.empty()) {
    end = std::max_element(r.messages.begin(), r.messages.end(), [](const auto& a, const auto& b) {
            return a.timestamp < b.timestamp;
          })->timestamp;
  } else {
    throw std::invalid_argument("no messages to derive range_end from");
  }

  r.slots = segment_slots(start, end, days(config.window_days), days(config.step_days));
  r.graphs = build_slot_graphs(r.messages, r.slots);
  const auto series = counts_per_slot({}, r.messages, r.slots);
  r.message_counts.reserve(series.size());
  for (const auto& s : series) r.message_counts.push_back(s.message_count);
  return r;
}

IngestResult ingest_files(const PipelineConfig& config) {
  if (config.messages_path.empty()) throw std::invalid_argument("no message file configured");
  std::ifstream messages(config.messages_path);
  if (!messages) throw std::runtime_error("cannot open message file " + config.messages_path);
  if (config.actors_path.empty()) return ingest(messages, nullptr, config);
  std::ifstream actors_in(config.actors_path);
  if (!actors_in) throw std::runtime_error("cannot open actor file " + config.actors_path);
  const auto actors = parse_actors(actors_in);
  return ingest(messages, &actors, config);
}

json slots_to_json(const IngestResult& r) {
  json slots = json::array();
  for (std::size_t i = 0; i < r.graphs.size(); ++i) {
    const auto& g = r.graphs[i];
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({g.vertices[e.u], g.vertices[e.v], e.weight});
    slots.push_back({{"index", g.slot.index},
                     {"start", format_instant(g.slot.start)},
                     {"end", format_instant(g.slot.end)},
                     {"message_count", r.message_counts.at(i)},
                     {"edges", edges}});
  }
  return {{"schema", kSlotsSchema}, {"ingest", r.counters()}, {"slots", slots}};
}

std::vector<TimeSlot> SlotDocument::slots() const {
  std::vector<TimeSlot> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(g.slot);
  return out;
}

SlotDocument slots_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kSlotsSchema) {
    throw std::invalid_argument(std::string("slots document: expected schema ") + kSlotsSchema);
  }
  SlotDocument doc;
  doc.counters = j.value("ingest", json::object());
  try {
    for (const auto& s : j.at("slots")) {
      // rebuild through messages so vertex/edge ordering matches build_slot_graph
      TimeSlot slot{s.at("index").get<int>(), parse_instant(s.at("start").get<std::string>()),
                    parse_instant(s.at("end").get<std::string>())};
      if (slot.index != static_cast<int>(doc.graphs.size())) {
        throw std::invalid_argument("slot indices must be 0..n-1");
      }
      std::vector<Message> messages;
      for (const auto& e : s.at("edges")) {
        const auto a = e.at(0).get<std::string>();
        const auto b = e.at(1).get<std::string>();
        const auto w = e.at(2).get<std::uint32_t>();
        if (a == b || w == 0) throw std::invalid_argument("edge " + a + "-" + b + " is a self-loop or has weight 0");
        for (std::uint32_t n = 0; n < w; ++n) messages.push_back({a, b, slot.start});
      }
      doc.graphs.push_back(build_slot_graph(messages, slot));
      doc.message_counts.push_back(s.at("message_count").get<std::uint64_t>());
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("slots document: ") + e.what());
  }
  return doc;
}

void write_groups(std::ostream& out, std::span<const Group> groups) {
  for (const auto& g : groups) {
    out << g.label.slot << ',' << g.label.ordinal << ',';
    for (std::size_t i = 0; i < g.members.size(); ++i) {
      const auto& m = g.members[i];
      if (m.find_first_of(",;\r\n") != std::string::npos) {
        throw std::invalid_argument("member '" + m + "' cannot be written to a groups file");
      }
      if (i) out << ';';
      out << m;
    }
    out << '\n';
  }
}

std::vector<Group> read_groups(std::istream& in) {
  std::vector<Group> groups;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    const auto label = c2 == std::string::npos
                           ? std::nullopt
                           : GroupLabel::parse(line.substr(0, c1) + "_" + line.substr(c1 + 1, c2 - c1 - 1));
    if (!label) throw std::invalid_argument("groups file line " + std::to_string(line_no) + ": malformed");
    Group g{*label, {}};
    std::stringstream members(line.substr(c2 + 1));
    std::string m;
    while (std::getline(members, m, ';')) {
      if (!m.empty()) g.members.push_back(m);
    }
    if (g.members.empty()) {
      throw std::invalid_argument("groups file line " + std::to_string(line_no) + ": no members");
    }
    std::sort(g.members.begin(), g.members.end());
    g.members.erase(std::unique(g.members.begin(), g.members.end()), g.members.end());
    groups.push_back(std::move(g));
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading groups");
  return groups;
}

namespace {

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

std::string now_utc() {
  return format_instant(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

}  // namespace

EvolutionArtifact compute_artifact(const PipelineConfig& config) {
  run_stage("config", [&] {
    config.validate();
    return 0;
  });
  auto ingested = run_stage("ingest", [&] { return ingest_files(config); });
  auto groups = run_stage("detect", [&] { return extract_groups(ingested.graphs, config.k); });
  auto artifact = run_stage("evolve", [&] {
    return build_artifact(std::move(groups), ingested.slots, ingested.message_counts, config.evolution);
  });
  run_stage("layout", [&] {
    apply_layout(artifact, config.metrics, config.sweeps);
    return 0;
  });
  run_stage("stats", [&] {
    artifact.config = config_echo(config);
    artifact.ingest = ingested.counters();
    artifact.generated_at = now_utc();
    return 0;
  });
  return artifact;
}

EvolutionArtifact run_pipeline(const PipelineConfig& config) {
  auto artifact = compute_artifact(config);
  if (!config.output_path.empty()) {
    run_stage("persist", [&] {
      write_file_atomic(config.output_path, to_json(artifact).dump(1));
      return 0;
    });
  }
  return artifact;
}

}  // namespace gevi
