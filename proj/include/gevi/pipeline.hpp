#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevi/artifact.hpp"
#include "gevi/config.hpp"
#include "gevi/cpm.hpp"
#include "gevi/ingest.hpp"
#include "json.hpp"

namespace gevi {

inline constexpr const char* kSlotsSchema = "gevi.slots/1";

/// A pipeline stage failed; what() names the stage and the cause.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct IngestResult {
  std::size_t rows = 0;             // data rows in the message file
  std::size_t parsed_messages = 0;  // after multi-recipient expansion
  std::vector<ParseIssue> issues;
  std::vector<Message> messages;  // after actor filtering
  std::vector<TimeSlot> slots;
  std::vector<SlotGraph> graphs;
  std::vector<std::uint64_t> message_counts;  // filtered messages inside each slot window

  nlohmann::json counters() const;
};

/// Parse, filter (when `actors` is non-null), segment and build slot graphs.
/// The slot range defaults to the earliest/latest filtered message.
IngestResult ingest(std::istream& messages, const ActorSet* actors, const PipelineConfig& config);

/// ingest() reading config.messages_path and config.actors_path.
IngestResult ingest_files(const PipelineConfig& config);

/// Slot graphs document written by `gevi ingest` and read by `detect`.
nlohmann::json slots_to_json(const IngestResult& ingest);

struct SlotDocument {
  std::vector<SlotGraph> graphs;
  std::vector<std::uint64_t> message_counts;
  nlohmann::json counters = nlohmann::json::object();

  std::vector<TimeSlot> slots() const;
};

SlotDocument slots_from_json(const nlohmann::json& j);

/// Lines `slot_index,ordinal,member;member;...`. Throws
/// std::invalid_argument for members containing `,`, `;` or line breaks.
void write_groups(std::ostream& out, std::span<const Group> groups);

/// Inverse of write_groups; throws std::invalid_argument with the line
/// number on malformed lines.
std::vector<Group> read_groups(std::istream& in);

/// ingest -> detect -> evolve -> layout -> stats, without persisting.
/// Failures are rethrown as PipelineError.
EvolutionArtifact compute_artifact(const PipelineConfig& config);

/// compute_artifact, then writes the artifact atomically to
/// config.output_path (when non-empty).
EvolutionArtifact run_pipeline(const PipelineConfig& config);

}  // namespace gevi
