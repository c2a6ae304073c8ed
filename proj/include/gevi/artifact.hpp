#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gevi/analytics.hpp"
#include "gevi/evolution.hpp"
#include "gevi/layout.hpp"
#include "json.hpp"

namespace gevi {

inline constexpr const char* kArtifactSchema = "gevi.artifact/1";

/// Everything the viewer needs: groups, transitions, hierarchies, per-slot
/// series and (after the layout stage) positioned hierarchy drawings.
struct EvolutionArtifact {
  nlohmann::json config = nlohmann::json::object();  // config echo
  nlohmann::json ingest = nlohmann::json::object();  // input counters
  std::string generated_at;                          // excluded from determinism checks
  std::vector<TimeSlot> slots;
  std::vector<SlotStats> series;  // one entry per slot
  EvolutionGraph graph;
  EvolutionParams params;
  std::vector<Hierarchy> hierarchies;
  std::vector<int> lifespans;  // per group, aligned with graph.groups()
  std::vector<PositionedGraph> layouts;  // per hierarchy id; empty before layout

  bool is_stable(std::size_t group_index) const { return lifespans[group_index] >= params.min_lifespan; }
  /// Hierarchy id for every group, aligned with graph.groups().
  std::vector<int> hierarchy_of_groups() const;
};

/// Links groups, classifies events, finds hierarchies and fills the slot
/// series. `message_counts` is per slot index.
EvolutionArtifact build_artifact(std::vector<Group> groups, std::vector<TimeSlot> slots,
                                 std::vector<std::uint64_t> message_counts, const EvolutionParams& params);

/// Lays out every hierarchy (replacing previous layouts).
void apply_layout(EvolutionArtifact& artifact, const LayoutMetrics& metrics = {}, int sweeps = 4);

nlohmann::json to_json(const EvolutionArtifact& artifact);

/// Throws std::invalid_argument when the document is not a valid artifact.
EvolutionArtifact artifact_from_json(const nlohmann::json& j);

EvolutionArtifact load_artifact(const std::string& path);

/// Serialised artifact without the generation timestamp; identical inputs
/// and configuration give identical bytes.
std::string canonical_dump(const EvolutionArtifact& artifact);

/// Writes to `<path>.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

/// `slot,group_count,message_count,stability_mean,stability_std`, absent
/// stability left empty.
std::string series_csv(const EvolutionArtifact& artifact);

/// Human-readable block: group sizes, slots with groups, overlap figures,
/// hierarchy and event counts.
std::string summary_text(const EvolutionArtifact& artifact);

nlohmann::json summary_json(const EvolutionArtifact& artifact);

/// SVG line chart of group and message counts per slot.
std::string counts_chart_svg(const EvolutionArtifact& artifact);

/// SVG chart of mean stability with a ±std band per slot.
std::string stability_chart_svg(const EvolutionArtifact& artifact);

}  // namespace gevi
