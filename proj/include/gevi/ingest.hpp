#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "gevi/time.hpp"

namespace gevi {

using ActorId = std::string;
using ActorSet = std::unordered_set<ActorId>;

/// One directed interaction. Self-messages are kept here and dropped when
/// slot graphs are built.
struct Message {
  ActorId sender;
  ActorId recipient;
  Instant timestamp;

  bool operator==(const Message&) const = default;
};

struct ParseIssue {
  std::size_t line = 0;  // 1-based line number in the source stream
  std::string reason;
};

struct ParsedMessages {
  std::vector<Message> messages;
  std::vector<ParseIssue> issues;
  std::size_t rows = 0;  // data rows seen, including malformed ones
};

/// Reads `sender,recipient,timestamp` rows. A leading header row is
/// skipped. A recipient field holding several identifiers separated by `;`
/// expands into one message per recipient. Malformed rows are recorded in
/// `issues` and skipped; an unreadable stream throws std::runtime_error.
ParsedMessages parse_messages(std::istream& in);

/// One identifier per line; blank lines and `#` comments ignored. A first
/// line reading `actor` or `id` is treated as a header.
ActorSet parse_actors(std::istream& in);

/// Keeps messages whose sender and recipient are both in `allowed`.
/// Throws std::invalid_argument when `allowed` is empty.
std::vector<Message> filter_actors(std::span<const Message> messages, const ActorSet& allowed);

struct TimeSlot {
  int index = 0;
  Instant start;
  Instant end;  // exclusive

  bool contains(Instant t) const { return start <= t && t < end; }
  bool operator==(const TimeSlot&) const = default;
};

/// Slots start at range_start + i*step for every start <= range_end; each
/// lasts `window`, so the last one may extend past range_end.
/// Throws std::invalid_argument unless 0 < step <= window and start <= end.
std::vector<TimeSlot> segment_slots(Instant range_start, Instant range_end, Duration window,
                                    Duration step);

struct SlotEdge {
  std::uint32_t u = 0;  // indices into SlotGraph::vertices, u < v
  std::uint32_t v = 0;
  std::uint32_t weight = 0;

  bool operator==(const SlotEdge&) const = default;
};

/// Undirected interaction graph of one slot. Vertices are sorted, edges are
/// sorted by (u, v) and carry the message count in both directions.
struct SlotGraph {
  TimeSlot slot;
  std::vector<ActorId> vertices;
  std::vector<SlotEdge> edges;

  std::uint64_t total_weight() const;
  std::optional<std::uint32_t> vertex_index(const ActorId& actor) const;
};

SlotGraph build_slot_graph(std::span<const Message> messages, const TimeSlot& slot);

/// build_slot_graph for every slot, computed concurrently.
std::vector<SlotGraph> build_slot_graphs(std::span<const Message> messages,
                                         std::span<const TimeSlot> slots);

}  // namespace gevi
