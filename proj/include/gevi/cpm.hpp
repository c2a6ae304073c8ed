#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gevi/ingest.hpp"

namespace gevi {

/// Sorted, duplicate-free list of actors.
using MemberSet = std::vector<ActorId>;

/// `slot_ordinal`, e.g. `92_1`.
struct GroupLabel {
  int slot = 0;
  int ordinal = 0;

  std::string str() const;
  /// Accepts surrounding whitespace; returns nullopt for anything else that
  /// is not `<non-negative int>_<non-negative int>`.
  static std::optional<GroupLabel> parse(std::string_view text);

  auto operator<=>(const GroupLabel&) const = default;
};

struct Group {
  GroupLabel label;
  MemberSet members;

  int slot() const { return label.slot; }
  std::size_t size() const { return members.size(); }
};

/// A k-clique as sorted vertex indices into SlotGraph::vertices.
using Clique = std::vector<std::uint32_t>;

/// All complete subgraphs on exactly k vertices, each sorted ascending, in
/// lexicographic order. Throws std::invalid_argument when k < 3.
std::vector<Clique> enumerate_k_cliques(const SlotGraph& graph, int k);

/// Unions of k-cliques over connected components of the relation "shares
/// k-1 vertices". Communities are returned as sorted vertex-index lists,
/// ordered by descending size then lexicographically.
std::vector<std::vector<std::uint32_t>> percolate(std::span<const Clique> cliques, int k);

/// CPM communities of one slot graph as Groups labelled `slot_ordinal` in
/// percolate order.
std::vector<Group> detect_groups(const SlotGraph& graph, int k);

/// detect_groups over every slot, run concurrently; result is ordered by
/// slot then ordinal.
std::vector<Group> extract_groups(std::span<const SlotGraph> slot_graphs, int k);

}  // namespace gevi
