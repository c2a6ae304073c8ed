#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gevi/cpm.hpp"

namespace gevi {

struct EvolutionParams {
  double th = 0.5;       // minimum modified Jaccard for a transition, in (0, 1]
  double sh = 10.0;      // size ratio at which an edge becomes addition/deletion, > 1
  int min_lifespan = 3;  // slots a transition path must span for its groups to count as stable

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

enum class EventKind {
  birth,
  death,
  continuation,
  growth,
  decay,
  split,
  merge,
  split_merge,
  addition,
  deletion,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// |A ∩ B| for sorted member sets.
std::size_t intersection_size(const MemberSet& a, const MemberSet& b);

/// 0 when either set is empty, else max(|A∩B|/|A|, |A∩B|/|B|).
double modified_jaccard(const MemberSet& a, const MemberSet& b);

/// max(|A|/|B|, |B|/|A|). Throws std::invalid_argument if either set is empty.
double size_ratio(const MemberSet& a, const MemberSet& b);

/// Plain Jaccard |A∩B| / |A∪B|. Throws std::invalid_argument if either set
/// is empty.
double stability(const MemberSet& a, const MemberSet& b);

struct Transition {
  GroupLabel src;
  GroupLabel dst;
  double mj = 0.0;
  double stability = 0.0;
  double size_ratio = 1.0;
  std::size_t flow = 0;  // |src ∩ dst|
  EventKind kind = EventKind::continuation;

  /// Addition and deletion edges are drawn dashed.
  bool dashed() const { return kind == EventKind::addition || kind == EventKind::deletion; }
};

/// Every pair (g in current, h in next) with modified_jaccard >= th, ordered
/// by (src, dst). Kinds are left as continuation until classify_events.
std::vector<Transition> find_transitions(std::span<const Group> current, std::span<const Group> next,
                                         const EvolutionParams& params);

/// Groups plus the transitions between adjacent slots. Groups are sorted by
/// label; transitions by (src, dst).
class EvolutionGraph {
 public:
  EvolutionGraph() = default;
  /// Throws std::invalid_argument on duplicate labels, dangling endpoints or
  /// transitions that do not go from slot i to slot i+1.
  EvolutionGraph(std::vector<Group> groups, std::vector<Transition> transitions);

  const std::vector<Group>& groups() const { return groups_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  void set_kind(std::size_t transition_index, EventKind kind) { transitions_[transition_index].kind = kind; }

  std::optional<std::size_t> index_of(const GroupLabel& label) const;
  const Group& group(const GroupLabel& label) const;

  /// Transition indices leaving / entering the group at `group_index`.
  const std::vector<std::size_t>& outgoing(std::size_t group_index) const { return out_[group_index]; }
  const std::vector<std::size_t>& incoming(std::size_t group_index) const { return in_[group_index]; }

 private:
  std::vector<Group> groups_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// find_transitions over every pair of adjacent slots (concurrently), then
/// classify_events.
EvolutionGraph link_groups(std::vector<Group> groups, const EvolutionParams& params);

/// Edge kinds, decided in this order: addition/deletion when the size ratio
/// reaches sh; split_merge when the source has another similar-size successor
/// and the destination another similar-size predecessor; split or merge when
/// only one side does; otherwise growth, decay or continuation by size.
void classify_events(EvolutionGraph& graph, const EvolutionParams& params);

struct NodeEvents {
  bool birth = false;  // no incoming transitions
  bool death = false;  // no outgoing transitions
};
NodeEvents node_events(const EvolutionGraph& graph, std::size_t group_index);

/// Labels of groups lying on a transition path that spans at least
/// min_lifespan slots.
std::vector<GroupLabel> stable_groups(const EvolutionGraph& graph, const EvolutionParams& params);

/// Longest transition path through each group, counted in slots.
std::vector<int> lifespans(const EvolutionGraph& graph);

struct Hierarchy {
  int id = 0;
  std::vector<GroupLabel> groups;  // sorted
  int first_slot = 0;
  int last_slot = 0;
};

/// Weakly connected components, numbered from 0 by their smallest label
/// (earliest slot first).
std::vector<Hierarchy> hierarchies(const EvolutionGraph& graph);

struct MemberFlows {
  std::size_t inflow = 0;        // Σ per-edge flow over incoming transitions
  std::size_t external_in = 0;   // |members \ ⋃ predecessors|
  std::size_t outflow = 0;       // Σ per-edge flow over outgoing transitions
  std::size_t external_out = 0;  // |members \ ⋃ successors|
  std::size_t union_in = 0;      // |members ∩ ⋃ predecessors|
  std::size_t union_out = 0;     // |members ∩ ⋃ successors|
};

MemberFlows member_flows(const EvolutionGraph& graph, const GroupLabel& label);

}  // namespace gevi
