#include "gevi/evolution.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "gevi/detail/parallel.hpp"
#include "gevi/detail/union_find.hpp"

namespace gevi {

void EvolutionParams::validate() const {
  if (!(th > 0.0 && th <= 1.0)) throw std::invalid_argument("th must lie in (0, 1]");
  if (!(sh > 1.0)) throw std::invalid_argument("sh must be greater than 1");
  if (min_lifespan < 1) throw std::invalid_argument("min_lifespan must be at least 1");
}

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 10> kEventNames{{
    {EventKind::birth, "birth"},
    {EventKind::death, "death"},
    {EventKind::continuation, "continuation"},
    {EventKind::growth, "growth"},
    {EventKind::decay, "decay"},
    {EventKind::split, "split"},
    {EventKind::merge, "merge"},
    {EventKind::split_merge, "split_merge"},
    {EventKind::addition, "addition"},
    {EventKind::deletion, "deletion"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kEventNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::size_t intersection_size(const MemberSet& a, const MemberSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

double modified_jaccard(const MemberSet& a, const MemberSet& b) {
  if (a.empty() || b.empty()) return 0.0;
  const auto common = static_cast<double>(intersection_size(a, b));
  return std::max(common / static_cast<double>(a.size()), common / static_cast<double>(b.size()));
}

double size_ratio(const MemberSet& a, const MemberSet& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("size_ratio: member sets must be non-empty");
  const auto x = static_cast<double>(a.size());
  const auto y = static_cast<double>(b.size());
  return std::max(x / y, y / x);
}

double stability(const MemberSet& a, const MemberSet& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("stability: member sets must be non-empty");
  const auto common = intersection_size(a, b);
  const auto uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<Transition> find_transitions(std::span<const Group> current, std::span<const Group> next,
                                         const EvolutionParams& params) {
  std::vector<Transition> out;
  for (const auto& g : current) {
    for (const auto& h : next) {
      if (h.slot() != g.slot() + 1) {
        throw std::invalid_argument("find_transitions: " + h.label.str() + " is not in the slot after " +
                                    g.label.str());
      }
      const double mj = modified_jaccard(g.members, h.members);
      if (mj < params.th) continue;
      Transition t;
      t.src = g.label;
      t.dst = h.label;
      t.mj = mj;
      t.flow = intersection_size(g.members, h.members);
      t.stability = stability(g.members, h.members);
      t.size_ratio = size_ratio(g.members, h.members);
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  return out;
}

EvolutionGraph::EvolutionGraph(std::vector<Group> groups, std::vector<Transition> transitions)
    : groups_(std::move(groups)), transitions_(std::move(transitions)) {
  std::sort(groups_.begin(), groups_.end(), [](const Group& a, const Group& b) { return a.label < b.label; });
  for (std::size_t i = 1; i < groups_.size(); ++i) {
    if (groups_[i - 1].label == groups_[i].label) {
      throw std::invalid_argument("duplicate group label " + groups_[i].label.str());
    }
  }
  std::sort(transitions_.begin(), transitions_.end(), [](const Transition& a, const Transition& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });

  out_.assign(groups_.size(), {});
  in_.assign(groups_.size(), {});
  for (std::size_t ti = 0; ti < transitions_.size(); ++ti) {
    const auto& t = transitions_[ti];
    const auto s = index_of(t.src);
    const auto d = index_of(t.dst);
    if (!s || !d) {
      throw std::invalid_argument("transition " + t.src.str() + "->" + t.dst.str() + " has a missing endpoint");
    }
    if (t.dst.slot != t.src.slot + 1) {
      throw std::invalid_argument("transition " + t.src.str() + "->" + t.dst.str() +
                                  " does not link adjacent slots");
    }
    out_[*s].push_back(ti);
    in_[*d].push_back(ti);
  }
}

std::optional<std::size_t> EvolutionGraph::index_of(const GroupLabel& label) const {
  const auto it = std::lower_bound(groups_.begin(), groups_.end(), label,
                                   [](const Group& g, const GroupLabel& l) { return g.label < l; });
  if (it == groups_.end() || it->label != label) return std::nullopt;
  return static_cast<std::size_t>(it - groups_.begin());
}

const Group& EvolutionGraph::group(const GroupLabel& label) const {
  const auto idx = index_of(label);
  if (!idx) throw std::out_of_range("no group " + label.str());
  return groups_[*idx];
}

EvolutionGraph link_groups(std::vector<Group> groups, const EvolutionParams& params) {
  params.validate();
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.label < b.label; });

  // contiguous runs of one slot each
  std::vector<std::span<const Group>> runs;
  for (std::size_t i = 0; i < groups.size();) {
    std::size_t j = i;
    while (j < groups.size() && groups[j].slot() == groups[i].slot()) ++j;
    runs.emplace_back(groups.data() + i, j - i);
    i = j;
  }
  const std::size_t pairs = runs.empty() ? 0 : runs.size() - 1;
  auto per_pair = detail::parallel_map<std::vector<Transition>>(pairs, [&](std::size_t r) {
    if (runs[r + 1].front().slot() != runs[r].front().slot() + 1) return std::vector<Transition>{};
    return find_transitions(runs[r], runs[r + 1], params);
  });
  std::vector<Transition> transitions;
  for (auto& batch : per_pair) transitions.insert(transitions.end(), batch.begin(), batch.end());

  EvolutionGraph graph(std::move(groups), std::move(transitions));
  classify_events(graph, params);
  return graph;
}

void classify_events(EvolutionGraph& graph, const EvolutionParams& params) {
  params.validate();
  const auto& groups = graph.groups();
  const auto& transitions = graph.transitions();

  const auto similar = [&](const Group& a, const Group& b) {
    return size_ratio(a.members, b.members) < params.sh;
  };

  for (std::size_t ti = 0; ti < transitions.size(); ++ti) {
    const auto& t = transitions[ti];
    const auto si = *graph.index_of(t.src);
    const auto di = *graph.index_of(t.dst);
    const Group& src = groups[si];
    const Group& dst = groups[di];
    if (size_ratio(src.members, dst.members) >= params.sh) {
      graph.set_kind(ti, dst.size() > src.size() ? EventKind::addition : EventKind::deletion);
      continue;
    }
    bool src_splits = false;
    for (const auto oi : graph.outgoing(si)) {
      const auto& other = transitions[oi];
      if (other.dst != t.dst && similar(src, graph.group(other.dst))) {
        src_splits = true;
        break;
      }
    }
    bool dst_merges = false;
    for (const auto ii : graph.incoming(di)) {
      const auto& other = transitions[ii];
      if (other.src != t.src && similar(graph.group(other.src), dst)) {
        dst_merges = true;
        break;
      }
    }

    EventKind kind = EventKind::continuation;
    if (src_splits && dst_merges) {
      kind = EventKind::split_merge;
    } else if (src_splits) {
      kind = EventKind::split;
    } else if (dst_merges) {
      kind = EventKind::merge;
    } else if (dst.size() > src.size()) {
      kind = EventKind::growth;
    } else if (dst.size() < src.size()) {
      kind = EventKind::decay;
    }
    graph.set_kind(ti, kind);
  }
}

NodeEvents node_events(const EvolutionGraph& graph, std::size_t group_index) {
  return {graph.incoming(group_index).empty(), graph.outgoing(group_index).empty()};
}

std::vector<int> lifespans(const EvolutionGraph& graph) {
  const auto& groups = graph.groups();
  const auto& transitions = graph.transitions();
  const auto n = groups.size();
  // groups are sorted by slot, so forward order is a topological order
  std::vector<int> back(n, 1), fwd(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto ti : graph.incoming(i)) {
      back[i] = std::max(back[i], back[*graph.index_of(transitions[ti].src)] + 1);
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (const auto ti : graph.outgoing(i)) {
      fwd[i] = std::max(fwd[i], fwd[*graph.index_of(transitions[ti].dst)] + 1);
    }
  }
  std::vector<int> span(n);
  for (std::size_t i = 0; i < n; ++i) span[i] = back[i] + fwd[i] - 1;
  return span;
}

std::vector<GroupLabel> stable_groups(const EvolutionGraph& graph, const EvolutionParams& params) {
  params.validate();
  const auto spans = lifespans(graph);
  std::vector<GroupLabel> out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i] >= params.min_lifespan) out.push_back(graph.groups()[i].label);
  }
  return out;
}

std::vector<Hierarchy> hierarchies(const EvolutionGraph& graph) {
  const auto& groups = graph.groups();
  detail::UnionFind uf(groups.size());
  for (const auto& t : graph.transitions()) uf.unite(*graph.index_of(t.src), *graph.index_of(t.dst));

  // groups are sorted, so the first group seen of each component is its
  // smallest label and components appear in numbering order
  std::map<std::size_t, std::size_t> component_of_root;
  std::vector<Hierarchy> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto root = uf.find(i);
    auto [it, inserted] = component_of_root.try_emplace(root, out.size());
    if (inserted) {
      Hierarchy h;
      h.id = static_cast<int>(out.size());
      h.first_slot = groups[i].slot();
      h.last_slot = groups[i].slot();
      out.push_back(std::move(h));
    }
    auto& h = out[it->second];
    h.groups.push_back(groups[i].label);
    h.first_slot = std::min(h.first_slot, groups[i].slot());
    h.last_slot = std::max(h.last_slot, groups[i].slot());
  }
  return out;
}

MemberFlows member_flows(const EvolutionGraph& graph, const GroupLabel& label) {
  const auto idx = graph.index_of(label);
  if (!idx) throw std::out_of_range("no group " + label.str());
  const Group& g = graph.groups()[*idx];
  const auto& transitions = graph.transitions();

  const auto union_of = [&](const std::vector<std::size_t>& edges, bool take_src) {
    MemberSet all;
    for (const auto ti : edges) {
      const auto& other = graph.group(take_src ? transitions[ti].src : transitions[ti].dst);
      MemberSet merged;
      std::set_union(all.begin(), all.end(), other.members.begin(), other.members.end(),
                     std::back_inserter(merged));
      all = std::move(merged);
    }
    return all;
  };

  MemberFlows f;
  for (const auto ti : graph.incoming(*idx)) f.inflow += transitions[ti].flow;
  for (const auto ti : graph.outgoing(*idx)) f.outflow += transitions[ti].flow;
  f.union_in = intersection_size(g.members, union_of(graph.incoming(*idx), true));
  f.union_out = intersection_size(g.members, union_of(graph.outgoing(*idx), false));
  f.external_in = g.size() - f.union_in;
  f.external_out = g.size() - f.union_out;
  return f;
}

}  // namespace gevi
