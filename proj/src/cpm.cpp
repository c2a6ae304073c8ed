#include "gevi/cpm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "gevi/detail/parallel.hpp"
#include "gevi/detail/union_find.hpp"

namespace gevi {

std::string GroupLabel::str() const { return std::to_string(slot) + "_" + std::to_string(ordinal); }

std::optional<GroupLabel> GroupLabel::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto sep = text.find('_');
  if (sep == std::string_view::npos || sep == 0 || sep + 1 == text.size()) return std::nullopt;

  const auto read = [](std::string_view part) -> std::optional<int> {
    if (part.empty() || part.front() < '0' || part.front() > '9') return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size()) return std::nullopt;
    return value;
  };
  const auto slot = read(text.substr(0, sep));
  const auto ordinal = read(text.substr(sep + 1));
  if (!slot || !ordinal) return std::nullopt;
  return GroupLabel{*slot, *ordinal};
}

namespace {

// Neighbours with a larger index, sorted.
std::vector<std::vector<std::uint32_t>> forward_adjacency(const SlotGraph& graph) {
  std::vector<std::vector<std::uint32_t>> fwd(graph.vertices.size());
  for (const auto& e : graph.edges) {
    if (e.u == e.v) continue;
    const auto [lo, hi] = std::minmax(e.u, e.v);
    fwd[lo].push_back(hi);
  }
  for (auto& list : fwd) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return fwd;
}

void extend(const std::vector<std::vector<std::uint32_t>>& fwd, Clique& current,
            const std::vector<std::uint32_t>& candidates, std::size_t k, std::vector<Clique>& out) {
  if (current.size() == k) {
    out.push_back(current);
    return;
  }
  if (current.size() + candidates.size() < k) return;
  std::vector<std::uint32_t> next;
  for (const auto v : candidates) {
    next.clear();
    std::set_intersection(candidates.begin(), candidates.end(), fwd[v].begin(), fwd[v].end(),
                          std::back_inserter(next));
    current.push_back(v);
    extend(fwd, current, next, k, out);
    current.pop_back();
  }
}

struct SubsetHash {
  std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto v : key) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

std::vector<Clique> enumerate_k_cliques(const SlotGraph& graph, int k) {
  if (k < 3) throw std::invalid_argument("enumerate_k_cliques: k must be at least 3");
  const auto fwd = forward_adjacency(graph);
  std::vector<Clique> out;
  Clique current;
  current.reserve(static_cast<std::size_t>(k));
  for (std::uint32_t v = 0; v < fwd.size(); ++v) {
    current.assign(1, v);
    extend(fwd, current, fwd[v], static_cast<std::size_t>(k), out);
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> percolate(std::span<const Clique> cliques, int k) {
  if (k < 3) throw std::invalid_argument("percolate: k must be at least 3");
  const auto ks = static_cast<std::size_t>(k);
  for (const auto& c : cliques) {
    if (c.size() != ks) throw std::invalid_argument("percolate: clique size differs from k");
  }

  // Two cliques are adjacent iff they share a (k-1)-subset; index each
  // subset by the first clique that produced it.
  detail::UnionFind uf(cliques.size());
  std::unordered_map<std::vector<std::uint32_t>, std::size_t, SubsetHash> owner;
  owner.reserve(cliques.size() * ks);
  std::vector<std::uint32_t> sorted, face;
  for (std::size_t ci = 0; ci < cliques.size(); ++ci) {
    sorted = cliques[ci];
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t drop = 0; drop < ks; ++drop) {
      face.clear();
      for (std::size_t j = 0; j < ks; ++j) {
        if (j != drop) face.push_back(sorted[j]);
      }
      const auto [it, inserted] = owner.try_emplace(face, ci);
      if (!inserted) uf.unite(it->second, ci);
    }
  }

  std::map<std::size_t, std::vector<std::uint32_t>> by_root;
  for (std::size_t ci = 0; ci < cliques.size(); ++ci) {
    auto& members = by_root[uf.find(ci)];
    members.insert(members.end(), cliques[ci].begin(), cliques[ci].end());
  }
  std::vector<std::vector<std::uint32_t>> communities;
  communities.reserve(by_root.size());
  for (auto& [root, members] : by_root) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    communities.push_back(std::move(members));
  }
  std::sort(communities.begin(), communities.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return communities;
}

std::vector<Group> detect_groups(const SlotGraph& graph, int k) {
  const auto cliques = enumerate_k_cliques(graph, k);
  const auto communities = percolate(cliques, k);
  std::vector<Group> groups;
  groups.reserve(communities.size());
  for (std::size_t i = 0; i < communities.size(); ++i) {
    Group g{{graph.slot.index, static_cast<int>(i)}, {}};
    g.members.reserve(communities[i].size());
    // vertices are sorted, so index order is member order
    for (const auto v : communities[i]) g.members.push_back(graph.vertices[v]);
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<Group> extract_groups(std::span<const SlotGraph> slot_graphs, int k) {
  if (k < 3) throw std::invalid_argument("extract_groups: k must be at least 3");
  auto per_slot = detail::parallel_map<std::vector<Group>>(
      slot_graphs.size(), [&](std::size_t i) { return detect_groups(slot_graphs[i], k); });
  std::vector<Group> all;
  for (auto& groups : per_slot) {
    for (auto& g : groups) all.push_back(std::move(g));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Group& a, const Group& b) { return a.label < b.label; });
  return all;
}

}  // namespace gevi
