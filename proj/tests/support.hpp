#pragma once

// Oracles and fixtures shared by the unit tests and the acceptance binary.
// The oracles deliberately avoid the library's algorithms: cliques come
// from subset enumeration, crossings from pairwise edge comparison and the
// crossing optimum from exhaustive permutation.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gevi/artifact.hpp"
#include "gevi/cpm.hpp"
#include "gevi/evolution.hpp"
#include "gevi/ingest.hpp"
#include "gevi/layout.hpp"

namespace gevi::testing {

inline MemberSet members(std::initializer_list<std::string> names) {
  MemberSet m(names);
  std::sort(m.begin(), m.end());
  return m;
}

inline MemberSet range_members(int first, int last) {  // m<first>..m<last>, inclusive
  MemberSet m;
  for (int i = first; i <= last; ++i) m.push_back("m" + std::to_string(1000 + i));
  std::sort(m.begin(), m.end());
  return m;
}

inline std::string actor(int i) { return "a" + std::to_string(100 + i); }

// ---------- measures ----------

inline MemberSet random_set(std::mt19937& rng, int universe, int max_size) {
  std::uniform_int_distribution<int> len(0, max_size), pick(0, universe - 1);
  std::set<std::string> s;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) s.insert(actor(pick(rng)));
  return {s.begin(), s.end()};
}

inline bool contains(const MemberSet& big, const MemberSet& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// ---------- graphs and CPM ----------

struct AdjacencyMatrix {
  int n = 0;
  std::vector<std::vector<bool>> adj;
};

inline AdjacencyMatrix random_matrix(std::mt19937& rng, int n, double density) {
  AdjacencyMatrix m{n, std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))};
  std::bernoulli_distribution edge(density);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(rng)) m.adj[i][j] = m.adj[j][i] = true;
    }
  }
  return m;
}

/// One slot graph whose vertex i is actor(i), built through messages.
inline SlotGraph slot_graph_of(const AdjacencyMatrix& m, int slot_index = 0) {
  const Instant t0 = parse_instant("2001-01-01");
  TimeSlot slot{slot_index, t0, t0 + days(30)};
  std::vector<Message> messages;
  for (int i = 0; i < m.n; ++i) {
    for (int j = i + 1; j < m.n; ++j) {
      if (m.adj[i][j]) messages.push_back({actor(i), actor(j), t0 + days(1)});
    }
  }
  return build_slot_graph(messages, slot);
}

/// Communities as sets of actor names, by subset enumeration and BFS over
/// the clique adjacency graph.
inline std::set<std::set<std::string>> cpm_oracle(const AdjacencyMatrix& m, int k) {
  std::vector<std::vector<int>> cliques;
  std::vector<int> pick;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(pick.size()) == k) {
      cliques.push_back(pick);
      return;
    }
    for (int v = start; v < m.n; ++v) {
      bool ok = true;
      for (int u : pick) ok = ok && m.adj[u][v];
      if (!ok) continue;
      pick.push_back(v);
      self(self, v + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);

  const std::size_t c = cliques.size();
  std::vector<int> component(c, -1);
  int next = 0;
  for (std::size_t s = 0; s < c; ++s) {
    if (component[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    component[s] = next;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < c; ++b) {
        if (component[b] >= 0) continue;
        int shared = 0;
        for (int x : cliques[a]) shared += std::count(cliques[b].begin(), cliques[b].end(), x);
        if (shared == k - 1) {
          component[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  std::vector<std::set<std::string>> comms(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < c; ++i) {
    for (int v : cliques[i]) comms[static_cast<std::size_t>(component[i])].insert(actor(v));
  }
  return {comms.begin(), comms.end()};
}

inline std::set<std::set<std::string>> as_sets(const std::vector<Group>& groups) {
  std::set<std::set<std::string>> out;
  for (const auto& g : groups) out.insert({g.members.begin(), g.members.end()});
  return out;
}

// ---------- evolution scenarios ----------

inline EvolutionGraph evolve(std::vector<Group> groups, const EvolutionParams& params = {}) {
  return link_groups(std::move(groups), params);
}

inline const Transition& edge(const EvolutionGraph& g, const std::string& src, const std::string& dst) {
  const auto s = *GroupLabel::parse(src), d = *GroupLabel::parse(dst);
  for (const auto& t : g.transitions()) {
    if (t.src == s && t.dst == d) return t;
  }
  throw std::out_of_range("no transition " + src + " -> " + dst);
}

/// Two groups dividing into two similar-size groups, each of which draws on
/// both predecessors: every edge satisfies both clauses of split_merge.
inline std::vector<Group> split_merge_scenario() {
  return {{{0, 0}, members({"p1", "p2", "p3", "p4"})},
          {{0, 1}, members({"q1", "q2", "q3", "q4"})},
          {{1, 0}, members({"p1", "p2", "q1", "q2"})},
          {{1, 1}, members({"p3", "p4", "q3", "q4"})}};
}

/// A 3-member group absorbed into a 103-member one.
inline std::vector<Group> addition_scenario() {
  auto big = range_members(0, 99);
  for (const auto& m : {"x", "y", "z"}) big.push_back(m);
  std::sort(big.begin(), big.end());
  return {{{0, 0}, members({"x", "y", "z"})}, {{1, 0}, big}};
}

/// 103-member group at 92_1 with two predecessors in slot 91 whose
/// intersections with it overlap on 2 members and cover 94, and three
/// successors in slot 93 whose intersections overlap on 2 members and
/// cover 98.
inline std::vector<Group> flow_92_1_scenario() {
  std::vector<Group> g;
  g.push_back({{91, 0}, range_members(0, 49)});
  g.push_back({{91, 1}, range_members(48, 93)});
  g.push_back({{92, 0}, range_members(500, 510)});
  g.push_back({{92, 1}, range_members(0, 102)});
  g.push_back({{93, 0}, range_members(0, 39)});
  g.push_back({{93, 1}, range_members(38, 69)});
  g.push_back({{93, 2}, range_members(70, 97)});
  return g;
}

// ---------- layered graphs ----------

/// Random DAG over `layers` layers, edges going forward by 1..max_span
/// layers. Nodes are labelled n<i>.
inline LayerInput random_layer_input(std::mt19937& rng, int layers, int max_per_layer, int max_span,
                                     double density) {
  LayerInput in;
  std::uniform_int_distribution<int> count(1, max_per_layer);
  std::vector<std::vector<std::size_t>> by_layer(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      by_layer[static_cast<std::size_t>(l)].push_back(in.nodes.size());
      in.nodes.push_back({"n" + std::to_string(in.nodes.size()), l, 1 + in.nodes.size() % 7});
    }
  }
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<int> span(1, std::max(1, max_span));
  for (int l = 0; l + 1 < layers; ++l) {
    for (const auto u : by_layer[static_cast<std::size_t>(l)]) {
      for (int target = l + 1; target < layers && target <= l + max_span; ++target) {
        for (const auto v : by_layer[static_cast<std::size_t>(target)]) {
          const bool long_edge = target > l + 1;
          if (keep(rng) && (!long_edge || span(rng) == target - l)) {
            in.edges.push_back({u, v, EdgeStyle::solid, std::nullopt});
          }
        }
      }
    }
  }
  return in;
}

/// Crossings by comparing every pair of edges between the same layers.
inline std::size_t crossings_oracle(const LayeredGraph& g) {
  std::size_t total = 0;
  for (std::size_t a = 0; a < g.edges.size(); ++a) {
    for (std::size_t b = a + 1; b < g.edges.size(); ++b) {
      const auto& e = g.edges[a];
      const auto& f = g.edges[b];
      if (g.nodes[e.from].layer != g.nodes[f.from].layer) continue;
      const long du = g.nodes[e.from].order - g.nodes[f.from].order;
      const long dv = g.nodes[e.to].order - g.nodes[f.to].order;
      if (du * dv < 0) ++total;
    }
  }
  return total;
}

/// Minimum crossing count over all in-layer orderings. Layers of one parity
/// are enumerated exhaustively; every layer of the other parity then only
/// depends on fixed neighbours and is solved exactly by a subset DP over
/// pairwise "u before v" costs. Returns nullopt when the enumeration would
/// exceed `budget` orderings.
inline std::optional<std::size_t> optimal_crossings(const LayeredGraph& g, double budget = 2e6) {
  auto layers = g.layers();
  const int L = static_cast<int>(layers.size());
  if (L <= 1) return 0;
  const int base = g.min_layer();
  std::vector<std::vector<std::size_t>> up(g.nodes.size()), down(g.nodes.size());
  for (const auto& e : g.edges) {
    down[e.from].push_back(e.to);
    up[e.to].push_back(e.from);
  }
  for (const auto& layer : layers) {
    if (layer.size() > 20) return std::nullopt;
  }

  auto product = [&](int parity) {
    double p = 1;
    for (int l = parity; l < L; l += 2) {
      for (std::size_t i = 2; i <= layers[static_cast<std::size_t>(l)].size(); ++i) p *= static_cast<double>(i);
    }
    return p;
  };
  const int enum_parity = product(0) <= product(1) ? 0 : 1;
  if (product(enum_parity) > budget) return std::nullopt;
  for (int l = 1 - enum_parity; l < L; l += 2) {
    if (layers[static_cast<std::size_t>(l)].size() > 16) return std::nullopt;
  }

  std::vector<int> pos(g.nodes.size(), 0);
  std::vector<int> enumerated;
  for (int l = enum_parity; l < L; l += 2) {
    auto& layer = layers[static_cast<std::size_t>(l)];
    std::sort(layer.begin(), layer.end());
    for (std::size_t i = 0; i < layer.size(); ++i) pos[layer[i]] = static_cast<int>(i);
    enumerated.push_back(l);
  }

  // cost of u placed before v in a free layer, given fixed neighbour positions
  auto pair_cost = [&](std::size_t u, std::size_t v) {
    std::size_t c = 0;
    for (const auto* nb : {&up, &down}) {
      for (const auto a : (*nb)[u]) {
        for (const auto b : (*nb)[v]) c += pos[a] > pos[b] ? 1 : 0;
      }
    }
    return c;
  };
  auto best_free_layer = [&](const std::vector<std::size_t>& layer) {
    const std::size_t n = layer.size();
    if (n <= 1) return std::size_t{0};
    std::vector<std::vector<std::size_t>> cost(n, std::vector<std::size_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) cost[i][j] = i == j ? 0 : pair_cost(layer[i], layer[j]);
    }
    // dp[S]: best cost of placing set S first; adding v after S costs Σ_{u∈S} cost(u,v)
    const std::size_t full = (std::size_t{1} << n) - 1;
    std::vector<std::size_t> dp(full + 1, std::numeric_limits<std::size_t>::max());
    dp[0] = 0;
    for (std::size_t s = 0; s < full; ++s) {
      if (dp[s] == std::numeric_limits<std::size_t>::max()) continue;
      for (std::size_t v = 0; v < n; ++v) {
        if (s >> v & 1) continue;
        std::size_t add = 0;
        for (std::size_t u = 0; u < n; ++u) {
          if (s >> u & 1) add += cost[u][v];
        }
        dp[s | (std::size_t{1} << v)] = std::min(dp[s | (std::size_t{1} << v)], dp[s] + add);
      }
    }
    return dp[full];
  };

  std::size_t best = std::numeric_limits<std::size_t>::max();
  auto rec = [&](auto&& self, std::size_t idx) -> void {
    if (idx == enumerated.size()) {
      std::size_t total = 0;
      for (int l = 1 - enum_parity; l < L && total < best; l += 2) {
        total += best_free_layer(layers[static_cast<std::size_t>(l)]);
      }
      best = std::min(best, total);
      return;
    }
    auto layer = layers[static_cast<std::size_t>(enumerated[idx])];
    std::sort(layer.begin(), layer.end());
    do {
      for (std::size_t i = 0; i < layer.size(); ++i) pos[layer[i]] = static_cast<int>(i);
      self(self, idx + 1);
    } while (std::next_permutation(layer.begin(), layer.end()) && best > 0);
  };
  rec(rec, 0);
  (void)base;
  return best;
}

inline bool edges_span_one_layer(const LayeredGraph& g) {
  return std::all_of(g.edges.begin(), g.edges.end(),
                     [&](const LayeredEdge& e) { return g.nodes[e.to].layer == g.nodes[e.from].layer + 1; });
}

/// Distinct x per layer, shared within a layer; y strictly separated by at
/// least node_gap inside a layer, following the order.
inline bool coordinates_separated(const PositionedGraph& g, const LayoutMetrics& m) {
  std::map<int, double> layer_x;
  for (const auto& n : g.nodes) {
    const auto [it, fresh] = layer_x.emplace(n.layer, n.x);
    if (!fresh && it->second != n.x) return false;
  }
  std::set<double> xs;
  for (const auto& [l, x] : layer_x) xs.insert(x);
  if (xs.size() != layer_x.size()) return false;
  for (const auto& layer : g.layers()) {
    for (std::size_t i = 1; i < layer.size(); ++i) {
      if (g.nodes[layer[i]].y - g.nodes[layer[i - 1]].y < m.node_gap - 1e-6) return false;
    }
  }
  return true;
}

// ---------- files ----------

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gevi-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path path() const { return path_; }
  std::string file(const std::string& name, const std::string& contents) const {
    const auto p = path_ / name;
    std::ofstream(p) << contents;
    return p.string();
  }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Three actors messaging pairwise inside one slot window.
inline std::string toy_messages() {
  return "sender,recipient,timestamp\n"
         "ann,bob,2001-03-01T10:00:00Z\n"
         "bob,cid,2001-03-02T10:00:00Z\n"
         "cid,ann,2001-03-03T10:00:00Z\n";
}

/// The same triangle in two consecutive non-overlapping slots.
inline std::string two_slot_messages() {
  return "sender,recipient,timestamp\n"
         "ann,bob,2001-03-01T10:00:00Z\n"
         "bob,cid,2001-03-02T10:00:00Z\n"
         "cid,ann,2001-03-03T10:00:00Z\n"
         "ann,bob,2001-03-31T10:00:00Z\n"
         "bob,cid,2001-04-01T10:00:00Z\n"
         "cid,ann,2001-04-02T10:00:00Z\n";
}

/// Larger synthetic log: drifting overlapping cliques over several slots,
/// plus noise and a few malformed rows.
inline std::string synthetic_messages(unsigned seed, int actors = 40, int messages = 4000) {
  std::mt19937 rng(seed);
  std::string out = "sender,recipient,timestamp\n";
  const Instant t0 = parse_instant("2000-01-01");
  std::uniform_int_distribution<int> day(0, 179), who(0, actors - 1), second(0, 86399);
  for (int i = 0; i < messages; ++i) {
    const int d = day(rng);
    // communities of 6 actors that drift by one actor every 30 days
    const int team = who(rng) % 5;
    const int base = (team * 7 + d / 30) % actors;
    std::uniform_int_distribution<int> off(0, 5);
    int a = (base + off(rng)) % actors, b = (base + off(rng)) % actors;
    if (i % 10 == 0) {
      a = who(rng);
      b = who(rng);
    }
    const auto t = t0 + days(d) + Duration(second(rng));
    out += actor(a) + "," + actor(b) + "," + format_instant(t) + "\n";
    if (i % 997 == 0) out += "broken row without fields\n";
  }
  return out;
}

}  // namespace gevi::testing
