#include "doctest.h"
#include "gevi/layout.hpp"
#include "support.hpp"

using namespace gevi;
using namespace gevi::testing;

namespace {

LayerInput two_layer(std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
  LayerInput in;
  in.nodes = {{"a", 0, 1}, {"b", 0, 1}, {"x", 1, 1}, {"y", 1, 1}};
  for (auto [u, v] : edges) in.edges.push_back({u, v, EdgeStyle::solid, std::nullopt});
  return in;
}

}  // namespace

TEST_CASE("assign_layers inserts one dummy per intermediate layer") {
  LayerInput in;
  in.nodes = {{"s", 2, 4}, {"t", 5, 4}, {"u", 3, 1}};
  in.edges = {{0, 1, EdgeStyle::dashed, 7}, {0, 2, EdgeStyle::solid, 8}};
  const auto g = assign_layers(in);
  CHECK(g.nodes.size() == 5);
  CHECK(g.edges.size() == 4);
  CHECK(edges_span_one_layer(g));
  std::vector<int> dummy_layers;
  for (const auto& n : g.nodes)
    if (n.is_dummy) dummy_layers.push_back(n.layer);
  std::sort(dummy_layers.begin(), dummy_layers.end());
  CHECK(dummy_layers == std::vector<int>{3, 4});
  for (const auto& e : g.edges) {
    if (g.nodes[e.to].id == "u") continue;
    CHECK(e.style == EdgeStyle::dashed);
    CHECK(e.transition == 7u);
  }
  CHECK(g.min_layer() == 2);
  CHECK(g.max_layer() == 5);
  for (const auto& layer : g.layers()) {
    for (std::size_t i = 0; i < layer.size(); ++i) CHECK(g.nodes[layer[i]].order == static_cast<int>(i));
  }

  LayerInput bad;
  bad.nodes = {{"s", 2, 1}, {"t", 2, 1}};
  bad.edges = {{0, 1}};
  CHECK_THROWS_AS(assign_layers(bad), std::invalid_argument);
}

TEST_CASE("chain of three slots gives three layers of one node") {
  LayerInput in;
  in.nodes = {{"0_0", 0, 3}, {"1_0", 1, 3}, {"2_0", 2, 3}};
  in.edges = {{0, 1}, {1, 2}};
  const auto g = assign_layers(in);
  CHECK(g.layers().size() == 3);
  for (const auto& layer : g.layers()) CHECK(layer.size() == 1);
  for (const auto& n : g.nodes) CHECK_FALSE(n.is_dummy);
}

TEST_CASE("count_crossings small cases") {
  CHECK(count_crossings(assign_layers(two_layer({{0, 2}, {1, 3}}))) == 0);
  CHECK(count_crossings(assign_layers(two_layer({{0, 3}, {1, 2}}))) == 1);
  CHECK(count_crossings(assign_layers(two_layer({{0, 2}, {0, 3}, {1, 2}, {1, 3}}))) == 1);
}

TEST_CASE("count_crossings equals the pairwise oracle") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    auto g = assign_layers(random_layer_input(rng, 2 + trial % 5, 7, 3, 0.35));
    // shuffle orders to exercise arbitrary permutations
    for (auto& layer : g.layers()) {
      std::vector<int> perm(layer.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t i = 0; i < layer.size(); ++i) g.nodes[layer[i]].order = perm[i];
    }
    CHECK(count_crossings(g) == crossings_oracle(g));
  }
}

TEST_CASE("reduce_crossings on the 2x2 cases") {
  auto g = assign_layers(two_layer({{0, 3}, {1, 2}}));
  const auto r = reduce_crossings(g);
  CHECK(r.initial == 1);
  CHECK(r.final == 0);
  CHECK(count_crossings(g) == 0);

  auto k22 = assign_layers(two_layer({{0, 2}, {0, 3}, {1, 2}, {1, 3}}));
  CHECK(reduce_crossings(k22).final == 1);
}

TEST_CASE("reduce_crossings never worsens and stays near the optimum") {
  std::mt19937 rng(4242);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto g = assign_layers(random_layer_input(rng, 3, 6, 1, 0.4));
    const auto before = count_crossings(g);
    const auto r = reduce_crossings(g);
    CHECK(r.initial == before);
    CHECK(r.final <= r.initial);
    CHECK(count_crossings(g) == r.final);
    for (const auto& layer : g.layers()) {
      std::set<int> orders;
      for (auto i : layer) orders.insert(g.nodes[i].order);
      CHECK(orders.size() == layer.size());
      CHECK(*orders.rbegin() == static_cast<int>(layer.size()) - 1);
    }
    if (const auto opt = optimal_crossings(g)) {
      ++compared;
      CAPTURE(trial);
      CHECK(r.final <= 2 * *opt);
    }
  }
  CHECK(compared >= 100);
}

TEST_CASE("optimal_crossings oracle agrees with brute force on tiny graphs") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = assign_layers(random_layer_input(rng, 3, 4, 1, 0.5));
    auto layers = g.layers();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (auto& l : layers) std::sort(l.begin(), l.end());
    auto rec = [&](auto&& self, std::size_t idx) -> void {
      if (idx == layers.size()) {
        best = std::min(best, crossings_oracle(g));
        return;
      }
      auto layer = layers[idx];
      do {
        for (std::size_t i = 0; i < layer.size(); ++i) g.nodes[layer[i]].order = static_cast<int>(i);
        self(self, idx + 1);
      } while (std::next_permutation(layer.begin(), layer.end()));
    };
    rec(rec, 0);
    CHECK(optimal_crossings(g) == best);
  }
}

TEST_CASE("coordinates: single node at origin, separated layers") {
  LayerInput one;
  one.nodes = {{"0_0", 0, 3}};
  const auto p = assign_coordinates(assign_layers(one));
  CHECK(p.nodes[0].x == 0.0);
  CHECK(p.nodes[0].y == 0.0);

  LayerInput three;
  three.nodes = {{"0_0", 0, 3}, {"0_1", 0, 3}, {"0_2", 0, 3}};
  const LayoutMetrics m;
  const auto q = assign_coordinates(assign_layers(three), m);
  CHECK(q.nodes[1].y - q.nodes[0].y >= m.node_gap);
  CHECK(q.nodes[2].y - q.nodes[1].y >= m.node_gap);
}

TEST_CASE("dummy chains are straightened between their ends") {
  LayerInput in;
  in.nodes = {{"0_0", 0, 3}, {"0_1", 0, 3}, {"1_0", 1, 3}, {"1_1", 1, 3}, {"1_2", 1, 3}, {"2_0", 2, 3}, {"2_1", 2, 3}};
  in.edges = {{0, 2}, {0, 3}, {2, 5}, {1, 6}};  // 0_1 -> 2_1 passes through a dummy in layer 1
  auto g = assign_layers(in);
  reduce_crossings(g);
  const auto p = assign_coordinates(g);
  for (const auto& e : p.edges) {
    if (!p.nodes[e.to].is_dummy) continue;
    const auto& d = p.nodes[e.to];
    const auto next = std::find_if(p.edges.begin(), p.edges.end(), [&](const LayeredEdge& f) { return f.from == e.to; });
    REQUIRE(next != p.edges.end());
    const double lo = std::min(p.nodes[e.from].y, p.nodes[next->to].y);
    const double hi = std::max(p.nodes[e.from].y, p.nodes[next->to].y);
    CHECK(d.y >= lo - 1e-6);
    CHECK(d.y <= hi + 1e-6);
  }
}

TEST_CASE("coordinates keep order, crossings and separation on random DAGs") {
  std::mt19937 rng(9);
  const LayoutMetrics m;
  for (int trial = 0; trial < 120; ++trial) {
    auto g = assign_layers(random_layer_input(rng, 2 + trial % 6, 6, 3, 0.3));
    reduce_crossings(g);
    const auto before = count_crossings(g);
    const auto p = assign_coordinates(g, m);
    CHECK(edges_span_one_layer(p));
    CHECK(coordinates_separated(p, m));
    CHECK(count_crossings(p) == before);
    double min_y = std::numeric_limits<double>::max();
    for (const auto& n : p.nodes) {
      min_y = std::min(min_y, n.y);
      CHECK(n.x == doctest::Approx(n.layer * m.layer_gap));
    }
    CHECK(min_y == doctest::Approx(0.0));
  }
}

TEST_CASE("hierarchy layout styles addition edges dashed") {
  const auto evo = link_groups(addition_scenario(), {});
  const auto hs = hierarchies(evo);
  REQUIRE(hs.size() == 1);
  const auto p = layout_hierarchy(evo, hs[0]);
  REQUIRE(p.edges.size() == 1);
  CHECK(p.edges[0].style == EdgeStyle::dashed);
  CHECK(p.edges[0].transition == 0u);
  const auto svg = render_svg(p, evo);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("0_0 [3]") != std::string::npos);
  CHECK(svg.find("1_0 [103]") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("layout is deterministic") {
  std::mt19937 rng(1);
  const auto in = random_layer_input(rng, 5, 6, 2, 0.35);
  auto a = assign_layers(in), b = assign_layers(in);
  reduce_crossings(a);
  reduce_crossings(b);
  const auto pa = assign_coordinates(a), pb = assign_coordinates(b);
  for (std::size_t i = 0; i < pa.nodes.size(); ++i) {
    CHECK(pa.nodes[i].order == pb.nodes[i].order);
    CHECK(pa.nodes[i].y == pb.nodes[i].y);
  }
}
