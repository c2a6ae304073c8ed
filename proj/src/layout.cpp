#include "gevi/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gevi {

std::string_view to_string(EdgeStyle style) { return style == EdgeStyle::dashed ? "dashed" : "solid"; }

int LayeredGraph::min_layer() const {
  int m = std::numeric_limits<int>::max();
  for (const auto& n : nodes) m = std::min(m, n.layer);
  return nodes.empty() ? 0 : m;
}

int LayeredGraph::max_layer() const {
  int m = std::numeric_limits<int>::min();
  for (const auto& n : nodes) m = std::max(m, n.layer);
  return nodes.empty() ? -1 : m;
}

std::vector<std::vector<std::size_t>> LayeredGraph::layers() const {
  if (nodes.empty()) return {};
  const int lo = min_layer();
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(max_layer() - lo + 1));
  for (std::size_t i = 0; i < nodes.size(); ++i) out[static_cast<std::size_t>(nodes[i].layer - lo)].push_back(i);
  for (auto& layer : out) {
    std::sort(layer.begin(), layer.end(), [&](std::size_t a, std::size_t b) { return nodes[a].order < nodes[b].order; });
  }
  return out;
}

LayeredGraph assign_layers(const LayerInput& input) {
  LayeredGraph g;
  g.hierarchy = input.hierarchy;
  std::map<int, int> next_order;
  for (const auto& n : input.nodes) {
    g.nodes.push_back({n.id, n.layer, next_order[n.layer]++, false, 0.0, 0.0, n.size});
  }

  int dummy_count = 0;
  for (const auto& e : input.edges) {
    if (e.from >= input.nodes.size() || e.to >= input.nodes.size()) {
      throw std::invalid_argument("assign_layers: edge endpoint out of range");
    }
    const int from_layer = input.nodes[e.from].layer;
    const int to_layer = input.nodes[e.to].layer;
    if (to_layer <= from_layer) {
      throw std::invalid_argument("assign_layers: edge " + input.nodes[e.from].id + "->" + input.nodes[e.to].id +
                                  " does not point to a later layer");
    }
    std::size_t prev = e.from;
    for (int layer = from_layer + 1; layer < to_layer; ++layer) {
      const std::size_t dummy = g.nodes.size();
      g.nodes.push_back({"d" + std::to_string(dummy_count++), layer, next_order[layer]++, true, 0.0, 0.0, 0});
      g.edges.push_back({prev, dummy, e.style, e.transition});
      prev = dummy;
    }
    g.edges.push_back({prev, e.to, e.style, e.transition});
  }
  return g;
}

LayerInput hierarchy_input(const EvolutionGraph& graph, const Hierarchy& hierarchy) {
  LayerInput in;
  in.hierarchy = hierarchy.id;
  std::map<GroupLabel, std::size_t> local;
  // hierarchy.groups is sorted by (slot, ordinal): ordinal order within a layer
  for (const auto& label : hierarchy.groups) {
    local[label] = in.nodes.size();
    in.nodes.push_back({label.str(), label.slot, graph.group(label).size()});
  }
  const auto& transitions = graph.transitions();
  for (std::size_t ti = 0; ti < transitions.size(); ++ti) {
    const auto& t = transitions[ti];
    const auto s = local.find(t.src);
    if (s == local.end()) continue;
    const auto d = local.find(t.dst);
    if (d == local.end()) continue;
    in.edges.push_back({s->second, d->second, t.dashed() ? EdgeStyle::dashed : EdgeStyle::solid, ti});
  }
  return in;
}

namespace {

constexpr int kRestarts = 16;

// Inversions among edges between two layers, sorted by (upper, lower) order.
std::size_t bilayer_crossings(std::vector<std::pair<int, int>>& pairs, std::size_t lower_size) {
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::size_t> tree(lower_size + 1, 0);
  std::size_t crossings = 0;
  std::size_t seen = 0;
  for (const auto& [upper, lower] : pairs) {
    // edges seen so far ending strictly right of `lower`
    std::size_t at_or_left = 0;
    for (auto i = static_cast<std::size_t>(lower) + 1; i > 0; i -= i & (~i + 1)) at_or_left += tree[i];
    crossings += seen - at_or_left;
    for (auto i = static_cast<std::size_t>(lower) + 1; i <= lower_size; i += i & (~i + 1)) ++tree[i];
    ++seen;
  }
  return crossings;
}

struct Adjacency {
  std::vector<std::vector<std::size_t>> up;    // neighbours in layer - 1
  std::vector<std::vector<std::size_t>> down;  // neighbours in layer + 1
};

Adjacency adjacency_of(const LayeredGraph& g) {
  Adjacency adj;
  adj.up.resize(g.nodes.size());
  adj.down.resize(g.nodes.size());
  for (const auto& e : g.edges) {
    if (g.nodes[e.to].layer != g.nodes[e.from].layer + 1) {
      throw std::invalid_argument("layered graph has an edge that does not span exactly one layer");
    }
    adj.down[e.from].push_back(e.to);
    adj.up[e.to].push_back(e.from);
  }
  return adj;
}

double median_of(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

// Reorders `layer` by the median order of each node's neighbours; nodes
// without neighbours keep their position.
void reorder_by_median(std::vector<std::size_t>& layer, const std::vector<std::vector<std::size_t>>& neighbours,
                       const std::vector<int>& order) {
  std::vector<std::pair<double, std::size_t>> movable;
  std::vector<bool> fixed_slot(layer.size(), false);
  std::vector<double> positions;
  for (std::size_t i = 0; i < layer.size(); ++i) {
    const auto& nbrs = neighbours[layer[i]];
    if (nbrs.empty()) {
      fixed_slot[i] = true;
      continue;
    }
    positions.clear();
    for (const auto n : nbrs) positions.push_back(order[n]);
    movable.emplace_back(median_of(positions), layer[i]);
  }
  std::stable_sort(movable.begin(), movable.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t next = 0;
  for (std::size_t i = 0; i < layer.size(); ++i) {
    if (!fixed_slot[i]) layer[i] = movable[next++].second;
  }
}

void write_orders(const std::vector<std::vector<std::size_t>>& layers, std::vector<int>& order) {
  for (const auto& layer : layers) {
    for (std::size_t i = 0; i < layer.size(); ++i) order[layer[i]] = static_cast<int>(i);
  }
}

// Crossings between edges of v and edges of w when v sits left of w.
std::size_t pair_crossings(std::size_t v, std::size_t w, const Adjacency& adj, const std::vector<int>& order) {
  std::size_t c = 0;
  for (const auto* nbrs : {&adj.up, &adj.down}) {
    for (const auto a : (*nbrs)[v]) {
      for (const auto b : (*nbrs)[w]) c += order[a] > order[b] ? 1 : 0;
    }
  }
  return c;
}

// Moves each node to the position in its layer that minimises crossings
// with the fixed neighbouring layers, repeating while that strictly lowers
// the count. With `allow_equal`, ties move a node rightwards once, which lets
// the next median sweep escape plateaus.
void sift(std::vector<std::vector<std::size_t>>& layers, const Adjacency& adj, std::vector<int>& order,
          bool allow_equal) {
  for (bool improved = true, first = true; improved; first = false) {
    improved = false;
    for (auto& layer : layers) {
      for (std::size_t i = 0; i < layer.size(); ++i) {
        const auto v = layer[i];
        // delta of moving v to every position, relative to its current one
        std::ptrdiff_t delta = 0, best_delta = 0;
        std::size_t best_pos = i;
        for (std::size_t j = i; j-- > 0;) {
          delta += static_cast<std::ptrdiff_t>(pair_crossings(v, layer[j], adj, order)) -
                   static_cast<std::ptrdiff_t>(pair_crossings(layer[j], v, adj, order));
          if (delta < best_delta) {
            best_delta = delta;
            best_pos = j;
          }
        }
        delta = 0;
        for (std::size_t j = i + 1; j < layer.size(); ++j) {
          delta += static_cast<std::ptrdiff_t>(pair_crossings(layer[j], v, adj, order)) -
                   static_cast<std::ptrdiff_t>(pair_crossings(v, layer[j], adj, order));
          if (delta < best_delta || (allow_equal && first && delta == 0 && best_delta == 0)) {
            best_delta = delta;
            best_pos = j;
          }
        }
        if (best_pos == i) continue;
        improved = improved || best_delta < 0;
        if (best_pos < i) {
          std::rotate(layer.begin() + static_cast<std::ptrdiff_t>(best_pos), layer.begin() + static_cast<std::ptrdiff_t>(i),
                      layer.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        } else {
          std::rotate(layer.begin() + static_cast<std::ptrdiff_t>(i), layer.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                      layer.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
        }
        for (std::size_t k = 0; k < layer.size(); ++k) order[layer[k]] = static_cast<int>(k);
      }
    }
  }
}

std::size_t crossings_of(const LayeredGraph& g, const std::vector<int>& order,
                         const std::vector<std::vector<std::size_t>>& layers) {
  if (layers.empty()) return 0;
  const int lo = g.min_layer();
  std::vector<std::vector<std::pair<int, int>>> per_gap(layers.size());
  for (const auto& e : g.edges) {
    const auto gap = static_cast<std::size_t>(g.nodes[e.from].layer - lo);
    if (g.nodes[e.to].layer != g.nodes[e.from].layer + 1) {
      throw std::invalid_argument("count_crossings: edge does not span exactly one layer");
    }
    per_gap[gap].emplace_back(order[e.from], order[e.to]);
  }
  std::size_t total = 0;
  for (std::size_t gap = 0; gap + 1 < layers.size(); ++gap) {
    total += bilayer_crossings(per_gap[gap], layers[gap + 1].size());
  }
  return total;
}

}  // namespace

std::size_t count_crossings(const LayeredGraph& graph) {
  std::vector<int> order(graph.nodes.size());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) order[i] = graph.nodes[i].order;
  return crossings_of(graph, order, graph.layers());
}

CrossingReduction reduce_crossings(LayeredGraph& graph, int sweeps) {
  const Adjacency adj = adjacency_of(graph);
  const auto initial_layers = graph.layers();
  std::vector<int> order(graph.nodes.size());
  write_orders(initial_layers, order);

  CrossingReduction result;
  result.initial = crossings_of(graph, order, initial_layers);
  result.final = result.initial;
  auto best = initial_layers;

  auto layers = initial_layers;
  const auto keep_if_better = [&](std::size_t& run_best) {
    const auto c = crossings_of(graph, order, layers);
    if (c < result.final) {
      result.final = c;
      best = layers;
    }
    if (c >= run_best) return false;
    run_best = c;
    return true;
  };

  // Sweeps from the given order first, then from a mirrored and from
  // shuffled starting orders (fixed seeds, so the result is deterministic).
  std::mt19937 rng(0x5eed);
  for (int start = 0; start < kRestarts && result.final > 0; ++start) {
    layers = initial_layers;
    if (start == 1) {
      for (auto& layer : layers) std::reverse(layer.begin(), layer.end());
    } else if (start > 1) {
      for (auto& layer : layers) std::shuffle(layer.begin(), layer.end(), rng);
    }
    write_orders(layers, order);
    std::size_t run_best = crossings_of(graph, order, layers);
    for (int it = 0; it < sweeps && result.final > 0; ++it) {
      if (start == 0) ++result.sweeps;
      const bool allow_equal = it % 2 == 1;
      for (std::size_t l = 1; l < layers.size(); ++l) {
        reorder_by_median(layers[l], adj.up, order);
        write_orders({layers[l]}, order);
      }
      sift(layers, adj, order, allow_equal);
      const bool down_improved = keep_if_better(run_best);
      for (std::size_t l = layers.size(); l-- > 1;) {
        reorder_by_median(layers[l - 1], adj.down, order);
        write_orders({layers[l - 1]}, order);
      }
      sift(layers, adj, order, allow_equal);
      const bool up_improved = keep_if_better(run_best);
      if (!down_improved && !up_improved) break;
    }
  }

  for (const auto& layer : best) {
    for (std::size_t i = 0; i < layer.size(); ++i) graph.nodes[layer[i]].order = static_cast<int>(i);
  }
  return result;
}

namespace {

// Weighted least squares fit of y to `desired` subject to
// y[i+1] - y[i] >= gap (pool adjacent violators on y[i] - i*gap).
std::vector<double> place_with_gap(const std::vector<double>& desired, const std::vector<double>& weight,
                                   double gap) {
  struct Block {
    double sum_wz;
    double sum_w;
    std::size_t count;
    double value() const { return sum_wz / sum_w; }
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < desired.size(); ++i) {
    const double z = desired[i] - static_cast<double>(i) * gap;
    blocks.push_back({weight[i] * z, weight[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value() > blocks.back().value()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum_wz += top.sum_wz;
      blocks.back().sum_w += top.sum_w;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> y;
  y.reserve(desired.size());
  for (const auto& b : blocks) {
    for (std::size_t c = 0; c < b.count; ++c) y.push_back(b.value() + static_cast<double>(y.size()) * gap);
  }
  return y;
}

}  // namespace

PositionedGraph assign_coordinates(LayeredGraph graph, const LayoutMetrics& metrics) {
  if (graph.nodes.empty()) return graph;
  const Adjacency adj = adjacency_of(graph);
  const auto layers = graph.layers();

  for (auto& n : graph.nodes) {
    n.x = static_cast<double>(n.layer) * metrics.layer_gap;
    n.y = static_cast<double>(n.order) * metrics.node_gap;
  }

  std::vector<double> values;
  const auto median_y = [&](const std::vector<std::size_t>& nbrs, double fallback) {
    if (nbrs.empty()) return fallback;
    values.clear();
    for (const auto n : nbrs) values.push_back(graph.nodes[n].y);
    return median_of(values);
  };
  const auto place_layer = [&](const std::vector<std::size_t>& layer, auto desired_of, auto weight_of) {
    std::vector<double> desired, weight;
    for (const auto v : layer) {
      desired.push_back(desired_of(v));
      weight.push_back(weight_of(v));
    }
    const auto y = place_with_gap(desired, weight, metrics.node_gap);
    for (std::size_t i = 0; i < layer.size(); ++i) graph.nodes[layer[i]].y = y[i];
  };
  // dummies first, then nodes with many connections
  const auto priority = [&](std::size_t v) {
    const auto& n = graph.nodes[v];
    return n.is_dummy ? 8.0 : 1.0 + 0.25 * static_cast<double>(adj.up[v].size() + adj.down[v].size());
  };

  for (int pass = 0; pass < metrics.passes; ++pass) {
    if (pass % 2 == 0) {
      for (std::size_t l = 1; l < layers.size(); ++l) {
        place_layer(layers[l], [&](std::size_t v) { return median_y(adj.up[v], graph.nodes[v].y); }, priority);
      }
    } else {
      for (std::size_t l = layers.size() - 1; l-- > 0;) {
        place_layer(layers[l], [&](std::size_t v) { return median_y(adj.down[v], graph.nodes[v].y); }, priority);
      }
    }
  }

  // straighten dummies towards both neighbours, real nodes effectively pinned
  std::vector<std::size_t> both;
  for (const auto& layer : layers) {
    place_layer(
        layer,
        [&](std::size_t v) {
          if (!graph.nodes[v].is_dummy) return graph.nodes[v].y;
          both = adj.up[v];
          both.insert(both.end(), adj.down[v].begin(), adj.down[v].end());
          return median_y(both, graph.nodes[v].y);
        },
        [&](std::size_t v) { return graph.nodes[v].is_dummy ? 1.0 : 1e6; });
  }

  double min_y = std::numeric_limits<double>::infinity();
  for (const auto& n : graph.nodes) min_y = std::min(min_y, n.y);
  for (auto& n : graph.nodes) {
    n.y -= min_y;
    if (std::abs(n.y) < 1e-9) n.y = 0.0;
  }
  return graph;
}

PositionedGraph layout_hierarchy(const EvolutionGraph& graph, const Hierarchy& hierarchy,
                                 const LayoutMetrics& metrics, int sweeps) {
  auto layered = assign_layers(hierarchy_input(graph, hierarchy));
  reduce_crossings(layered, sweeps);
  return assign_coordinates(std::move(layered), metrics);
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const PositionedGraph& graph, const EvolutionGraph& evolution, const LayoutMetrics& metrics) {
  double max_x = 0.0, max_y = 0.0, min_x = std::numeric_limits<double>::infinity();
  for (const auto& n : graph.nodes) {
    max_x = std::max(max_x, n.x);
    max_y = std::max(max_y, n.y);
    min_x = std::min(min_x, n.x);
  }
  if (graph.nodes.empty()) min_x = 0.0;
  const double margin = 40.0;
  const double ox = margin + metrics.node_width / 2 - min_x;
  const double oy = margin + metrics.node_height / 2;
  const double width = max_x - min_x + metrics.node_width + 2 * margin;
  const double height = max_y + metrics.node_height + 2 * margin;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<title>hierarchy " << graph.hierarchy << "</title>\n";
  svg << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" "
         "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n";

  const auto& transitions = evolution.transitions();
  for (const auto& e : graph.edges) {
    const auto& a = graph.nodes[e.from];
    const auto& b = graph.nodes[e.to];
    const double x1 = a.x + ox + (a.is_dummy ? 0.0 : metrics.node_width / 2);
    const double x2 = b.x + ox - (b.is_dummy ? 0.0 : metrics.node_width / 2);
    svg << "<line x1=\"" << x1 << "\" y1=\"" << a.y + oy << "\" x2=\"" << x2 << "\" y2=\"" << b.y + oy
        << "\" stroke=\"#333\"" << (e.style == EdgeStyle::dashed ? " stroke-dasharray=\"6,4\"" : "")
        << (b.is_dummy ? "" : " marker-end=\"url(#arrow)\"") << "/>\n";
    if (!b.is_dummy && e.transition && *e.transition < transitions.size()) {
      svg << "<text x=\"" << (x1 + x2) / 2 << "\" y=\"" << (a.y + b.y) / 2 + oy - 4 << "\" fill=\"#036\">"
          << transitions[*e.transition].flow << "</text>\n";
    }
  }
  for (const auto& n : graph.nodes) {
    if (n.is_dummy) continue;
    const double x = n.x + ox - metrics.node_width / 2;
    const double y = n.y + oy - metrics.node_height / 2;
    svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << metrics.node_width << "\" height=\""
        << metrics.node_height << "\" rx=\"6\" fill=\"#e8f0fe\" stroke=\"#345\"/>\n";
    svg << "<text x=\"" << n.x + ox << "\" y=\"" << n.y + oy + 4 << "\" text-anchor=\"middle\">"
        << xml_escape(n.id) << " [" << n.size << "]</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gevi
