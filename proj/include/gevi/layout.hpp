#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gevi/evolution.hpp"

namespace gevi {

enum class EdgeStyle { solid, dashed };

std::string_view to_string(EdgeStyle style);

struct LayeredNode {
  std::string id;  // group label, or `d<n>` for dummies
  int layer = 0;
  int order = 0;  // position within the layer
  bool is_dummy = false;
  double x = 0.0;
  double y = 0.0;
  std::size_t size = 0;  // member count; 0 for dummies
};

/// One drawn segment. After assign_layers every edge joins layer l to l+1.
struct LayeredEdge {
  std::size_t from = 0;  // node indices
  std::size_t to = 0;
  EdgeStyle style = EdgeStyle::solid;
  std::optional<std::size_t> transition;  // index into the source transition list
};

/// A layered drawing of one hierarchy. Before assign_coordinates x and y are
/// zero; after it, it is the positioned graph the viewer renders.
struct LayeredGraph {
  int hierarchy = -1;
  std::vector<LayeredNode> nodes;
  std::vector<LayeredEdge> edges;

  int min_layer() const;
  int max_layer() const;
  /// Node indices per layer (min_layer first), each sorted by order.
  std::vector<std::vector<std::size_t>> layers() const;
};

using PositionedGraph = LayeredGraph;

/// Input for assign_layers: nodes with preassigned layers and the initial
/// in-layer order given by their position in the list.
struct LayerInput {
  struct Node {
    std::string id;
    int layer = 0;
    std::size_t size = 0;
  };
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    EdgeStyle style = EdgeStyle::solid;
    std::optional<std::size_t> transition;
  };
  int hierarchy = -1;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

/// Places nodes on their layers and replaces every edge spanning more than
/// one layer by a chain through dummy nodes, one per intermediate layer.
/// Throws std::invalid_argument for an edge that does not point to a later
/// layer.
LayeredGraph assign_layers(const LayerInput& input);

/// LayerInput for one hierarchy: layer = slot, initial order = ordinal,
/// dashed style for addition/deletion transitions.
LayerInput hierarchy_input(const EvolutionGraph& graph, const Hierarchy& hierarchy);

/// Pairs of edges between adjacent layers whose endpoints interleave.
std::size_t count_crossings(const LayeredGraph& graph);

struct CrossingReduction {
  std::size_t initial = 0;
  std::size_t final = 0;
  int sweeps = 0;  // down/up iterations actually run
};

/// Median-heuristic ordering: alternating down and up sweeps reorder each
/// layer by the median position of its neighbours in the fixed adjacent
/// layer, each followed by a sifting pass that moves single nodes to their
/// best in-layer position. A run stops early when an iteration does not
/// improve on it; runs start from the given order, its mirror image and
/// fixed-seed shuffles. The best ordering seen is written back into `graph`,
/// so the result never has more crossings than the input.
CrossingReduction reduce_crossings(LayeredGraph& graph, int sweeps = 4);

struct LayoutMetrics {
  double layer_gap = 160.0;  // horizontal distance between slots
  double node_gap = 56.0;    // minimum vertical distance inside a layer
  double node_width = 110.0;
  double node_height = 40.0;
  int passes = 4;  // median placement passes before dummy straightening
};

/// x = layer * layer_gap; y keeps the in-layer order with at least node_gap
/// between neighbours, pulled towards the median of adjacent-layer
/// neighbours (dummies weigh more, which straightens long edges). The
/// smallest y is 0.
PositionedGraph assign_coordinates(LayeredGraph graph, const LayoutMetrics& metrics = {});

/// assign_layers, reduce_crossings and assign_coordinates for one hierarchy.
PositionedGraph layout_hierarchy(const EvolutionGraph& graph, const Hierarchy& hierarchy,
                                 const LayoutMetrics& metrics = {}, int sweeps = 4);

/// Static SVG drawing for headless inspection.
std::string render_svg(const PositionedGraph& graph, const EvolutionGraph& evolution,
                       const LayoutMetrics& metrics = {});

}  // namespace gevi
