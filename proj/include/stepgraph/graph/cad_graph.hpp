#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stepgraph/step/parser.hpp"

namespace stepgraph::graph {

struct GraphNode {
  long long instance_id = 0;
  std::string type_token;  // entity type; complex instances use A+B+C (sorted)
  std::vector<std::string> attrs;  // non-reference arguments, raw text
  bool operator==(const GraphNode&) const = default;
};

/// Directed multigraph over entity instances. Node order is ascending
/// instance id; edges keep multiplicity.
struct CadGraph {
  std::vector<GraphNode> nodes;
  std::vector<std::pair<int, int>> edges;  // (source index, target index)
  std::string source_path;
  std::optional<int> label;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
};

struct BuildStats {
  std::size_t dangling_dropped = 0;
};

/// Composite token for a complex instance: member types sorted, joined by '+'.
std::string type_token_for(const step::EntityInstance& instance);

/// One node per DATA-section instance, one edge per resolvable Reference
/// occurrence. Dangling references are dropped and counted in stats.
CadGraph build_graph(const step::StepFile& file, BuildStats* stats = nullptr);

struct DecomposeResult {
  std::vector<CadGraph> components;
  /// True when no root matched and the whole graph was returned instead.
  bool used_fallback = false;
};

/// One sub-graph per node whose type is in root_types, holding the nodes
/// reachable from that root along directed edges (induced edges, with
/// multiplicity). Sub-graphs may overlap.
DecomposeResult decompose_assembly(
    const CadGraph& graph,
    const std::vector<std::string>& root_types = {"PRODUCT_DEFINITION"});

struct ClassNodeStats {
  int class_id = 0;
  std::string class_name;
  std::size_t model_count = 0;
  double mean_nodes = 0.0;
  double variance_nodes = 0.0;  // population variance
};

struct CorpusStats {
  std::vector<ClassNodeStats> per_class;  // ascending class_id
  std::size_t total_models = 0;
  std::size_t total_nodes = 0;
};

/// Per-class mean and population variance of node counts.
/// Input: (class_id, class_name, node_count) per model.
CorpusStats graph_stats(
    const std::vector<std::tuple<int, std::string, std::size_t>>& models);

}  // namespace stepgraph::graph
