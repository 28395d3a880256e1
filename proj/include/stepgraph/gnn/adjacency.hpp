#pragma once

#include "stepgraph/graph/cad_graph.hpp"
#include "stepgraph/linalg.hpp"

namespace stepgraph::gnn {

/// Symmetric degree-normalized adjacency with self-loops. Edge direction is
/// discarded and parallel edges collapse to a single binary entry before
/// normalization. Throws EmptyGraph on a node-less graph.
Matrix normalize_adjacency(const graph::CadGraph& graph);

/// Node degrees of the self-looped binary adjacency (row sums of A + I);
/// weights for the degree-sum pooling baseline.
Vector loop_degrees(const graph::CadGraph& graph);

}  // namespace stepgraph::gnn
