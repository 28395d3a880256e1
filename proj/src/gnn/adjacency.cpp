#include "stepgraph/gnn/adjacency.hpp"

#include <cmath>

#include "stepgraph/error.hpp"

namespace stepgraph::gnn {

namespace {

Matrix self_looped_binary(const graph::CadGraph& graph) {
  const Eigen::Index n = static_cast<Eigen::Index>(graph.nodes.size());
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "graph has no nodes");
  Matrix a = Matrix::Identity(n, n);
  for (const auto& [src, dst] : graph.edges) {
    a(src, dst) = 1.0;
    a(dst, src) = 1.0;
  }
  return a;
}

}  // namespace

Matrix normalize_adjacency(const graph::CadGraph& graph) {
  Matrix a = self_looped_binary(graph);
  const Eigen::Index n = a.rows();
  Vector inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i)
    inv_sqrt(i) = 1.0 / std::sqrt(a.row(i).sum());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = inv_sqrt(i) * a(i, j) * inv_sqrt(j);
  return out;
}

Vector loop_degrees(const graph::CadGraph& graph) {
  return self_looped_binary(graph).rowwise().sum();
}

}  // namespace stepgraph::gnn
