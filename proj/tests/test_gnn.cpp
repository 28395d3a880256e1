#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "stepgraph/gnn/adjacency.hpp"
#include "stepgraph/gnn/backward.hpp"
#include "stepgraph/gnn/model.hpp"
#include "stepgraph/graph/cad_graph.hpp"
#include "stepgraph/graph/vocabulary.hpp"

using namespace stepgraph;
using namespace stepgraph::gnn;

namespace {

graph::CadGraph make_graph(int nodes,
                           const std::vector<std::pair<int, int>>& edges,
                           const std::vector<std::string>& types = {}) {
  graph::CadGraph g;
  for (int i = 0; i < nodes; ++i) {
    graph::GraphNode node;
    node.instance_id = i + 1;
    node.type_token = types.empty() ? "T" : types[i];
    g.nodes.push_back(std::move(node));
  }
  g.edges = edges;
  return g;
}

/// Independent re-derivation of the normalized adjacency: undirected edge
/// set, self-loops, then a_ij / (sqrt(d_i) * sqrt(d_j)).
Matrix adjacency_oracle(int n, const std::vector<std::pair<int, int>>& edges) {
  std::set<std::pair<int, int>> undirected;
  for (int i = 0; i < n; ++i) undirected.insert({i, i});
  for (const auto& [s, d] : edges) {
    undirected.insert({s, d});
    undirected.insert({d, s});
  }
  std::vector<double> degree(n, 0.0);
  for (const auto& [s, d] : undirected) degree[s] += 1.0;
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [s, d] : undirected)
    out(s, d) = 1.0 / (std::sqrt(degree[s]) * std::sqrt(degree[d]));
  return out;
}

}  // namespace

TEST_CASE("normalized adjacency hand cases") {
  SUBCASE("single node") {
    const Matrix a = normalize_adjacency(make_graph(1, {}));
    REQUIRE(a.rows() == 1);
    CHECK(a(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("two connected nodes") {
    const Matrix a = normalize_adjacency(make_graph(2, {{0, 1}}));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(a(i, j) == doctest::Approx(0.5));
  }
  SUBCASE("path of three") {
    const Matrix a = normalize_adjacency(make_graph(3, {{0, 1}, {1, 2}}));
    CHECK(a(0, 0) == doctest::Approx(0.5));
    CHECK(a(1, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(a(2, 2) == doctest::Approx(0.5));
    CHECK(a(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)));
    CHECK(a(1, 0) == doctest::Approx(1.0 / std::sqrt(6.0)));
    CHECK(a(1, 2) == doctest::Approx(1.0 / std::sqrt(6.0)));
    CHECK(a(0, 2) == doctest::Approx(0.0));
  }
}

TEST_CASE("direction is discarded and parallel edges collapse") {
  const Matrix forward_edge = normalize_adjacency(make_graph(2, {{0, 1}}));
  const Matrix reverse_edge = normalize_adjacency(make_graph(2, {{1, 0}}));
  const Matrix doubled = normalize_adjacency(make_graph(2, {{0, 1}, {0, 1}}));
  CHECK((forward_edge - reverse_edge).cwiseAbs().maxCoeff() == 0.0);
  CHECK((forward_edge - doubled).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalized adjacency matches an independent oracle") {
  const std::vector<std::pair<int, int>> edges{
      {0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {4, 0}, {2, 1}};
  const Matrix got = normalize_adjacency(make_graph(5, edges));
  const Matrix want = adjacency_oracle(5, edges);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(got.isApprox(got.transpose(), 1e-15));
}

TEST_CASE("empty graph refuses an adjacency") {
  try {
    normalize_adjacency(graph::CadGraph{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyGraph);
  }
}

TEST_CASE("loop degrees count neighbours plus the self-loop") {
  const Vector d = loop_degrees(make_graph(3, {{0, 1}, {1, 2}}));
  REQUIRE(d.size() == 3);
  CHECK(d(0) == doctest::Approx(2.0));
  CHECK(d(1) == doctest::Approx(3.0));
  CHECK(d(2) == doctest::Approx(2.0));
}

TEST_CASE("gcn layer applies propagation then ReLU") {
  Matrix adj(2, 2);
  adj << 0.5, 0.5, 0.5, 0.5;
  const Matrix h = Matrix::Identity(2, 2);
  GcnLayer layer;
  layer.weight = Matrix(2, 2);
  layer.weight << 1.0, -1.0, 2.0, 0.0;

  const Matrix out = gcn_forward(adj, h, layer);
  REQUIRE(out.rows() == 2);
  REQUIRE(out.cols() == 2);
  // adj * I * W = [[1.5, -0.5], [1.5, -0.5]], clipped at zero
  CHECK(out(0, 0) == doctest::Approx(1.5));
  CHECK(out(0, 1) == doctest::Approx(0.0));
  CHECK(out(1, 0) == doctest::Approx(1.5));
  CHECK(out(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("gcn layer rejects mismatched widths") {
  const Matrix adj = Matrix::Identity(2, 2);
  const Matrix h = Matrix::Ones(2, 3);
  GcnLayer layer;
  layer.weight = Matrix::Ones(4, 2);  // expects h with 4 columns
  try {
    gcn_forward(adj, h, layer);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("attention pooling single-node hand case") {
  Matrix u(1, 2);
  u << 1.0, 0.0;
  AttentionPool pool;
  pool.weight = Matrix::Identity(2, 2);

  const AttentionResult r = attention_pool(u, pool);
  const double c0 = std::tanh(1.0);
  const double w0 = 1.0 / (1.0 + std::exp(-c0));
  CHECK(r.context(0) == doctest::Approx(c0));
  CHECK(r.context(1) == doctest::Approx(0.0));
  REQUIRE(r.weights.size() == 1);
  CHECK(r.weights(0) == doctest::Approx(w0));
  CHECK(r.pooled(0) == doctest::Approx(w0));
  CHECK(r.pooled(1) == doctest::Approx(0.0));
}

TEST_CASE("attention weights sit at one half for zero embeddings") {
  const Matrix u = Matrix::Zero(3, 4);
  AttentionPool pool;
  pool.weight = Matrix::Identity(4, 4);
  const AttentionResult r = attention_pool(u, pool);
  REQUIRE(r.weights.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(r.weights(i) == doctest::Approx(0.5));
  CHECK(r.pooled.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("attention weights are not normalized to one") {
  Matrix u(2, 2);
  u << 1.0, 0.0, 1.0, 0.0;
  AttentionPool pool;
  pool.weight = Matrix::Identity(2, 2);
  const AttentionResult r = attention_pool(u, pool);
  const double w = 1.0 / (1.0 + std::exp(-std::tanh(1.0)));

  CHECK(r.weights.sum() == doctest::Approx(2.0 * w));
  // the pooled vector doubles with the duplicate row instead of averaging
  CHECK(r.pooled(0) == doctest::Approx(2.0 * w));
}

TEST_CASE("mean and degree-sum pooling baselines") {
  Matrix u(2, 2);
  u << 1.0, 2.0, 3.0, 4.0;
  const Vector mean = mean_pool(u);
  CHECK(mean(0) == doctest::Approx(2.0));
  CHECK(mean(1) == doctest::Approx(3.0));

  Matrix basis(2, 2);
  basis << 1.0, 0.0, 0.0, 1.0;
  Vector degrees(2);
  degrees << 2.0, 3.0;
  const Vector weighted = degree_sum_pool(basis, degrees);
  CHECK(weighted(0) == doctest::Approx(2.0));
  CHECK(weighted(1) == doctest::Approx(3.0));
}

TEST_CASE("softmax properties") {
  Vector uniform(4);
  uniform << 3.0, 3.0, 3.0, 3.0;
  const Vector p = softmax(uniform);
  for (int i = 0; i < 4; ++i) CHECK(p(i) == doctest::Approx(0.25));

  Vector z(3);
  z << 0.5, -1.0, 2.0;
  Vector shifted = z;
  shifted.array() += 100.0;
  CHECK(softmax(z).isApprox(softmax(shifted), 1e-12));
  CHECK(softmax(z).sum() == doctest::Approx(1.0));

  Vector huge(2);
  huge << 1000.0, 0.0;
  const Vector q = softmax(huge);
  CHECK(std::isfinite(q(0)));
  CHECK(q(0) == doctest::Approx(1.0));
}

TEST_CASE("init_params shapes, bounds, zero biases and determinism") {
  ModelConfig config;
  config.input_dim = 7;
  config.gcn_dims = {5, 4, 3};
  config.bottleneck = 6;
  config.classes = 4;
  config.seed = 99;

  const GcnModel m = init_params(config);
  REQUIRE(m.layers.size() == 3);
  CHECK(m.layers[0].weight.rows() == 7);
  CHECK(m.layers[0].weight.cols() == 5);
  CHECK(m.layers[1].weight.rows() == 5);
  CHECK(m.layers[1].weight.cols() == 4);
  CHECK(m.layers[2].weight.rows() == 4);
  CHECK(m.layers[2].weight.cols() == 3);
  CHECK(m.pool.weight.rows() == 3);
  CHECK(m.pool.weight.cols() == 3);
  CHECK(m.fc1_weight.rows() == 6);
  CHECK(m.fc1_weight.cols() == 3);
  CHECK(m.fc2_weight.rows() == 4);
  CHECK(m.fc2_weight.cols() == 6);

  CHECK(m.fc1_bias.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.fc2_bias.cwiseAbs().maxCoeff() == 0.0);

  const double bound0 = std::sqrt(6.0 / (7 + 5));
  CHECK(m.layers[0].weight.cwiseAbs().maxCoeff() <= bound0);
  CHECK(m.layers[0].weight.cwiseAbs().maxCoeff() > 0.0);
  const double bound_fc2 = std::sqrt(6.0 / (6 + 4));
  CHECK(m.fc2_weight.cwiseAbs().maxCoeff() <= bound_fc2);

  const GcnModel same = init_params(config);
  CHECK(same.layers[0].weight == m.layers[0].weight);
  CHECK(same.fc2_weight == m.fc2_weight);

  const GcnModel other = init_params(config, 100);
  CHECK(other.layers[0].weight != m.layers[0].weight);
}

namespace {

struct Fixture {
  graph::CadGraph g;
  Matrix adj;
  Matrix x;
  Vector degrees;
  GcnModel model;

  explicit Fixture(Pooling pooling) {
    g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}}, {"A", "B", "C", "A"});
    adj = normalize_adjacency(g);
    degrees = loop_degrees(g);
    const graph::EntityVocabulary vocab =
        graph::build_vocabulary(std::vector<graph::CadGraph>{g});
    x = graph::encode_features(g, vocab).matrix;

    ModelConfig config;
    config.input_dim = static_cast<int>(vocab.size());
    config.gcn_dims = {5, 3};
    config.bottleneck = 3;
    config.classes = 2;
    config.pooling = pooling;
    config.seed = 2024;
    model = init_params(config);
  }
};

double max_rel_err(const Matrix& analytic, const Matrix& numeric) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      const double denom =
          std::max(1e-6, std::abs(analytic(i, j)) + std::abs(numeric(i, j)));
      worst = std::max(worst, std::abs(analytic(i, j) - numeric(i, j)) / denom);
    }
  }
  return worst;
}

/// Central finite differences over every entry of one parameter matrix.
Matrix fd_matrix(GcnModel& model, Matrix& param, const Matrix& adj,
                 const Matrix& x, const Vector& degrees, int label) {
  const double eps = 1e-5;
  Matrix out(param.rows(), param.cols());
  for (Eigen::Index i = 0; i < param.rows(); ++i) {
    for (Eigen::Index j = 0; j < param.cols(); ++j) {
      const double saved = param(i, j);
      param(i, j) = saved + eps;
      const double up = loss_of(model, adj, x, degrees, label);
      param(i, j) = saved - eps;
      const double down = loss_of(model, adj, x, degrees, label);
      param(i, j) = saved;
      out(i, j) = (up - down) / (2.0 * eps);
    }
  }
  return out;
}

Vector fd_vector(GcnModel& model, Vector& param, const Matrix& adj,
                 const Matrix& x, const Vector& degrees, int label) {
  const double eps = 1e-5;
  Vector out(param.size());
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double saved = param(i);
    param(i) = saved + eps;
    const double up = loss_of(model, adj, x, degrees, label);
    param(i) = saved - eps;
    const double down = loss_of(model, adj, x, degrees, label);
    param(i) = saved;
    out(i) = (up - down) / (2.0 * eps);
  }
  return out;
}

void check_gradients(Pooling pooling) {
  Fixture f(pooling);
  const int label = 1;
  const LossResult result = loss_and_grads(f.model, f.adj, f.x, f.degrees, label);
  CHECK(result.loss == doctest::Approx(
                           loss_of(f.model, f.adj, f.x, f.degrees, label)));

  for (std::size_t l = 0; l < f.model.layers.size(); ++l) {
    const Matrix numeric = fd_matrix(f.model, f.model.layers[l].weight, f.adj,
                                     f.x, f.degrees, label);
    CHECK(max_rel_err(result.grads.layer_weights[l], numeric) < 1e-4);
  }

  const Matrix pool_numeric =
      fd_matrix(f.model, f.model.pool.weight, f.adj, f.x, f.degrees, label);
  CHECK(max_rel_err(result.grads.pool_weight, pool_numeric) < 1e-4);
  if (pooling != Pooling::Attention) {
    CHECK(result.grads.pool_weight.cwiseAbs().maxCoeff() == 0.0);
  }

  CHECK(max_rel_err(result.grads.fc1_weight,
                    fd_matrix(f.model, f.model.fc1_weight, f.adj, f.x,
                              f.degrees, label)) < 1e-4);
  CHECK(max_rel_err(result.grads.fc2_weight,
                    fd_matrix(f.model, f.model.fc2_weight, f.adj, f.x,
                              f.degrees, label)) < 1e-4);
  CHECK(max_rel_err(result.grads.fc1_bias,
                    fd_vector(f.model, f.model.fc1_bias, f.adj, f.x, f.degrees,
                              label)) < 1e-4);
  CHECK(max_rel_err(result.grads.fc2_bias,
                    fd_vector(f.model, f.model.fc2_bias, f.adj, f.x, f.degrees,
                              label)) < 1e-4);
}

}  // namespace

TEST_CASE("analytic gradients match finite differences (attention)") {
  check_gradients(Pooling::Attention);
}

TEST_CASE("analytic gradients match finite differences (mean)") {
  check_gradients(Pooling::Mean);
}

TEST_CASE("analytic gradients match finite differences (degree sum)") {
  check_gradients(Pooling::DegreeSum);
}

TEST_CASE("forward trace exposes every stage with consistent shapes") {
  Fixture f(Pooling::Attention);
  const ForwardTrace trace = forward(f.model, f.adj, f.x, f.degrees);

  REQUIRE(trace.pre_activations.size() == 2);
  REQUIRE(trace.activations.size() == 2);
  CHECK(trace.activations[0].rows() == 4);
  CHECK(trace.activations[0].cols() == 5);
  CHECK(trace.activations[1].cols() == 3);
  CHECK(trace.pooled.size() == 3);
  CHECK(trace.context.size() == 3);
  CHECK(trace.attention_weights.size() == 4);
  CHECK(trace.fc1_pre.size() == 3);
  CHECK(trace.fc1_post.size() == 3);
  CHECK(trace.logits.size() == 2);
  CHECK(trace.probs.size() == 2);
  CHECK(trace.probs.sum() == doctest::Approx(1.0));
  CHECK(trace.fc1_post == relu(trace.fc1_pre));
  CHECK(trace.predicted_class() >= 0);
  CHECK(trace.predicted_class() <= 1);

  Fixture m(Pooling::Mean);
  const ForwardTrace mean_trace = forward(m.model, m.adj, m.x, m.degrees);
  CHECK(mean_trace.context.size() == 0);
  CHECK(mean_trace.attention_weights.size() == 0);
}

TEST_CASE("graph embedding is invariant to node permutation") {
  // same topology, nodes listed in a different order
  const graph::CadGraph original =
      make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}},
                 {"A", "B", "C", "B", "A"});

  std::vector<int> perm{3, 0, 4, 1, 2};  // new index of old node i
  graph::CadGraph shuffled;
  shuffled.nodes.resize(5);
  for (int i = 0; i < 5; ++i) {
    shuffled.nodes[perm[i]] = original.nodes[i];
    shuffled.nodes[perm[i]].instance_id = perm[i] + 1;
  }
  for (const auto& [s, d] : original.edges)
    shuffled.edges.emplace_back(perm[s], perm[d]);

  const graph::EntityVocabulary vocab =
      graph::build_vocabulary(std::vector<graph::CadGraph>{original});

  ModelConfig config;
  config.input_dim = static_cast<int>(vocab.size());
  config.gcn_dims = {6, 4};
  config.bottleneck = 4;
  config.classes = 3;
  config.seed = 5;

  for (Pooling pooling : {Pooling::Attention, Pooling::Mean, Pooling::DegreeSum}) {
    config.pooling = pooling;
    const GcnModel model = init_params(config);

    const ForwardTrace a =
        forward(model, normalize_adjacency(original),
                graph::encode_features(original, vocab).matrix,
                loop_degrees(original));
    const ForwardTrace b =
        forward(model, normalize_adjacency(shuffled),
                graph::encode_features(shuffled, vocab).matrix,
                loop_degrees(shuffled));

    CHECK(a.pooled.isApprox(b.pooled, 1e-10));
    CHECK(a.probs.isApprox(b.probs, 1e-10));
  }
}

TEST_CASE("gradient containers accumulate and scale") {
  Fixture f(Pooling::Attention);
  const LossResult one = loss_and_grads(f.model, f.adj, f.x, f.degrees, 0);

  Gradients sum = zero_gradients(f.model);
  accumulate(sum, one.grads);
  accumulate(sum, one.grads);
  scale(sum, 0.5);

  CHECK(sum.fc2_weight.isApprox(one.grads.fc2_weight, 1e-12));
  CHECK(sum.layer_weights[0].isApprox(one.grads.layer_weights[0], 1e-12));
  CHECK(sum.pool_weight.isApprox(one.grads.pool_weight, 1e-12));
  CHECK(sum.fc1_bias.isApprox(one.grads.fc1_bias, 1e-12));
}

TEST_CASE("loss_and_grads rejects an out-of-range label") {
  Fixture f(Pooling::Attention);
  CHECK_THROWS_AS(loss_and_grads(f.model, f.adj, f.x, f.degrees, 7), Error);
  CHECK_THROWS_AS(loss_and_grads(f.model, f.adj, f.x, f.degrees, -1), Error);
}
