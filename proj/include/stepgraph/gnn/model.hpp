#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stepgraph/linalg.hpp"

namespace stepgraph::gnn {

enum class Pooling { Attention, Mean, DegreeSum };

const char* pooling_name(Pooling pooling);
Pooling pooling_from_name(const std::string& name);

struct ModelConfig {
  int input_dim = 0;                     // |vocabulary|
  std::vector<int> gcn_dims{64, 32, 32};
  int bottleneck = 32;                   // first FC width
  int classes = 0;
  Pooling pooling = Pooling::Attention;
  std::uint64_t seed = 0;

  int embed_dim() const { return gcn_dims.back(); }
  bool operator==(const ModelConfig&) const = default;
};

struct GcnLayer {
  Matrix weight;  // D_in x D_out, ReLU activation
};

struct AttentionPool {
  Matrix weight;  // D x D
};

struct GcnModel {
  ModelConfig config;
  std::vector<GcnLayer> layers;
  AttentionPool pool;
  Matrix fc1_weight;  // bottleneck x D
  Vector fc1_bias;
  Matrix fc2_weight;  // classes x bottleneck
  Vector fc2_bias;
};

/// Glorot-uniform weights, zero biases, deterministic in config.seed.
GcnModel init_params(const ModelConfig& config);
GcnModel init_params(ModelConfig config, std::uint64_t seed);

/// sigma(adj * h * W), sigma = ReLU. Throws DimensionMismatch.
Matrix gcn_forward(const Matrix& adj, const Matrix& h, const GcnLayer& layer);

struct AttentionResult {
  Vector pooled;   // h
  Vector context;  // c
  Vector weights;  // sigmoid(u_n . c) per node
};

/// h = sum_n sigmoid(u_n . c) u_n with c = tanh((1/N) W sum_n u_n).
AttentionResult attention_pool(const Matrix& u, const AttentionPool& pool);

Vector mean_pool(const Matrix& u);
Vector degree_sum_pool(const Matrix& u, const Vector& degrees);

/// Every intermediate the loss, feature extraction and retrieval need.
struct ForwardTrace {
  std::vector<Matrix> pre_activations;   // Z_l = adj * H_{l-1} * W_l
  std::vector<Matrix> activations;       // H_l = ReLU(Z_l)
  Vector pooled;                         // graph embedding
  Vector context;                        // attention c (empty otherwise)
  Vector attention_weights;              // per-node weights (empty otherwise)
  Vector fc1_pre;                        // before ReLU
  Vector fc1_post;                       // after ReLU
  Vector logits;                         // fc2 output
  Vector probs;                          // softmax(logits)

  int predicted_class() const;
};

ForwardTrace forward(const GcnModel& model, const Matrix& adj, const Matrix& x,
                     const Vector& degrees);

Vector softmax(const Vector& logits);

}  // namespace stepgraph::gnn
