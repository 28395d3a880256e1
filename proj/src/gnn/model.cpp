#include "stepgraph/gnn/model.hpp"

#include <cmath>
#include <cstddef>

#include "stepgraph/error.hpp"
#include "stepgraph/random.hpp"

namespace stepgraph::gnn {

const char* pooling_name(Pooling pooling) {
  switch (pooling) {
    case Pooling::Attention: return "attention";
    case Pooling::Mean: return "mean";
    case Pooling::DegreeSum: return "degree_sum";
  }
  return "attention";
}

Pooling pooling_from_name(const std::string& name) {
  if (name == "attention") return Pooling::Attention;
  if (name == "mean") return Pooling::Mean;
  if (name == "degree_sum") return Pooling::DegreeSum;
  throw Error(ErrorCode::InvalidArgument, "unknown pooling '" + name + "'");
}

namespace {

Matrix glorot_uniform(int rows, int cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / (static_cast<double>(rows) + static_cast<double>(cols)));
  Matrix w(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      w(i, j) = rng.uniform(-bound, bound);
    }
  }
  return w;
}

void validate_config(const ModelConfig& config) {
  if (config.input_dim <= 0) {
    throw Error(ErrorCode::InvalidArgument, "model input dimension must be positive");
  }
  if (config.classes <= 0) {
    throw Error(ErrorCode::InvalidArgument, "model class count must be positive");
  }
  if (config.bottleneck <= 0) {
    throw Error(ErrorCode::InvalidArgument, "model bottleneck width must be positive");
  }
  if (config.gcn_dims.empty()) {
    throw Error(ErrorCode::InvalidArgument, "model needs at least one graph convolution layer");
  }
  for (int d : config.gcn_dims) {
    if (d <= 0) {
      throw Error(ErrorCode::InvalidArgument, "graph convolution widths must be positive");
    }
  }
}

}  // namespace

GcnModel init_params(const ModelConfig& config) {
  validate_config(config);
  Rng rng(config.seed);

  GcnModel model;
  model.config = config;

  int in_dim = config.input_dim;
  for (int out_dim : config.gcn_dims) {
    model.layers.push_back(GcnLayer{glorot_uniform(in_dim, out_dim, rng)});
    in_dim = out_dim;
  }

  const int embed = config.embed_dim();
  model.pool.weight = glorot_uniform(embed, embed, rng);
  model.fc1_weight = glorot_uniform(config.bottleneck, embed, rng);
  model.fc1_bias = Vector::Zero(config.bottleneck);
  model.fc2_weight = glorot_uniform(config.classes, config.bottleneck, rng);
  model.fc2_bias = Vector::Zero(config.classes);
  return model;
}

GcnModel init_params(ModelConfig config, std::uint64_t seed) {
  config.seed = seed;
  return init_params(config);
}

Matrix gcn_forward(const Matrix& adj, const Matrix& h, const GcnLayer& layer) {
  if (adj.rows() != adj.cols() || adj.rows() != h.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "adjacency is " + std::to_string(adj.rows()) + "x" + std::to_string(adj.cols()) +
                    " but features have " + std::to_string(h.rows()) + " rows");
  }
  if (h.cols() != layer.weight.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "features have " + std::to_string(h.cols()) + " columns but layer expects " +
                    std::to_string(layer.weight.rows()));
  }
  return relu(adj * h * layer.weight);
}

AttentionResult attention_pool(const Matrix& u, const AttentionPool& pool) {
  if (u.rows() == 0) {
    throw Error(ErrorCode::EmptyGraph, "cannot pool an empty node embedding matrix");
  }
  if (u.cols() != pool.weight.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "node embeddings have " + std::to_string(u.cols()) +
                    " columns but pooling weight is " + std::to_string(pool.weight.rows()) + "x" +
                    std::to_string(pool.weight.cols()));
  }
  const double n = static_cast<double>(u.rows());
  AttentionResult result;
  const Vector mean = u.colwise().sum().transpose() / n;
  result.context = (pool.weight * mean).array().tanh().matrix();
  result.weights = sigmoid(u * result.context);
  result.pooled = u.transpose() * result.weights;
  return result;
}

Vector mean_pool(const Matrix& u) {
  if (u.rows() == 0) {
    throw Error(ErrorCode::EmptyGraph, "cannot pool an empty node embedding matrix");
  }
  return u.colwise().sum().transpose() / static_cast<double>(u.rows());
}

Vector degree_sum_pool(const Matrix& u, const Vector& degrees) {
  if (u.rows() == 0) {
    throw Error(ErrorCode::EmptyGraph, "cannot pool an empty node embedding matrix");
  }
  if (degrees.size() != u.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "have " + std::to_string(degrees.size()) + " degrees for " +
                    std::to_string(u.rows()) + " nodes");
  }
  return u.transpose() * degrees;
}

Vector softmax(const Vector& logits) {
  const double peak = logits.maxCoeff();
  const Vector exps = (logits.array() - peak).exp().matrix();
  return exps / exps.sum();
}

int ForwardTrace::predicted_class() const {
  int best = 0;
  probs.maxCoeff(&best);
  return best;
}

ForwardTrace forward(const GcnModel& model, const Matrix& adj, const Matrix& x,
                     const Vector& degrees) {
  ForwardTrace trace;
  trace.pre_activations.reserve(model.layers.size());
  trace.activations.reserve(model.layers.size());

  Matrix h = x;
  for (const GcnLayer& layer : model.layers) {
    if (adj.rows() != h.rows() || h.cols() != layer.weight.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "graph convolution dimension mismatch");
    }
    Matrix z = adj * h * layer.weight;
    trace.pre_activations.push_back(z);
    h = relu(z);
    trace.activations.push_back(h);
  }

  switch (model.config.pooling) {
    case Pooling::Attention: {
      AttentionResult att = attention_pool(h, model.pool);
      trace.pooled = std::move(att.pooled);
      trace.context = std::move(att.context);
      trace.attention_weights = std::move(att.weights);
      break;
    }
    case Pooling::Mean:
      trace.pooled = mean_pool(h);
      break;
    case Pooling::DegreeSum:
      trace.pooled = degree_sum_pool(h, degrees);
      break;
  }

  trace.fc1_pre = model.fc1_weight * trace.pooled + model.fc1_bias;
  trace.fc1_post = relu(trace.fc1_pre);
  trace.logits = model.fc2_weight * trace.fc1_post + model.fc2_bias;
  trace.probs = softmax(trace.logits);
  return trace;
}

}  // namespace stepgraph::gnn
