#include "stepgraph/gnn/train.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <utility>

#include "stepgraph/error.hpp"
#include "stepgraph/gnn/adjacency.hpp"
#include "stepgraph/random.hpp"

namespace stepgraph::gnn {

GraphExample encode_example(const graph::CadGraph& g,
                            const graph::EntityVocabulary& vocab, int label) {
  GraphExample example;
  example.adj = normalize_adjacency(g);
  example.features = graph::encode_features(g, vocab).matrix;
  example.degrees = loop_degrees(g);
  example.label = label;
  return example;
}

Evaluation evaluate(const GcnModel& model, const std::vector<GraphExample>& examples) {
  Evaluation eval;
  if (examples.empty()) {
    eval.loss = std::numeric_limits<double>::quiet_NaN();
    eval.accuracy = std::numeric_limits<double>::quiet_NaN();
    return eval;
  }
  std::size_t correct = 0;
  for (const GraphExample& example : examples) {
    const ForwardTrace trace = forward(model, example.adj, example.features, example.degrees);
    eval.loss += -std::log(trace.probs(example.label));
    if (trace.predicted_class() == example.label) ++correct;
  }
  eval.loss /= static_cast<double>(examples.size());
  eval.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  return eval;
}

namespace {

/// First and second Adam moments, one slot per parameter tensor.
struct AdamState {
  Gradients m;
  Gradients v;
  long step = 0;
};

void adam_update_tensor(Matrix& param, Matrix& m, Matrix& v, const Matrix& grad,
                        const TrainConfig& config, double rate, double bias1, double bias2) {
  m = config.beta1 * m + (1.0 - config.beta1) * grad;
  v = (config.beta2 * v.array() + (1.0 - config.beta2) * grad.array().square()).matrix();
  const Matrix m_hat = m / bias1;
  const Matrix v_hat = v / bias2;
  param -= (rate * m_hat.array() / (v_hat.array().sqrt() + config.epsilon)).matrix();
}

void adam_update_tensor(Vector& param, Vector& m, Vector& v, const Vector& grad,
                        const TrainConfig& config, double rate, double bias1, double bias2) {
  m = config.beta1 * m + (1.0 - config.beta1) * grad;
  v = (config.beta2 * v.array() + (1.0 - config.beta2) * grad.array().square()).matrix();
  const Vector m_hat = m / bias1;
  const Vector v_hat = v / bias2;
  param -= (rate * m_hat.array() / (v_hat.array().sqrt() + config.epsilon)).matrix();
}

void adam_step(GcnModel& model, AdamState& state, const Gradients& grads,
               const TrainConfig& config, double rate) {
  ++state.step;
  const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    adam_update_tensor(model.layers[l].weight, state.m.layer_weights[l],
                       state.v.layer_weights[l], grads.layer_weights[l], config, rate, bias1,
                       bias2);
  }
  adam_update_tensor(model.pool.weight, state.m.pool_weight, state.v.pool_weight,
                     grads.pool_weight, config, rate, bias1, bias2);
  adam_update_tensor(model.fc1_weight, state.m.fc1_weight, state.v.fc1_weight, grads.fc1_weight,
                     config, rate, bias1, bias2);
  adam_update_tensor(model.fc1_bias, state.m.fc1_bias, state.v.fc1_bias, grads.fc1_bias, config,
                     rate, bias1, bias2);
  adam_update_tensor(model.fc2_weight, state.m.fc2_weight, state.v.fc2_weight, grads.fc2_weight,
                     config, rate, bias1, bias2);
  adam_update_tensor(model.fc2_bias, state.m.fc2_bias, state.v.fc2_bias, grads.fc2_bias, config,
                     rate, bias1, bias2);
}

void validate_config(const TrainConfig& config) {
  if (config.epochs < 0) {
    throw Error(ErrorCode::InvalidArgument, "epoch count must be non-negative");
  }
  if (config.batch_size <= 0) {
    throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  }
  if (config.learning_rate <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  }
  if (config.gamma <= 0.0 || config.gamma >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "scheduler gamma must lie in (0, 1)");
  }
  if (config.window < 1) {
    throw Error(ErrorCode::InvalidArgument, "scheduler window must be at least 1");
  }
}

}  // namespace

TrainResult train(GcnModel model, const std::vector<GraphExample>& train_set,
                  const std::vector<GraphExample>& val_set, const TrainConfig& config) {
  validate_config(config);
  if (train_set.empty()) {
    throw Error(ErrorCode::EmptyTrainSet, "cannot train on an empty example set");
  }

  AdamState state;
  state.m = zero_gradients(model);
  state.v = zero_gradients(model);

  Rng rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  double rate = config.learning_rate;
  std::vector<double> loss_history;  // epochs since the last scheduler trigger

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t correct = 0;
    std::size_t batch_start = 0;
    while (batch_start < order.size()) {
      const std::size_t batch_end =
          std::min(batch_start + static_cast<std::size_t>(config.batch_size), order.size());
      Gradients batch_grads = zero_gradients(model);
      for (std::size_t i = batch_start; i < batch_end; ++i) {
        const GraphExample& example = train_set[order[i]];
        LossResult item = loss_and_grads(model, example.adj, example.features, example.degrees,
                                         example.label);
        epoch_loss += item.loss;
        if (item.predicted == example.label) ++correct;
        accumulate(batch_grads, item.grads);
      }
      scale(batch_grads, 1.0 / static_cast<double>(batch_end - batch_start));
      adam_step(model, state, batch_grads, config, rate);
      batch_start = batch_end;
    }
    epoch_loss /= static_cast<double>(train_set.size());

    const Evaluation val = evaluate(model, val_set);
    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = epoch_loss;
    metrics.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    metrics.val_loss = val.loss;
    metrics.val_accuracy = val.accuracy;
    metrics.learning_rate = rate;
    result.history.push_back(metrics);

    // Loss-window scheduler: compare against the mean of the epochs gathered
    // since the last trigger; a trigger decays the rate and restarts the
    // window so decays cannot cascade off a single bad stretch.
    if (static_cast<int>(loss_history.size()) >= config.window) {
      const auto tail = loss_history.end() - config.window;
      const double mean =
          std::accumulate(tail, loss_history.end(), 0.0) / static_cast<double>(config.window);
      if (epoch_loss > mean) {
        rate *= config.gamma;
        loss_history.clear();
      } else {
        loss_history.push_back(epoch_loss);
      }
    } else {
      loss_history.push_back(epoch_loss);
    }
  }

  result.model = std::move(model);
  return result;
}

void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& history) {
  out.precision(10);
  out << "epoch,train_loss,train_acc,val_loss,val_acc,lr\n";
  for (const EpochMetrics& m : history) {
    out << m.epoch << ',' << m.train_loss << ',' << m.train_accuracy << ',';
    if (std::isnan(m.val_loss)) {
      out << "nan";
    } else {
      out << m.val_loss;
    }
    out << ',';
    if (std::isnan(m.val_accuracy)) {
      out << "nan";
    } else {
      out << m.val_accuracy;
    }
    out << ',' << m.learning_rate << '\n';
  }
}

}  // namespace stepgraph::gnn
