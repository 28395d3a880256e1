#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stepgraph/gnn/backward.hpp"
#include "stepgraph/gnn/model.hpp"
#include "stepgraph/graph/cad_graph.hpp"
#include "stepgraph/graph/vocabulary.hpp"
#include "stepgraph/linalg.hpp"

namespace stepgraph::gnn {

/// A graph prepared for the network: normalized adjacency, one-hot features,
/// self-looped degrees, and the class label (-1 when unlabeled).
struct GraphExample {
  Matrix adj;
  Matrix features;
  Vector degrees;
  int label = -1;
};

GraphExample encode_example(const graph::CadGraph& g,
                            const graph::EntityVocabulary& vocab, int label = -1);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 16;
  double learning_rate = 0.0005;
  double gamma = 0.1;  // factor applied on a scheduler trigger
  int window = 6;      // epochs of loss history behind a trigger
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
};

struct EpochMetrics {
  int epoch = 0;           // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;   // NaN when the validation split is empty
  double val_accuracy = 0.0;
  double learning_rate = 0.0;  // rate in effect during this epoch
};

struct TrainResult {
  GcnModel model;
  std::vector<EpochMetrics> history;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean loss and accuracy over a labeled example set.
Evaluation evaluate(const GcnModel& model, const std::vector<GraphExample>& examples);

/// Mini-batch Adam training with the loss-window learning-rate scheduler:
/// when an epoch's mean train loss exceeds the mean of the previous `window`
/// epochs' losses, the rate is multiplied by `gamma` and the history window
/// restarts, so a second decay needs `window` fresh epochs behind it.
/// Deterministic in (config.seed, example order). Throws EmptyTrainSet.
TrainResult train(GcnModel model, const std::vector<GraphExample>& train_set,
                  const std::vector<GraphExample>& val_set, const TrainConfig& config);

/// CSV with header: epoch,train_loss,train_acc,val_loss,val_acc,lr.
void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& history);

}  // namespace stepgraph::gnn
