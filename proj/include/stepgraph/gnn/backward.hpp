#pragma once

#include <vector>

#include "stepgraph/gnn/model.hpp"
#include "stepgraph/linalg.hpp"

namespace stepgraph::gnn {

/// Parameter-shaped gradient container (mirrors GcnModel).
struct Gradients {
  std::vector<Matrix> layer_weights;
  Matrix pool_weight;
  Matrix fc1_weight;
  Vector fc1_bias;
  Matrix fc2_weight;
  Vector fc2_bias;
};

Gradients zero_gradients(const GcnModel& model);
void accumulate(Gradients& into, const Gradients& from);
void scale(Gradients& grads, double factor);

struct LossResult {
  double loss = 0.0;
  int predicted = -1;
  Gradients grads;
};

/// Cross-entropy loss -log probs[label] with analytic gradients for every
/// parameter; the pooling-weight gradient is zero under the mean and
/// degree-sum baselines. Throws NonFiniteLoss when the loss diverges.
LossResult loss_and_grads(const GcnModel& model, const Matrix& adj, const Matrix& x,
                          const Vector& degrees, int label);

/// Loss only (no gradients) for validation passes.
double loss_of(const GcnModel& model, const Matrix& adj, const Matrix& x,
               const Vector& degrees, int label);

}  // namespace stepgraph::gnn
