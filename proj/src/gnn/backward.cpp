#include "stepgraph/gnn/backward.hpp"

#include <cmath>
#include <cstddef>

#include "stepgraph/error.hpp"

namespace stepgraph::gnn {

Gradients zero_gradients(const GcnModel& model) {
  Gradients g;
  g.layer_weights.reserve(model.layers.size());
  for (const GcnLayer& layer : model.layers) {
    g.layer_weights.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
  }
  g.pool_weight = Matrix::Zero(model.pool.weight.rows(), model.pool.weight.cols());
  g.fc1_weight = Matrix::Zero(model.fc1_weight.rows(), model.fc1_weight.cols());
  g.fc1_bias = Vector::Zero(model.fc1_bias.size());
  g.fc2_weight = Matrix::Zero(model.fc2_weight.rows(), model.fc2_weight.cols());
  g.fc2_bias = Vector::Zero(model.fc2_bias.size());
  return g;
}

void accumulate(Gradients& into, const Gradients& from) {
  for (std::size_t l = 0; l < into.layer_weights.size(); ++l) {
    into.layer_weights[l] += from.layer_weights[l];
  }
  into.pool_weight += from.pool_weight;
  into.fc1_weight += from.fc1_weight;
  into.fc1_bias += from.fc1_bias;
  into.fc2_weight += from.fc2_weight;
  into.fc2_bias += from.fc2_bias;
}

void scale(Gradients& grads, double factor) {
  for (Matrix& w : grads.layer_weights) w *= factor;
  grads.pool_weight *= factor;
  grads.fc1_weight *= factor;
  grads.fc1_bias *= factor;
  grads.fc2_weight *= factor;
  grads.fc2_bias *= factor;
}

namespace {

/// dZ = dH masked by the ReLU activation pattern of Z.
Matrix relu_backward(const Matrix& z, const Matrix& dh) {
  return ((z.array() > 0.0).cast<double>() * dh.array()).matrix();
}

Vector relu_backward(const Vector& z, const Vector& dh) {
  return ((z.array() > 0.0).cast<double>() * dh.array()).matrix();
}

}  // namespace

LossResult loss_and_grads(const GcnModel& model, const Matrix& adj, const Matrix& x,
                          const Vector& degrees, int label) {
  if (label < 0 || label >= model.config.classes) {
    throw Error(ErrorCode::InvalidArgument,
                "label " + std::to_string(label) + " outside the " +
                    std::to_string(model.config.classes) + "-class range");
  }

  const ForwardTrace trace = forward(model, adj, x, degrees);
  LossResult result;
  result.loss = -std::log(trace.probs(label));
  result.predicted = trace.predicted_class();
  if (!std::isfinite(result.loss)) {
    throw Error(ErrorCode::NonFiniteLoss,
                "loss diverged (probability of the true class underflowed)");
  }
  result.grads = zero_gradients(model);
  Gradients& g = result.grads;

  // Softmax + cross-entropy collapse to probs - onehot(label).
  Vector dlogits = trace.probs;
  dlogits(label) -= 1.0;

  g.fc2_weight = dlogits * trace.fc1_post.transpose();
  g.fc2_bias = dlogits;
  const Vector dfc1_post = model.fc2_weight.transpose() * dlogits;
  const Vector dfc1_pre = relu_backward(trace.fc1_pre, dfc1_post);

  g.fc1_weight = dfc1_pre * trace.pooled.transpose();
  g.fc1_bias = dfc1_pre;
  const Vector dpooled = model.fc1_weight.transpose() * dfc1_pre;

  const Matrix& u = trace.activations.back();
  const double n = static_cast<double>(u.rows());
  Matrix du;
  switch (model.config.pooling) {
    case Pooling::Attention: {
      // h = U'a, a = sigmoid(Uc), c = tanh(W m), m = (1/N) U'1.
      const Vector& a = trace.attention_weights;
      const Vector& c = trace.context;
      du = a * dpooled.transpose();
      const Vector da = u * dpooled;
      const Vector ds = (da.array() * a.array() * (1.0 - a.array())).matrix();
      du += ds * c.transpose();
      const Vector dc = u.transpose() * ds;
      const Vector dr = (dc.array() * (1.0 - c.array().square())).matrix();
      const Vector mean = u.colwise().sum().transpose() / n;
      g.pool_weight = dr * mean.transpose();
      const Vector dmean = model.pool.weight.transpose() * dr;
      du.rowwise() += (dmean / n).transpose();
      break;
    }
    case Pooling::Mean:
      du = Matrix::Ones(u.rows(), 1) * (dpooled / n).transpose();
      break;
    case Pooling::DegreeSum:
      du = degrees * dpooled.transpose();
      break;
  }

  // Walk the convolution stack backwards: Z_l = adj * H_{l-1} * W_l.
  Matrix dh = std::move(du);
  for (int l = static_cast<int>(model.layers.size()) - 1; l >= 0; --l) {
    const Matrix dz = relu_backward(trace.pre_activations[l], dh);
    const Matrix& input = (l == 0) ? x : trace.activations[l - 1];
    g.layer_weights[l] = (adj * input).transpose() * dz;
    if (l > 0) {
      dh = adj * dz * model.layers[l].weight.transpose();
    }
  }

  return result;
}

double loss_of(const GcnModel& model, const Matrix& adj, const Matrix& x,
               const Vector& degrees, int label) {
  if (label < 0 || label >= model.config.classes) {
    throw Error(ErrorCode::InvalidArgument,
                "label " + std::to_string(label) + " outside the " +
                    std::to_string(model.config.classes) + "-class range");
  }
  const ForwardTrace trace = forward(model, adj, x, degrees);
  const double loss = -std::log(trace.probs(label));
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::NonFiniteLoss,
                "loss diverged (probability of the true class underflowed)");
  }
  return loss;
}

}  // namespace stepgraph::gnn
