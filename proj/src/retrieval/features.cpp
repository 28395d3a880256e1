#include "stepgraph/retrieval/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "stepgraph/error.hpp"

namespace stepgraph::retrieval {

const char* layer_tag_name(LayerTag tag) {
  switch (tag) {
    case LayerTag::Attention: return "attention";
    case LayerTag::Fc1PreRelu: return "fc1_pre_relu";
    case LayerTag::Fc1PostRelu: return "fc1_post_relu";
    case LayerTag::Fc2: return "fc2";
    case LayerTag::Softmax: return "softmax";
  }
  return "softmax";
}

LayerTag layer_tag_from_name(const std::string& name) {
  for (LayerTag tag : all_layer_tags()) {
    if (name == layer_tag_name(tag)) return tag;
  }
  throw Error(ErrorCode::UnknownLayerTag, "unknown feature layer '" + name + "'");
}

const std::vector<LayerTag>& all_layer_tags() {
  static const std::vector<LayerTag> tags{LayerTag::Attention, LayerTag::Fc1PreRelu,
                                          LayerTag::Fc1PostRelu, LayerTag::Fc2,
                                          LayerTag::Softmax};
  return tags;
}

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Cosine: return "cosine";
    case Metric::HistogramIntersection: return "histogram_intersection";
  }
  return "euclidean";
}

Metric metric_from_name(const std::string& name) {
  for (Metric metric : all_metrics()) {
    if (name == metric_name(metric)) return metric;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown distance metric '" + name + "'");
}

const std::vector<Metric>& all_metrics() {
  static const std::vector<Metric> metrics{Metric::Euclidean, Metric::Cosine,
                                           Metric::HistogramIntersection};
  return metrics;
}

FeatureVector extract_features(const gnn::ForwardTrace& trace, LayerTag tag) {
  FeatureVector fv;
  fv.layer = tag;
  switch (tag) {
    case LayerTag::Attention: fv.values = trace.pooled; break;
    case LayerTag::Fc1PreRelu: fv.values = trace.fc1_pre; break;
    case LayerTag::Fc1PostRelu: fv.values = trace.fc1_post; break;
    case LayerTag::Fc2: fv.values = trace.logits; break;
    case LayerTag::Softmax: fv.values = trace.probs; break;
  }
  return fv;
}

FeatureVector extract_features(const gnn::GcnModel& model, const gnn::GraphExample& example,
                               LayerTag tag) {
  const gnn::ForwardTrace trace =
      gnn::forward(model, example.adj, example.features, example.degrees);
  FeatureVector fv = extract_features(trace, tag);
  fv.label = example.label;
  return fv;
}

double distance(const Vector& a, const Vector& b, Metric metric) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "vectors of length " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " are not comparable");
  }
  switch (metric) {
    case Metric::Euclidean:
      return (a - b).norm();
    case Metric::Cosine: {
      const double na = a.norm();
      const double nb = b.norm();
      if (na == 0.0 || nb == 0.0) {
        throw Error(ErrorCode::ZeroVector, "cosine distance undefined for a zero vector");
      }
      // identical vectors can undershoot zero by an ulp
      return std::max(0.0, 1.0 - a.dot(b) / (na * nb));
    }
    case Metric::HistogramIntersection: {
      if ((a.array() < 0.0).any() || (b.array() < 0.0).any()) {
        throw Error(ErrorCode::NegativeEntries,
                    "histogram intersection requires non-negative entries");
      }
      const double denom = std::min(a.sum(), b.sum());
      if (denom == 0.0) return 1.0;
      return std::max(0.0, 1.0 - a.cwiseMin(b).sum() / denom);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled distance metric");
}

double distance(const FeatureVector& a, const FeatureVector& b, Metric metric) {
  return distance(a.values, b.values, metric);
}

void write_features_csv(std::ostream& out, const std::vector<FeatureVector>& features) {
  out.precision(17);
  const Eigen::Index width = features.empty() ? 0 : features.front().values.size();
  out << "path,label,layer";
  for (Eigen::Index i = 0; i < width; ++i) out << ",v" << i;
  out << '\n';
  for (const FeatureVector& fv : features) {
    out << fv.model_path << ',' << fv.label << ',' << layer_tag_name(fv.layer);
    for (Eigen::Index i = 0; i < fv.values.size(); ++i) out << ',' << fv.values(i);
    out << '\n';
  }
}

}  // namespace stepgraph::retrieval
