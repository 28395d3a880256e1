#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stepgraph/gnn/model.hpp"
#include "stepgraph/gnn/train.hpp"
#include "stepgraph/linalg.hpp"

namespace stepgraph::retrieval {

/// Intermediate layers a feature vector can be read from.
enum class LayerTag { Attention, Fc1PreRelu, Fc1PostRelu, Fc2, Softmax };

const char* layer_tag_name(LayerTag tag);
LayerTag layer_tag_from_name(const std::string& name);  // throws UnknownLayerTag
const std::vector<LayerTag>& all_layer_tags();

struct FeatureVector {
  LayerTag layer = LayerTag::Softmax;
  Vector values;
  std::string model_path;  // originating STEP file, may be empty
  int label = -1;          // class index, -1 when unknown
};

/// Pick the tagged intermediate out of an existing forward trace.
FeatureVector extract_features(const gnn::ForwardTrace& trace, LayerTag tag);

/// Run the model forward and extract in one step.
FeatureVector extract_features(const gnn::GcnModel& model, const gnn::GraphExample& example,
                               LayerTag tag);

enum class Metric { Euclidean, Cosine, HistogramIntersection };

const char* metric_name(Metric metric);
Metric metric_from_name(const std::string& name);  // throws InvalidArgument
const std::vector<Metric>& all_metrics();

/// euclidean = ||a-b||; cosine = 1 - a.b/(|a||b|), ZeroVector on a zero input;
/// histogram intersection = 1 - sum(min(a_i,b_i))/min(sum a, sum b), requiring
/// non-negative entries (NegativeEntries otherwise) and defined as 1 when
/// either vector sums to zero. LengthMismatch on unequal lengths.
double distance(const Vector& a, const Vector& b, Metric metric);
double distance(const FeatureVector& a, const FeatureVector& b, Metric metric);

/// CSV: path,label,layer,v0..v{D-1} with a header row.
void write_features_csv(std::ostream& out, const std::vector<FeatureVector>& features);

}  // namespace stepgraph::retrieval
