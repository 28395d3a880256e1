#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stepgraph/gnn/checkpoint.hpp"
#include "stepgraph/gnn/train.hpp"
#include "stepgraph/graph/cad_graph.hpp"
#include "stepgraph/pipeline/manifest.hpp"
#include "stepgraph/pipeline/split.hpp"
#include "stepgraph/retrieval/ranking.hpp"

namespace stepgraph::pipeline {

/// One knob set for a full run; the ablation axes are bottleneck and pooling.
struct ExperimentConfig {
  int epochs = 50;
  int batch_size = 16;
  double learning_rate = 0.0005;
  double gamma = 0.1;
  int window = 6;
  int bottleneck = 32;
  gnn::Pooling pooling = gnn::Pooling::Attention;
  std::vector<int> gcn_dims{64, 32, 32};
  std::uint64_t seed = 0;  // drives split, init and batch shuffling
};

struct LoadedCorpus {
  std::vector<graph::CadGraph> graphs;  // parallel to manifest.entries
};

/// Parses and builds every manifest entry; errors gain the file path.
LoadedCorpus load_corpus(const DatasetManifest& manifest,
                         const std::filesystem::path& workspace);

/// Encodes every graph under the vocabulary, labels from the manifest.
std::vector<gnn::GraphExample> encode_corpus(const LoadedCorpus& corpus,
                                             const DatasetManifest& manifest,
                                             const graph::EntityVocabulary& vocab);

struct EvalOutcome {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // rows = true class
  std::vector<double> precision;                    // per class
  std::vector<double> recall;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
};

/// Accuracy, loss, confusion matrix and macro precision/recall in one pass.
EvalOutcome evaluate_split(const gnn::GcnModel& model,
                           const std::vector<gnn::GraphExample>& examples, int classes);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> class_names;
  SplitCounts splits;
  std::size_t vocabulary_size = 0;
  std::vector<gnn::EpochMetrics> epochs;
  EvalOutcome test;
};

struct ExperimentResult {
  ExperimentReport report;
  gnn::Checkpoint checkpoint;
  SplitAssignment split;
};

/// convert -> split -> train-split vocabulary -> train -> test evaluation.
/// Deterministic in (manifest, workspace contents, config).
ExperimentResult run_classification_experiment(const DatasetManifest& manifest,
                                               const std::filesystem::path& workspace,
                                               const ExperimentConfig& config);

/// Sorted-key JSON snapshot of the report; no timestamps, byte-stable.
void write_report_json(std::ostream& out, const ExperimentReport& report);

struct RetrievalCell {
  retrieval::Metric metric = retrieval::Metric::Euclidean;
  retrieval::LayerTag layer = retrieval::LayerTag::Softmax;
  bool ok = false;
  std::string status;  // "ok" or the error code that stopped the cell
  double map = 0.0;
};

struct RetrievalReport {
  std::vector<RetrievalCell> cells;  // metric-major 3x5 grid
  int best_cell = -1;                // index into cells, -1 when none computed
  std::size_t query_count = 0;
  std::size_t corpus_count = 0;
  std::vector<retrieval::ClassPrCurve> best_curves;  // PR curves of the best cell
};

/// Test split queries against the train-split corpus over every metric and
/// layer. Cells whose metric rejects a layer's value range (histogram
/// intersection over signed activations) record the error instead of a
/// number. split_seed must be the seed the checkpoint was trained under for
/// the query/corpus partition to match.
RetrievalReport run_retrieval_experiment(const gnn::Checkpoint& checkpoint,
                                         const DatasetManifest& manifest,
                                         const std::filesystem::path& workspace,
                                         std::uint64_t split_seed);

void write_retrieval_json(std::ostream& out, const RetrievalReport& report);

}  // namespace stepgraph::pipeline
