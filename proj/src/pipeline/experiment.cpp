#include "stepgraph/pipeline/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

#include <json.hpp>

#include "stepgraph/error.hpp"
#include "stepgraph/random.hpp"

namespace stepgraph::pipeline {

using nlohmann::json;

LoadedCorpus load_corpus(const DatasetManifest& manifest,
                         const std::filesystem::path& workspace) {
  LoadedCorpus corpus;
  corpus.graphs.reserve(manifest.entries.size());
  for (const ManifestEntry& entry : manifest.entries) {
    const std::filesystem::path path = resolve_path(workspace, entry);
    try {
      const step::StepFile file = step::parse_path(path.string());
      graph::CadGraph g = graph::build_graph(file);
      g.source_path = entry.path;
      g.label = entry.class_id;
      corpus.graphs.push_back(std::move(g));
    } catch (const Error& e) {
      throw Error::with_context(entry.path, e);
    }
  }
  return corpus;
}

std::vector<gnn::GraphExample> encode_corpus(const LoadedCorpus& corpus,
                                             const DatasetManifest& manifest,
                                             const graph::EntityVocabulary& vocab) {
  std::vector<gnn::GraphExample> examples;
  examples.reserve(corpus.graphs.size());
  for (std::size_t i = 0; i < corpus.graphs.size(); ++i) {
    examples.push_back(
        gnn::encode_example(corpus.graphs[i], vocab, manifest.entries[i].class_id));
  }
  return examples;
}

EvalOutcome evaluate_split(const gnn::GcnModel& model,
                           const std::vector<gnn::GraphExample>& examples, int classes) {
  EvalOutcome outcome;
  outcome.confusion.assign(static_cast<std::size_t>(classes),
                           std::vector<std::size_t>(static_cast<std::size_t>(classes), 0));
  std::size_t correct = 0;
  for (const gnn::GraphExample& example : examples) {
    const gnn::ForwardTrace trace =
        gnn::forward(model, example.adj, example.features, example.degrees);
    const int predicted = trace.predicted_class();
    outcome.loss += -std::log(trace.probs(example.label));
    outcome.confusion[static_cast<std::size_t>(example.label)]
                     [static_cast<std::size_t>(predicted)] += 1;
    if (predicted == example.label) ++correct;
  }
  if (!examples.empty()) {
    outcome.loss /= static_cast<double>(examples.size());
    outcome.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  }

  outcome.precision.assign(static_cast<std::size_t>(classes), 0.0);
  outcome.recall.assign(static_cast<std::size_t>(classes), 0.0);
  for (std::size_t c = 0; c < static_cast<std::size_t>(classes); ++c) {
    std::size_t row_sum = 0;  // true class c
    std::size_t col_sum = 0;  // predicted class c
    for (std::size_t k = 0; k < static_cast<std::size_t>(classes); ++k) {
      row_sum += outcome.confusion[c][k];
      col_sum += outcome.confusion[k][c];
    }
    const std::size_t tp = outcome.confusion[c][c];
    outcome.precision[c] = col_sum ? static_cast<double>(tp) / static_cast<double>(col_sum) : 0.0;
    outcome.recall[c] = row_sum ? static_cast<double>(tp) / static_cast<double>(row_sum) : 0.0;
    outcome.macro_precision += outcome.precision[c];
    outcome.macro_recall += outcome.recall[c];
  }
  if (classes > 0) {
    outcome.macro_precision /= static_cast<double>(classes);
    outcome.macro_recall /= static_cast<double>(classes);
  }
  return outcome;
}

namespace {

std::vector<gnn::GraphExample> pick(const std::vector<gnn::GraphExample>& all,
                                    const std::vector<std::size_t>& indices) {
  std::vector<gnn::GraphExample> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(all[i]);
  return out;
}

}  // namespace

ExperimentResult run_classification_experiment(const DatasetManifest& manifest,
                                               const std::filesystem::path& workspace,
                                               const ExperimentConfig& config) {
  validate_manifest(manifest);
  const LoadedCorpus corpus = load_corpus(manifest, workspace);
  const SplitAssignment split = split_dataset(manifest, config.seed);

  // Vocabulary comes from the train split alone; val/test types unseen there
  // land in the OOV slot.
  std::vector<const graph::CadGraph*> train_graphs;
  for (std::size_t i = 0; i < corpus.graphs.size(); ++i) {
    if (split.tags[i] == SplitTag::Train) train_graphs.push_back(&corpus.graphs[i]);
  }
  const graph::EntityVocabulary vocab = graph::build_vocabulary(train_graphs);

  const std::vector<gnn::GraphExample> all = encode_corpus(corpus, manifest, vocab);
  const std::vector<gnn::GraphExample> train_set = pick(all, split.indices_of(SplitTag::Train));
  const std::vector<gnn::GraphExample> val_set = pick(all, split.indices_of(SplitTag::Val));
  const std::vector<gnn::GraphExample> test_set = pick(all, split.indices_of(SplitTag::Test));

  gnn::ModelConfig model_config;
  model_config.input_dim = static_cast<int>(vocab.size());
  model_config.gcn_dims = config.gcn_dims;
  model_config.bottleneck = config.bottleneck;
  model_config.classes = manifest.class_count();
  model_config.pooling = config.pooling;
  model_config.seed = derive_seed(config.seed, 1);
  gnn::GcnModel model = gnn::init_params(model_config);

  gnn::TrainConfig train_config;
  train_config.epochs = config.epochs;
  train_config.batch_size = config.batch_size;
  train_config.learning_rate = config.learning_rate;
  train_config.gamma = config.gamma;
  train_config.window = config.window;
  train_config.seed = derive_seed(config.seed, 2);
  gnn::TrainResult trained = gnn::train(std::move(model), train_set, val_set, train_config);

  ExperimentResult result;
  result.report.config = config;
  result.report.class_names = manifest.class_names;
  result.report.splits = {train_set.size(), val_set.size(), test_set.size()};
  result.report.vocabulary_size = vocab.size();
  result.report.epochs = trained.history;
  result.report.test = evaluate_split(trained.model, test_set, manifest.class_count());

  result.checkpoint.model = std::move(trained.model);
  result.checkpoint.vocabulary = vocab;
  result.checkpoint.class_names = manifest.class_names;
  result.split = split;
  return result;
}

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  json epochs = json::array();
  for (const gnn::EpochMetrics& m : report.epochs) {
    json entry{{"epoch", m.epoch},
               {"train_loss", m.train_loss},
               {"train_acc", m.train_accuracy},
               {"lr", m.learning_rate}};
    if (std::isnan(m.val_loss)) {
      entry["val_loss"] = nullptr;
      entry["val_acc"] = nullptr;
    } else {
      entry["val_loss"] = m.val_loss;
      entry["val_acc"] = m.val_accuracy;
    }
    epochs.push_back(std::move(entry));
  }

  json per_class = json::array();
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    per_class.push_back(json{{"name", report.class_names[c]},
                             {"precision", report.test.precision[c]},
                             {"recall", report.test.recall[c]}});
  }

  const json doc{
      {"config",
       {{"epochs", report.config.epochs},
        {"batch_size", report.config.batch_size},
        {"lr", report.config.learning_rate},
        {"gamma", report.config.gamma},
        {"window", report.config.window},
        {"bottleneck", report.config.bottleneck},
        {"pooling", gnn::pooling_name(report.config.pooling)},
        {"gcn_dims", report.config.gcn_dims},
        {"seed", report.config.seed}}},
      {"classes", report.class_names},
      {"splits",
       {{"train", report.splits.train}, {"val", report.splits.val}, {"test", report.splits.test}}},
      {"vocabulary_size", report.vocabulary_size},
      {"epochs", std::move(epochs)},
      {"test",
       {{"accuracy", report.test.accuracy},
        {"loss", report.test.loss},
        {"macro_precision", report.test.macro_precision},
        {"macro_recall", report.test.macro_recall},
        {"confusion", report.test.confusion},
        {"per_class", std::move(per_class)}}}};
  out << doc.dump(2) << '\n';
}

RetrievalReport run_retrieval_experiment(const gnn::Checkpoint& checkpoint,
                                         const DatasetManifest& manifest,
                                         const std::filesystem::path& workspace,
                                         std::uint64_t split_seed) {
  validate_manifest(manifest);
  const LoadedCorpus corpus = load_corpus(manifest, workspace);
  const SplitAssignment split = split_dataset(manifest, split_seed);
  const std::vector<gnn::GraphExample> all =
      encode_corpus(corpus, manifest, checkpoint.vocabulary);

  const std::vector<std::size_t> corpus_idx = split.indices_of(SplitTag::Train);
  const std::vector<std::size_t> query_idx = split.indices_of(SplitTag::Test);

  RetrievalReport report;
  report.query_count = query_idx.size();
  report.corpus_count = corpus_idx.size();

  for (retrieval::Metric metric : retrieval::all_metrics()) {
    for (retrieval::LayerTag layer : retrieval::all_layer_tags()) {
      RetrievalCell cell;
      cell.metric = metric;
      cell.layer = layer;
      try {
        std::vector<retrieval::FeatureVector> corpus_features;
        corpus_features.reserve(corpus_idx.size());
        for (std::size_t i : corpus_idx) {
          retrieval::FeatureVector fv =
              retrieval::extract_features(checkpoint.model, all[i], layer);
          fv.model_path = manifest.entries[i].path;
          corpus_features.push_back(std::move(fv));
        }
        std::vector<retrieval::RankedRetrievalResult> results;
        results.reserve(query_idx.size());
        for (std::size_t i : query_idx) {
          retrieval::FeatureVector query =
              retrieval::extract_features(checkpoint.model, all[i], layer);
          query.model_path = manifest.entries[i].path;
          retrieval::RankedRetrievalResult ranked =
              retrieval::rank_query(query, corpus_features, metric);
          ranked.query_index = i;
          results.push_back(std::move(ranked));
        }
        cell.map = retrieval::mean_average_precision(results);
        cell.ok = true;
        cell.status = "ok";

        const int index = static_cast<int>(report.cells.size());
        const bool better =
            report.best_cell < 0 ||
            cell.map > report.cells[static_cast<std::size_t>(report.best_cell)].map;
        if (better) {
          report.best_cell = index;
          report.best_curves = retrieval::precision_recall_curves(results);
        }
      } catch (const Error& e) {
        cell.ok = false;
        cell.status = error_code_name(e.code());
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void write_retrieval_json(std::ostream& out, const RetrievalReport& report) {
  json cells = json::array();
  for (const RetrievalCell& cell : report.cells) {
    json entry{{"metric", retrieval::metric_name(cell.metric)},
               {"layer", retrieval::layer_tag_name(cell.layer)},
               {"status", cell.status}};
    if (cell.ok) {
      entry["map"] = cell.map;
    } else {
      entry["map"] = nullptr;
    }
    cells.push_back(std::move(entry));
  }

  json doc{{"grid", std::move(cells)},
           {"queries", report.query_count},
           {"corpus", report.corpus_count}};
  if (report.best_cell >= 0) {
    const RetrievalCell& best = report.cells[static_cast<std::size_t>(report.best_cell)];
    doc["best"] = json{{"metric", retrieval::metric_name(best.metric)},
                       {"layer", retrieval::layer_tag_name(best.layer)},
                       {"map", best.map}};
  } else {
    doc["best"] = nullptr;
  }
  out << doc.dump(2) << '\n';
}

}  // namespace stepgraph::pipeline
