#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stepgraph/error.hpp"
#include "stepgraph/gnn/checkpoint.hpp"
#include "stepgraph/graph/cad_graph.hpp"
#include "stepgraph/graph/graphml.hpp"
#include "stepgraph/pipeline/experiment.hpp"
#include "stepgraph/pipeline/manifest.hpp"
#include "stepgraph/pipeline/split.hpp"
#include "stepgraph/pipeline/synthetic.hpp"
#include "stepgraph/retrieval/features.hpp"
#include "stepgraph/retrieval/ranking.hpp"
#include "stepgraph/step/parser.hpp"

namespace fs = std::filesystem;
using namespace stepgraph;

namespace {

/// --workspace flag, STEPGRAPH_WORKSPACE, or the current directory.
fs::path resolve_workspace(const std::string& flag_value) {
  if (!flag_value.empty()) return fs::path(flag_value);
  if (const char* env = std::getenv("STEPGRAPH_WORKSPACE"); env && *env) return fs::path(env);
  return fs::current_path();
}

void print_error_summary(const std::string& code, const std::string& message) {
  const nlohmann::json doc{{"error", {{"code", code}, {"message", message}}}};
  std::cerr << doc.dump() << '\n';
}

bool has_step_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".step" || ext == ".stp" || ext == ".p21";
}

std::vector<fs::path> collect_inputs(const fs::path& input) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::recursive_directory_iterator(input)) {
      if (entry.is_regular_file() && has_step_extension(entry.path())) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  return files;
}

// ---------------------------------------------------------------- convert --

struct ConvertOutcome {
  fs::path input;
  bool ok = false;
  std::string message;           // error text when !ok
  std::string code;              // error code name when !ok
  std::vector<std::string> outputs;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t dangling = 0;
};

ConvertOutcome convert_one(const fs::path& input, const fs::path& out_dir, bool decompose) {
  ConvertOutcome outcome;
  outcome.input = input;
  try {
    const step::StepFile file = step::parse_path(input.string());
    graph::BuildStats stats;
    graph::CadGraph g = graph::build_graph(file, &stats);
    g.source_path = input.filename().string();
    outcome.dangling = stats.dangling_dropped;
    outcome.nodes = g.node_count();
    outcome.edges = g.edge_count();

    const std::string stem = input.stem().string();
    if (decompose) {
      const graph::DecomposeResult parts = graph::decompose_assembly(g);
      for (std::size_t i = 0; i < parts.components.size(); ++i) {
        std::ostringstream name;
        name << stem << "_c" << std::setw(2) << std::setfill('0') << i << ".graphml";
        const fs::path out_path = out_dir / name.str();
        graph::export_graphml(parts.components[i], out_path.string());
        outcome.outputs.push_back(out_path.string());
      }
    } else {
      const fs::path out_path = out_dir / (stem + ".graphml");
      graph::export_graphml(g, out_path.string());
      outcome.outputs.push_back(out_path.string());
    }
    outcome.ok = true;
  } catch (const Error& e) {
    outcome.code = error_code_name(e.code());
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.code = "InternalError";
    outcome.message = e.what();
  }
  return outcome;
}

int run_convert(const std::string& input, const std::string& out, bool decompose, bool strict,
                unsigned jobs, const fs::path& workspace) {
  fs::path input_path(input);
  if (input_path.is_relative() && !fs::exists(input_path)) {
    const fs::path in_workspace = workspace / input_path;
    if (fs::exists(in_workspace)) input_path = in_workspace;
  }
  if (!fs::exists(input_path)) {
    throw Error(ErrorCode::IoError, "input '" + input + "' does not exist");
  }
  const fs::path out_dir(out);
  fs::create_directories(out_dir);

  const std::vector<fs::path> files = collect_inputs(input_path);
  std::vector<ConvertOutcome> outcomes(files.size());

  const unsigned worker_count =
      std::max(1u, std::min(jobs, static_cast<unsigned>(files.size()) ? static_cast<unsigned>(files.size()) : 1u));
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= files.size()) return;
      outcomes[i] = convert_one(files[i], out_dir, decompose);
    }
  };
  if (worker_count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (unsigned t = 0; t < worker_count; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  std::size_t failures = 0;
  nlohmann::json error_list = nlohmann::json::array();
  for (const ConvertOutcome& outcome : outcomes) {
    if (outcome.ok) {
      std::cout << "ok " << outcome.input.string() << " -> ";
      for (std::size_t i = 0; i < outcome.outputs.size(); ++i) {
        if (i) std::cout << ", ";
        std::cout << outcome.outputs[i];
      }
      std::cout << " (" << outcome.nodes << " nodes, " << outcome.edges << " edges";
      if (outcome.dangling) std::cout << ", " << outcome.dangling << " dangling dropped";
      std::cout << ")\n";
    } else {
      ++failures;
      std::cout << "error " << outcome.input.string() << ": " << outcome.message << '\n';
      error_list.push_back(nlohmann::json{{"path", outcome.input.string()},
                                          {"code", outcome.code},
                                          {"message", outcome.message}});
    }
  }
  std::cout << (files.size() - failures) << "/" << files.size() << " files converted\n";
  if (failures) {
    std::cerr << nlohmann::json{{"errors", std::move(error_list)}}.dump() << '\n';
  }
  return (strict && failures) ? 1 : 0;
}

// ------------------------------------------------------------------ stats --

int run_stats(const std::string& manifest_path, const std::string& out_csv,
              const fs::path& workspace) {
  const pipeline::DatasetManifest manifest = pipeline::load_manifest(manifest_path);
  const pipeline::LoadedCorpus corpus = pipeline::load_corpus(manifest, workspace);

  std::vector<std::tuple<int, std::string, std::size_t>> rows;
  rows.reserve(corpus.graphs.size());
  for (std::size_t i = 0; i < corpus.graphs.size(); ++i) {
    rows.emplace_back(manifest.entries[i].class_id, manifest.entries[i].class_name,
                      corpus.graphs[i].node_count());
  }
  const graph::CorpusStats stats = graph::graph_stats(rows);

  std::cout << std::left << std::setw(16) << "class" << std::right << std::setw(8) << "models"
            << std::setw(14) << "mean_nodes" << std::setw(16) << "variance_nodes" << '\n';
  std::cout.precision(2);
  std::cout << std::fixed;
  for (const graph::ClassNodeStats& row : stats.per_class) {
    std::cout << std::left << std::setw(16) << row.class_name << std::right << std::setw(8)
              << row.model_count << std::setw(14) << row.mean_nodes << std::setw(16)
              << row.variance_nodes << '\n';
  }
  std::cout << stats.total_models << " models, " << stats.total_nodes << " nodes total\n";

  if (!out_csv.empty()) {
    std::ofstream csv(out_csv);
    if (!csv) throw Error(ErrorCode::IoError, "cannot open '" + out_csv + "' for writing");
    csv.precision(10);
    csv << "class_id,class,models,mean_nodes,variance_nodes\n";
    for (const graph::ClassNodeStats& row : stats.per_class) {
      csv << row.class_id << ',' << row.class_name << ',' << row.model_count << ','
          << row.mean_nodes << ',' << row.variance_nodes << '\n';
    }
  }
  return 0;
}

// ------------------------------------------------------------------ train --

int run_train(const std::string& manifest_path, const fs::path& workspace,
              pipeline::ExperimentConfig config, const std::string& ckpt_out,
              const std::string& metrics_out, const std::string& report_out) {
  const pipeline::DatasetManifest manifest = pipeline::load_manifest(manifest_path);
  const pipeline::ExperimentResult result =
      pipeline::run_classification_experiment(manifest, workspace, config);

  gnn::save_checkpoint(ckpt_out, result.checkpoint);
  std::cout << "checkpoint written to " << ckpt_out << '\n';

  if (!metrics_out.empty()) {
    std::ofstream csv(metrics_out);
    if (!csv) throw Error(ErrorCode::IoError, "cannot open '" + metrics_out + "' for writing");
    gnn::write_metrics_csv(csv, result.report.epochs);
    std::cout << "metrics written to " << metrics_out << '\n';
  }
  if (!report_out.empty()) {
    std::ofstream rep(report_out);
    if (!rep) throw Error(ErrorCode::IoError, "cannot open '" + report_out + "' for writing");
    pipeline::write_report_json(rep, result.report);
    std::cout << "report written to " << report_out << '\n';
  }

  std::cout.precision(4);
  std::cout << std::fixed << "test accuracy " << result.report.test.accuracy << ", loss "
            << result.report.test.loss << ", macro precision "
            << result.report.test.macro_precision << ", macro recall "
            << result.report.test.macro_recall << '\n';
  return 0;
}

// ------------------------------------------------------------------- eval --

std::vector<gnn::GraphExample> select_split(const pipeline::DatasetManifest& manifest,
                                            const std::vector<gnn::GraphExample>& all,
                                            const std::string& split_name,
                                            std::uint64_t seed) {
  if (split_name == "all") return all;
  const pipeline::SplitAssignment split = pipeline::split_dataset(manifest, seed);
  pipeline::SplitTag tag = pipeline::SplitTag::Test;
  if (split_name == "train") tag = pipeline::SplitTag::Train;
  if (split_name == "val") tag = pipeline::SplitTag::Val;
  std::vector<gnn::GraphExample> picked;
  for (std::size_t i : split.indices_of(tag)) picked.push_back(all[i]);
  return picked;
}

int run_eval(const std::string& ckpt_path, const std::string& manifest_path,
             const std::string& split_name, std::uint64_t seed, const fs::path& workspace,
             const std::string& out_json) {
  const gnn::Checkpoint checkpoint = gnn::load_checkpoint(ckpt_path);
  const pipeline::DatasetManifest manifest = pipeline::load_manifest(manifest_path);
  const pipeline::LoadedCorpus corpus = pipeline::load_corpus(manifest, workspace);
  const std::vector<gnn::GraphExample> all =
      pipeline::encode_corpus(corpus, manifest, checkpoint.vocabulary);
  const std::vector<gnn::GraphExample> picked = select_split(manifest, all, split_name, seed);
  if (picked.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "split '" + split_name + "' selected no models");
  }

  const pipeline::EvalOutcome outcome =
      pipeline::evaluate_split(checkpoint.model, picked, manifest.class_count());

  std::cout.precision(4);
  std::cout << std::fixed << "split " << split_name << ": " << picked.size() << " models\n"
            << "accuracy " << outcome.accuracy << ", loss " << outcome.loss
            << ", macro precision " << outcome.macro_precision << ", macro recall "
            << outcome.macro_recall << '\n';
  std::cout << "confusion (rows = true class):\n";
  for (std::size_t c = 0; c < outcome.confusion.size(); ++c) {
    std::cout << std::left << std::setw(16) << manifest.class_names[c] << std::right;
    for (std::size_t k = 0; k < outcome.confusion[c].size(); ++k) {
      std::cout << std::setw(6) << outcome.confusion[c][k];
    }
    std::cout << '\n';
  }

  if (!out_json.empty()) {
    nlohmann::json per_class = nlohmann::json::array();
    for (std::size_t c = 0; c < manifest.class_names.size(); ++c) {
      per_class.push_back(nlohmann::json{{"name", manifest.class_names[c]},
                                         {"precision", outcome.precision[c]},
                                         {"recall", outcome.recall[c]}});
    }
    const nlohmann::json doc{{"split", split_name},
                             {"models", picked.size()},
                             {"accuracy", outcome.accuracy},
                             {"loss", outcome.loss},
                             {"macro_precision", outcome.macro_precision},
                             {"macro_recall", outcome.macro_recall},
                             {"confusion", outcome.confusion},
                             {"per_class", std::move(per_class)}};
    std::ofstream out(out_json);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + out_json + "' for writing");
    out << doc.dump(2) << '\n';
    std::cout << "report written to " << out_json << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- retrieve --

int run_retrieve(const std::string& ckpt_path, const std::string& manifest_path,
                 const std::string& metric_name, const std::string& layer_name,
                 const std::string& query_path, std::uint64_t seed, const fs::path& workspace,
                 const std::string& out_json, const std::string& pr_out) {
  const gnn::Checkpoint checkpoint = gnn::load_checkpoint(ckpt_path);
  const pipeline::DatasetManifest manifest = pipeline::load_manifest(manifest_path);

  if (!query_path.empty()) {
    // Single-file query against the train-split corpus.
    const retrieval::Metric metric = retrieval::metric_from_name(metric_name);
    const retrieval::LayerTag layer = retrieval::layer_tag_from_name(layer_name);
    const pipeline::LoadedCorpus corpus = pipeline::load_corpus(manifest, workspace);
    const std::vector<gnn::GraphExample> all =
        pipeline::encode_corpus(corpus, manifest, checkpoint.vocabulary);
    const pipeline::SplitAssignment split = pipeline::split_dataset(manifest, seed);

    std::vector<retrieval::FeatureVector> corpus_features;
    for (std::size_t i : split.indices_of(pipeline::SplitTag::Train)) {
      retrieval::FeatureVector fv = retrieval::extract_features(checkpoint.model, all[i], layer);
      fv.model_path = manifest.entries[i].path;
      corpus_features.push_back(std::move(fv));
    }

    const step::StepFile file = step::parse_path(query_path);
    graph::CadGraph g = graph::build_graph(file);
    const gnn::GraphExample example = gnn::encode_example(g, checkpoint.vocabulary);
    retrieval::FeatureVector query =
        retrieval::extract_features(checkpoint.model, example, layer);
    query.model_path = query_path;

    const retrieval::RankedRetrievalResult ranked =
        retrieval::rank_query(query, corpus_features, metric);
    retrieval::write_ranking_csv(std::cout, ranked, corpus_features);
    return 0;
  }

  const pipeline::RetrievalReport report =
      pipeline::run_retrieval_experiment(checkpoint, manifest, workspace, seed);

  std::cout.precision(17);
  std::cout << "metric,layer,status,map\n";
  for (const pipeline::RetrievalCell& cell : report.cells) {
    std::cout << retrieval::metric_name(cell.metric) << ',' << retrieval::layer_tag_name(cell.layer)
              << ',' << cell.status << ',';
    if (cell.ok) {
      std::cout << cell.map;
    }
    std::cout << '\n';
  }
  if (report.best_cell >= 0) {
    const pipeline::RetrievalCell& best =
        report.cells[static_cast<std::size_t>(report.best_cell)];
    std::cout << "best: " << retrieval::metric_name(best.metric) << " + "
              << retrieval::layer_tag_name(best.layer) << " (mAP " << best.map << ")\n";
  }

  if (!out_json.empty()) {
    std::ofstream out(out_json);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + out_json + "' for writing");
    pipeline::write_retrieval_json(out, report);
    std::cout << "report written to " << out_json << '\n';
  }
  if (!pr_out.empty() && report.best_cell >= 0) {
    std::ofstream out(pr_out);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + pr_out + "' for writing");
    retrieval::write_pr_csv(out, report.best_curves, manifest.class_names);
    std::cout << "precision-recall curves written to " << pr_out << '\n';
  }
  return 0;
}

// ---------------------------------------------------------- export-features --

int run_export_features(const std::string& ckpt_path, const std::string& manifest_path,
                        const std::string& layer_name, const std::string& out_csv,
                        const std::string& split_name, std::uint64_t seed,
                        const fs::path& workspace) {
  const gnn::Checkpoint checkpoint = gnn::load_checkpoint(ckpt_path);
  const pipeline::DatasetManifest manifest = pipeline::load_manifest(manifest_path);
  const retrieval::LayerTag layer = retrieval::layer_tag_from_name(layer_name);
  const pipeline::LoadedCorpus corpus = pipeline::load_corpus(manifest, workspace);
  const std::vector<gnn::GraphExample> all =
      pipeline::encode_corpus(corpus, manifest, checkpoint.vocabulary);

  std::vector<std::size_t> indices;
  if (split_name == "all") {
    indices.resize(all.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
  } else {
    const pipeline::SplitAssignment split = pipeline::split_dataset(manifest, seed);
    pipeline::SplitTag tag = pipeline::SplitTag::Test;
    if (split_name == "train") tag = pipeline::SplitTag::Train;
    if (split_name == "val") tag = pipeline::SplitTag::Val;
    indices = split.indices_of(tag);
  }

  std::vector<retrieval::FeatureVector> features;
  features.reserve(indices.size());
  for (std::size_t i : indices) {
    retrieval::FeatureVector fv = retrieval::extract_features(checkpoint.model, all[i], layer);
    fv.model_path = manifest.entries[i].path;
    features.push_back(std::move(fv));
  }

  std::ofstream out(out_csv);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + out_csv + "' for writing");
  retrieval::write_features_csv(out, features);
  std::cout << features.size() << " feature vectors written to " << out_csv << '\n';
  return 0;
}

// -------------------------------------------------------------- gen-synthetic --

int run_gen_synthetic(const std::string& out_dir, int count, std::uint64_t seed) {
  const fs::path out(out_dir);
  const pipeline::DatasetManifest manifest = pipeline::generate_synthetic_corpus(
      out, pipeline::default_class_specs(), count, seed);
  const fs::path manifest_path = out / "manifest.json";
  pipeline::save_manifest(manifest_path, manifest);
  std::cout << manifest.entries.size() << " models in " << manifest.class_count()
            << " classes under " << out.string() << '\n'
            << "manifest written to " << manifest_path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STEP entity graphs: conversion, GCN classification, retrieval"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string workspace_flag;
  std::uint64_t seed = 0;
  app.add_option("--workspace", workspace_flag,
                 "workspace root for manifest-relative paths (default: $STEPGRAPH_WORKSPACE or .)");
  app.add_option("--seed", seed, "seed for splits, init and shuffling (default 0)");

  int rc = 0;

  // convert
  auto* convert = app.add_subcommand("convert", "STEP files to graphml");
  std::string convert_input, convert_out;
  bool convert_decompose = false, convert_strict = false;
  unsigned convert_jobs = std::max(1u, std::thread::hardware_concurrency());
  convert->add_option("--input", convert_input, "STEP file or directory")->required();
  convert->add_option("--out", convert_out, "output directory")->required();
  convert->add_flag("--decompose", convert_decompose, "one graphml per assembly component");
  convert->add_flag("--strict", convert_strict, "exit non-zero when any file fails");
  convert->add_option("--jobs", convert_jobs, "worker threads");
  convert->callback([&] {
    rc = run_convert(convert_input, convert_out, convert_decompose, convert_strict, convert_jobs,
                     resolve_workspace(workspace_flag));
  });

  // stats
  auto* stats = app.add_subcommand("stats", "per-class node-count table");
  std::string stats_manifest, stats_out;
  stats->add_option("--manifest", stats_manifest, "dataset manifest JSON")->required();
  stats->add_option("--out", stats_out, "also write the table as CSV");
  stats->callback(
      [&] { rc = run_stats(stats_manifest, stats_out, resolve_workspace(workspace_flag)); });

  // train
  auto* train = app.add_subcommand("train", "train a classifier, write a checkpoint");
  std::string train_manifest, train_ckpt = "model.json", train_metrics, train_report;
  pipeline::ExperimentConfig train_config;
  std::string train_pooling = "attention";
  train->add_option("--manifest", train_manifest, "dataset manifest JSON")->required();
  train->add_option("--out", train_ckpt, "checkpoint path (default model.json)");
  train->add_option("--metrics", train_metrics, "per-epoch metrics CSV path");
  train->add_option("--report", train_report, "experiment report JSON path");
  train->add_option("--epochs", train_config.epochs, "training epochs (default 50)");
  train->add_option("--batch-size", train_config.batch_size, "mini-batch size (default 16)");
  train->add_option("--lr", train_config.learning_rate, "initial learning rate (default 0.0005)");
  train->add_option("--gamma", train_config.gamma, "scheduler decay factor (default 0.1)");
  train->add_option("--window", train_config.window, "scheduler loss window (default 6)");
  train->add_option("--bottleneck", train_config.bottleneck,
                    "first fully connected width (default 32)");
  train->add_option("--pooling", train_pooling, "attention | mean | degree_sum")
      ->check(CLI::IsMember({"attention", "mean", "degree_sum"}));
  train->callback([&] {
    train_config.seed = seed;
    train_config.pooling = gnn::pooling_from_name(train_pooling);
    rc = run_train(train_manifest, resolve_workspace(workspace_flag), train_config, train_ckpt,
                   train_metrics, train_report);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  std::string eval_ckpt, eval_manifest, eval_split = "test", eval_out;
  eval->add_option("--ckpt", eval_ckpt, "checkpoint JSON")->required();
  eval->add_option("--manifest", eval_manifest, "dataset manifest JSON")->required();
  eval->add_option("--split", eval_split, "train | val | test | all (default test)")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  eval->add_option("--out", eval_out, "evaluation report JSON path");
  eval->callback([&] {
    rc = run_eval(eval_ckpt, eval_manifest, eval_split, seed, resolve_workspace(workspace_flag),
                  eval_out);
  });

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "rank by feature distance; mAP grid");
  std::string retrieve_ckpt, retrieve_manifest, retrieve_query, retrieve_out, retrieve_pr;
  std::string retrieve_metric = "cosine", retrieve_layer = "softmax";
  retrieve->add_option("--ckpt", retrieve_ckpt, "checkpoint JSON")->required();
  retrieve->add_option("--manifest", retrieve_manifest, "dataset manifest JSON")->required();
  retrieve->add_option("--metric", retrieve_metric,
                       "euclidean | cosine | histogram_intersection (query mode)")
      ->check(CLI::IsMember({"euclidean", "cosine", "histogram_intersection"}));
  retrieve->add_option("--layer", retrieve_layer,
                       "attention | fc1_pre_relu | fc1_post_relu | fc2 | softmax (query mode)")
      ->check(CLI::IsMember({"attention", "fc1_pre_relu", "fc1_post_relu", "fc2", "softmax"}));
  retrieve->add_option("--query", retrieve_query,
                       "STEP file to rank against the train-split corpus");
  retrieve->add_option("--out", retrieve_out, "mAP grid report JSON path");
  retrieve->add_option("--pr-out", retrieve_pr, "precision-recall CSV for the best cell");
  retrieve->callback([&] {
    rc = run_retrieve(retrieve_ckpt, retrieve_manifest, retrieve_metric, retrieve_layer,
                      retrieve_query, seed, resolve_workspace(workspace_flag), retrieve_out,
                      retrieve_pr);
  });

  // export-features
  auto* export_features = app.add_subcommand("export-features", "feature vectors as CSV");
  std::string ef_ckpt, ef_manifest, ef_layer = "softmax", ef_out, ef_split = "all";
  export_features->add_option("--ckpt", ef_ckpt, "checkpoint JSON")->required();
  export_features->add_option("--manifest", ef_manifest, "dataset manifest JSON")->required();
  export_features->add_option("--layer", ef_layer,
                              "attention | fc1_pre_relu | fc1_post_relu | fc2 | softmax")
      ->check(CLI::IsMember({"attention", "fc1_pre_relu", "fc1_post_relu", "fc2", "softmax"}));
  export_features->add_option("--out", ef_out, "output CSV path")->required();
  export_features->add_option("--split", ef_split, "train | val | test | all (default all)")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  export_features->callback([&] {
    rc = run_export_features(ef_ckpt, ef_manifest, ef_layer, ef_out, ef_split, seed,
                             resolve_workspace(workspace_flag));
  });

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "write the synthetic corpus + manifest");
  std::string gen_out = "synthetic";
  int gen_count = 30;
  gen->add_option("--out", gen_out, "output directory (default synthetic)");
  gen->add_option("--count", gen_count, "models per class (default 30)");
  gen->callback([&] { rc = run_gen_synthetic(gen_out, gen_count, seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    print_error_summary(error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error_summary("InternalError", e.what());
    return 1;
  }
  return rc;
}
