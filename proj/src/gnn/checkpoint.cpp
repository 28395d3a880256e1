#include "stepgraph/gnn/checkpoint.hpp"

#include <fstream>
#include <utility>

#include <json.hpp>

#include "stepgraph/error.hpp"

namespace stepgraph::gnn {

namespace {

constexpr const char* kFormatTag = "stepgraph-checkpoint";
constexpr int kFormatVersion = 1;

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      entries.push_back(m(i, j));
    }
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(entries)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(ErrorCode::InvalidArgument, "checkpoint matrix shape disagrees with its data");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
      m(i, j2) = data[k++].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) entries.push_back(v(i));
  return entries;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const GcnModel& model = checkpoint.model;
  json layers = json::array();
  for (const GcnLayer& layer : model.layers) layers.push_back(matrix_to_json(layer.weight));

  const json doc{
      {"format", kFormatTag},
      {"version", kFormatVersion},
      {"config",
       {{"input_dim", model.config.input_dim},
        {"gcn_dims", model.config.gcn_dims},
        {"bottleneck", model.config.bottleneck},
        {"classes", model.config.classes},
        {"pooling", pooling_name(model.config.pooling)},
        {"seed", model.config.seed}}},
      {"class_names", checkpoint.class_names},
      {"vocabulary", checkpoint.vocabulary.tokens()},
      {"params",
       {{"gcn", std::move(layers)},
        {"pool", matrix_to_json(model.pool.weight)},
        {"fc1_weight", matrix_to_json(model.fc1_weight)},
        {"fc1_bias", vector_to_json(model.fc1_bias)},
        {"fc2_weight", matrix_to_json(model.fc2_weight)},
        {"fc2_bias", vector_to_json(model.fc2_bias)}}}};

  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::IoError, "failed writing checkpoint to '" + path.string() + "'");
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open checkpoint '" + path.string() + "'");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument,
                "checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
  }

  try {
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw Error(ErrorCode::InvalidArgument,
                  "'" + path.string() + "' does not carry the checkpoint format tag");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::InvalidArgument,
                  "unsupported checkpoint version in '" + path.string() + "'");
    }

    Checkpoint checkpoint;
    const json& config = doc.at("config");
    checkpoint.model.config.input_dim = config.at("input_dim").get<int>();
    checkpoint.model.config.gcn_dims = config.at("gcn_dims").get<std::vector<int>>();
    checkpoint.model.config.bottleneck = config.at("bottleneck").get<int>();
    checkpoint.model.config.classes = config.at("classes").get<int>();
    checkpoint.model.config.pooling = pooling_from_name(config.at("pooling").get<std::string>());
    checkpoint.model.config.seed = config.at("seed").get<std::uint64_t>();

    checkpoint.class_names = doc.at("class_names").get<std::vector<std::string>>();
    checkpoint.vocabulary =
        graph::EntityVocabulary(doc.at("vocabulary").get<std::vector<std::string>>());

    const json& params = doc.at("params");
    for (const json& layer : params.at("gcn")) {
      checkpoint.model.layers.push_back(GcnLayer{matrix_from_json(layer)});
    }
    checkpoint.model.pool.weight = matrix_from_json(params.at("pool"));
    checkpoint.model.fc1_weight = matrix_from_json(params.at("fc1_weight"));
    checkpoint.model.fc1_bias = vector_from_json(params.at("fc1_bias"));
    checkpoint.model.fc2_weight = matrix_from_json(params.at("fc2_weight"));
    checkpoint.model.fc2_bias = vector_from_json(params.at("fc2_bias"));
    return checkpoint;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument,
                "checkpoint '" + path.string() + "' is missing required fields: " + e.what());
  }
}

}  // namespace stepgraph::gnn
