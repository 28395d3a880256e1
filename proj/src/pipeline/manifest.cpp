#include "stepgraph/pipeline/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "stepgraph/error.hpp"

namespace stepgraph::pipeline {

using nlohmann::json;

void validate_manifest(const DatasetManifest& manifest) {
  if (manifest.entries.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "manifest lists no models");
  }
  if (manifest.class_names.empty()) {
    throw Error(ErrorCode::InvalidArgument, "manifest lists no classes");
  }
  std::set<int> seen;
  for (const ManifestEntry& entry : manifest.entries) {
    if (entry.class_id < 0 || entry.class_id >= manifest.class_count()) {
      throw Error(ErrorCode::InvalidArgument,
                  "entry '" + entry.path + "' has class id " + std::to_string(entry.class_id) +
                      " outside the class table");
    }
    if (entry.path.empty()) {
      throw Error(ErrorCode::InvalidArgument, "manifest entry with empty path");
    }
    seen.insert(entry.class_id);
  }
  for (int c = 0; c < manifest.class_count(); ++c) {
    if (!seen.count(c)) {
      throw Error(ErrorCode::InvalidArgument,
                  "class '" + manifest.class_names[static_cast<std::size_t>(c)] +
                      "' has no models; class ids must be contiguous from 0");
    }
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open manifest '" + path.string() + "'");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument,
                "manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }

  DatasetManifest manifest;
  try {
    manifest.schema = doc.value("schema", std::string{});
    manifest.class_names = doc.at("classes").get<std::vector<std::string>>();
    for (const json& item : doc.at("entries")) {
      ManifestEntry entry;
      entry.path = item.at("path").get<std::string>();
      entry.class_id = item.at("class_id").get<int>();
      if (entry.class_id >= 0 && entry.class_id < manifest.class_count()) {
        entry.class_name = manifest.class_names[static_cast<std::size_t>(entry.class_id)];
      }
      manifest.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument,
                "manifest '" + path.string() + "' is missing required fields: " + e.what());
  }
  validate_manifest(manifest);
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  json entries = json::array();
  for (const ManifestEntry& entry : manifest.entries) {
    entries.push_back(json{{"path", entry.path}, {"class_id", entry.class_id}});
  }
  const json doc{{"schema", manifest.schema},
                 {"classes", manifest.class_names},
                 {"entries", std::move(entries)}};

  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::IoError, "failed writing manifest to '" + path.string() + "'");
  }
}

std::filesystem::path resolve_path(const std::filesystem::path& workspace,
                                   const ManifestEntry& entry) {
  std::filesystem::path p(entry.path);
  if (p.is_absolute()) return p;
  return workspace / p;
}

}  // namespace stepgraph::pipeline
