#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stepgraph::pipeline {

struct ManifestEntry {
  std::string path;  // workspace-relative
  int class_id = 0;
  std::string class_name;
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;  // index = class_id
  std::string schema;                    // e.g. "AP214"

  int class_count() const { return static_cast<int>(class_names.size()); }
  bool operator==(const DatasetManifest&) const = default;
};

/// Structural checks: ≥1 entry, class ids contiguous from 0 and within the
/// class-name table. Throws InvalidArgument / EmptyCorpus.
void validate_manifest(const DatasetManifest& manifest);

/// JSON load/save. Loading validates; paths stay workspace-relative.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Entry path resolved against the workspace root.
std::filesystem::path resolve_path(const std::filesystem::path& workspace,
                                   const ManifestEntry& entry);

}  // namespace stepgraph::pipeline
