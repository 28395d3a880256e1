#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stepgraph/gnn/model.hpp"
#include "stepgraph/graph/vocabulary.hpp"

namespace stepgraph::gnn {

/// Everything needed to run a trained model on new files: parameters plus the
/// vocabulary the features were encoded under and the class-index meanings.
struct Checkpoint {
  GcnModel model;
  graph::EntityVocabulary vocabulary;
  std::vector<std::string> class_names;
};

/// Versioned JSON with a format tag; keys sorted, bit round-trip safe.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// Throws IoError on unreadable files, InvalidArgument on wrong format/version.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace stepgraph::gnn
