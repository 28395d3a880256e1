#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "stepgraph/graph/cad_graph.hpp"
#include "stepgraph/linalg.hpp"

namespace stepgraph::graph {

/// Ordered set of entity type tokens mapping token -> one-hot index.
/// Tokens are sorted; a reserved out-of-vocabulary slot sits at the fixed
/// final index so unknown types at inference never crash.
class EntityVocabulary {
 public:
  static constexpr const char* kOovToken = "<OOV>";

  EntityVocabulary() = default;
  explicit EntityVocabulary(std::vector<std::string> sorted_tokens);

  std::size_t size() const { return tokens_.size(); }
  int oov_index() const { return static_cast<int>(tokens_.size()) - 1; }

  /// Index of token, or the OOV index when unknown.
  int index_of(const std::string& token) const;
  bool contains(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const EntityVocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  std::vector<std::string> tokens_;  // sorted distinct + kOovToken last
  std::unordered_map<std::string, int> index_;
};

/// Sorted distinct type tokens across graphs, plus the OOV slot.
/// Throws EmptyCorpus on an empty collection.
EntityVocabulary build_vocabulary(const std::vector<CadGraph>& graphs);
EntityVocabulary build_vocabulary(const std::vector<const CadGraph*>& graphs);

struct EncodedFeatures {
  Matrix matrix;  // nodes x |vocabulary|, one-hot rows
  std::size_t oov_count = 0;
};

/// Row i carries a single 1 at the index of node i's type token (OOV slot
/// for unknown tokens).
EncodedFeatures encode_features(const CadGraph& graph,
                                const EntityVocabulary& vocab);

}  // namespace stepgraph::graph
