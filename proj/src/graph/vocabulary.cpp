#include "stepgraph/graph/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "stepgraph/error.hpp"

namespace stepgraph::graph {

EntityVocabulary::EntityVocabulary(std::vector<std::string> sorted_tokens)
    : tokens_(std::move(sorted_tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    index_.emplace(tokens_[i], static_cast<int>(i));
}

int EntityVocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? oov_index() : it->second;
}

bool EntityVocabulary::contains(const std::string& token) const {
  return index_.count(token) != 0;
}

EntityVocabulary build_vocabulary(const std::vector<const CadGraph*>& graphs) {
  if (graphs.empty())
    throw Error(ErrorCode::EmptyCorpus, "no graphs to build a vocabulary from");
  std::set<std::string> distinct;
  for (const CadGraph* graph : graphs)
    for (const GraphNode& node : graph->nodes) distinct.insert(node.type_token);
  std::vector<std::string> tokens(distinct.begin(), distinct.end());
  tokens.push_back(EntityVocabulary::kOovToken);
  return EntityVocabulary(std::move(tokens));
}

EntityVocabulary build_vocabulary(const std::vector<CadGraph>& graphs) {
  std::vector<const CadGraph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const CadGraph& g : graphs) ptrs.push_back(&g);
  return build_vocabulary(ptrs);
}

EncodedFeatures encode_features(const CadGraph& graph,
                                const EntityVocabulary& vocab) {
  EncodedFeatures out;
  out.matrix = Matrix::Zero(static_cast<Eigen::Index>(graph.nodes.size()),
                            static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const std::string& token = graph.nodes[i].type_token;
    if (!vocab.contains(token)) ++out.oov_count;
    out.matrix(static_cast<Eigen::Index>(i), vocab.index_of(token)) = 1.0;
  }
  return out;
}

}  // namespace stepgraph::graph
