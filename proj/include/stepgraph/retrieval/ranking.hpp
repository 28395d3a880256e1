#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "stepgraph/retrieval/features.hpp"

namespace stepgraph::retrieval {

struct RankEntry {
  std::size_t corpus_index = 0;
  double distance = 0.0;
  bool relevant = false;
};

struct RankedRetrievalResult {
  std::size_t query_index = 0;  // caller-assigned id
  int query_label = -1;
  std::vector<RankEntry> ranking;  // ascending distance, ties by corpus index
  double average_precision = 0.0;
  bool no_relevant = false;  // degenerate query: nothing relevant in the corpus
};

/// Mean of precision@k over the ranks of relevant items; 0 when nothing is
/// relevant. Exposed for oracle tests.
double average_precision(const std::vector<char>& relevance);

/// Rank the whole corpus against the query by ascending distance, tie-broken
/// by corpus index. Throws InconsistentLayerTags when the corpus mixes layers
/// with the query, EmptyCorpus on an empty corpus.
RankedRetrievalResult rank_query(const FeatureVector& query,
                                 const std::vector<FeatureVector>& corpus, Metric metric);

/// Arithmetic mean of per-query AP. Throws NoQueries.
double mean_average_precision(const std::vector<RankedRetrievalResult>& results);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

/// One (recall, precision) point per rank, no interpolation. A list with zero
/// relevant items yields recall 0 at every rank.
std::vector<PrPoint> pr_points(const std::vector<char>& relevance);

struct ClassPrCurve {
  int label = -1;
  std::vector<PrPoint> points;
};

/// Per-class curves: all rank entries of a class's queries are pooled into one
/// list sorted by ascending distance (ties by query then corpus index) and the
/// rank-by-rank points are computed on that pool. Classes ordered by label.
std::vector<ClassPrCurve> precision_recall_curves(
    const std::vector<RankedRetrievalResult>& results);

/// CSV: class,rank,recall,precision with a header row.
void write_pr_csv(std::ostream& out, const std::vector<ClassPrCurve>& curves,
                  const std::vector<std::string>& class_names);

/// CSV: rank,corpus_index,path,label,distance,relevant with a header row.
void write_ranking_csv(std::ostream& out, const RankedRetrievalResult& result,
                       const std::vector<FeatureVector>& corpus);

}  // namespace stepgraph::retrieval
