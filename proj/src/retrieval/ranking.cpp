#include "stepgraph/retrieval/ranking.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <tuple>

#include "stepgraph/error.hpp"

namespace stepgraph::retrieval {

double average_precision(const std::vector<char>& relevance) {
  std::size_t relevant_seen = 0;
  double precision_sum = 0.0;
  for (std::size_t k = 0; k < relevance.size(); ++k) {
    if (relevance[k]) {
      ++relevant_seen;
      precision_sum += static_cast<double>(relevant_seen) / static_cast<double>(k + 1);
    }
  }
  if (relevant_seen == 0) return 0.0;
  return precision_sum / static_cast<double>(relevant_seen);
}

RankedRetrievalResult rank_query(const FeatureVector& query,
                                 const std::vector<FeatureVector>& corpus, Metric metric) {
  if (corpus.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "cannot rank against an empty corpus");
  }
  for (const FeatureVector& item : corpus) {
    if (item.layer != query.layer) {
      throw Error(ErrorCode::InconsistentLayerTags,
                  std::string("corpus layer '") + layer_tag_name(item.layer) +
                      "' does not match query layer '" + layer_tag_name(query.layer) + "'");
    }
  }

  RankedRetrievalResult result;
  result.query_label = query.label;
  result.ranking.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    RankEntry entry;
    entry.corpus_index = i;
    entry.distance = distance(query, corpus[i], metric);
    entry.relevant = corpus[i].label == query.label;
    result.ranking.push_back(entry);
  }
  std::sort(result.ranking.begin(), result.ranking.end(),
            [](const RankEntry& a, const RankEntry& b) {
              return std::tie(a.distance, a.corpus_index) < std::tie(b.distance, b.corpus_index);
            });

  std::vector<char> relevance;
  relevance.reserve(result.ranking.size());
  for (const RankEntry& entry : result.ranking) relevance.push_back(entry.relevant ? 1 : 0);
  result.average_precision = average_precision(relevance);
  result.no_relevant =
      std::none_of(relevance.begin(), relevance.end(), [](char r) { return r != 0; });
  return result;
}

double mean_average_precision(const std::vector<RankedRetrievalResult>& results) {
  if (results.empty()) {
    throw Error(ErrorCode::NoQueries, "mean average precision needs at least one query");
  }
  double sum = 0.0;
  for (const RankedRetrievalResult& r : results) sum += r.average_precision;
  return sum / static_cast<double>(results.size());
}

std::vector<PrPoint> pr_points(const std::vector<char>& relevance) {
  const std::size_t total_relevant =
      static_cast<std::size_t>(std::count_if(relevance.begin(), relevance.end(),
                                             [](char r) { return r != 0; }));
  std::vector<PrPoint> points;
  points.reserve(relevance.size());
  std::size_t relevant_seen = 0;
  for (std::size_t k = 0; k < relevance.size(); ++k) {
    if (relevance[k]) ++relevant_seen;
    PrPoint point;
    point.precision = static_cast<double>(relevant_seen) / static_cast<double>(k + 1);
    point.recall = total_relevant == 0
                       ? 0.0
                       : static_cast<double>(relevant_seen) / static_cast<double>(total_relevant);
    points.push_back(point);
  }
  return points;
}

std::vector<ClassPrCurve> precision_recall_curves(
    const std::vector<RankedRetrievalResult>& results) {
  struct PooledEntry {
    double distance;
    std::size_t query_index;
    std::size_t corpus_index;
    bool relevant;
  };
  std::map<int, std::vector<PooledEntry>> pools;
  for (std::size_t q = 0; q < results.size(); ++q) {
    const RankedRetrievalResult& result = results[q];
    std::vector<PooledEntry>& pool = pools[result.query_label];
    for (const RankEntry& entry : result.ranking) {
      pool.push_back(PooledEntry{entry.distance, q, entry.corpus_index, entry.relevant});
    }
  }

  std::vector<ClassPrCurve> curves;
  curves.reserve(pools.size());
  for (auto& [label, pool] : pools) {
    std::sort(pool.begin(), pool.end(), [](const PooledEntry& a, const PooledEntry& b) {
      return std::tie(a.distance, a.query_index, a.corpus_index) <
             std::tie(b.distance, b.query_index, b.corpus_index);
    });
    std::vector<char> relevance;
    relevance.reserve(pool.size());
    for (const PooledEntry& entry : pool) relevance.push_back(entry.relevant ? 1 : 0);
    ClassPrCurve curve;
    curve.label = label;
    curve.points = pr_points(relevance);
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_pr_csv(std::ostream& out, const std::vector<ClassPrCurve>& curves,
                  const std::vector<std::string>& class_names) {
  out.precision(17);
  out << "class,rank,recall,precision\n";
  for (const ClassPrCurve& curve : curves) {
    const std::string name =
        (curve.label >= 0 && static_cast<std::size_t>(curve.label) < class_names.size())
            ? class_names[static_cast<std::size_t>(curve.label)]
            : std::to_string(curve.label);
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
      out << name << ',' << (k + 1) << ',' << curve.points[k].recall << ','
          << curve.points[k].precision << '\n';
    }
  }
}

void write_ranking_csv(std::ostream& out, const RankedRetrievalResult& result,
                       const std::vector<FeatureVector>& corpus) {
  out.precision(17);
  out << "rank,corpus_index,path,label,distance,relevant\n";
  for (std::size_t k = 0; k < result.ranking.size(); ++k) {
    const RankEntry& entry = result.ranking[k];
    const FeatureVector& item = corpus[entry.corpus_index];
    out << (k + 1) << ',' << entry.corpus_index << ',' << item.model_path << ',' << item.label
        << ',' << entry.distance << ',' << (entry.relevant ? 1 : 0) << '\n';
  }
}

}  // namespace stepgraph::retrieval
