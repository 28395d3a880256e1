#include "stepgraph/graph/cad_graph.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "stepgraph/error.hpp"

namespace stepgraph::graph {

namespace {

void collect_attrs(const step::Argument& arg, std::vector<std::string>& out) {
  using namespace step;
  if (arg.is<NumberArg>()) {
    out.push_back(arg.as<NumberArg>().text);
  } else if (arg.is<TextArg>()) {
    out.push_back(arg.as<TextArg>().value);
  } else if (arg.is<EnumArg>()) {
    out.push_back(arg.as<EnumArg>().name);
  } else if (arg.is<ListArg>()) {
    for (const Argument& item : arg.as<ListArg>().items)
      collect_attrs(item, out);
  } else if (arg.is<TypedArg>()) {
    collect_attrs(arg.as<TypedArg>().inner.front(), out);
  }
  // references become edges, $ and * carry nothing
}

}  // namespace

std::string type_token_for(const step::EntityInstance& instance) {
  if (!instance.is_complex()) return instance.types.front();
  std::vector<std::string> sorted = instance.types;
  std::sort(sorted.begin(), sorted.end());
  std::string token;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i) token += '+';
    token += sorted[i];
  }
  return token;
}

CadGraph build_graph(const step::StepFile& file, BuildStats* stats) {
  CadGraph graph;
  graph.nodes.reserve(file.instances.size());

  std::vector<const step::EntityInstance*> ordered;
  ordered.reserve(file.instances.size());
  for (const step::EntityInstance& inst : file.instances)
    ordered.push_back(&inst);
  std::sort(ordered.begin(), ordered.end(),
            [](const step::EntityInstance* a, const step::EntityInstance* b) {
              return a->id < b->id;
            });

  std::unordered_map<long long, int> index_of_id;
  index_of_id.reserve(ordered.size());
  for (const step::EntityInstance* inst : ordered) {
    GraphNode node;
    node.instance_id = inst->id;
    node.type_token = type_token_for(*inst);
    for (const step::ArgumentList& args : inst->args)
      for (const step::Argument& arg : args) collect_attrs(arg, node.attrs);
    index_of_id.emplace(inst->id, static_cast<int>(graph.nodes.size()));
    graph.nodes.push_back(std::move(node));
  }

  std::size_t dropped = 0;
  for (const step::EntityInstance* inst : ordered) {
    const int source = index_of_id.at(inst->id);
    step::for_each_reference(*inst, [&](long long target, const std::string&) {
      auto it = index_of_id.find(target);
      if (it == index_of_id.end()) {
        ++dropped;
      } else {
        graph.edges.emplace_back(source, it->second);
      }
    });
  }
  if (stats) stats->dangling_dropped = dropped;
  return graph;
}

DecomposeResult decompose_assembly(const CadGraph& graph,
                                   const std::vector<std::string>& root_types) {
  DecomposeResult result;

  std::vector<std::vector<int>> out_edges(graph.nodes.size());
  for (const auto& [src, dst] : graph.edges) out_edges[src].push_back(dst);

  std::vector<int> roots;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (std::find(root_types.begin(), root_types.end(),
                  graph.nodes[i].type_token) != root_types.end())
      roots.push_back(static_cast<int>(i));
  }

  if (roots.empty()) {
    result.components.push_back(graph);
    result.used_fallback = true;
    return result;
  }

  for (int root : roots) {
    std::vector<char> reachable(graph.nodes.size(), 0);
    std::vector<int> stack{root};
    reachable[root] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int next : out_edges[node]) {
        if (!reachable[next]) {
          reachable[next] = 1;
          stack.push_back(next);
        }
      }
    }

    CadGraph sub;
    sub.source_path = graph.source_path;
    sub.label = graph.label;
    std::vector<int> new_index(graph.nodes.size(), -1);
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      if (reachable[i]) {
        new_index[i] = static_cast<int>(sub.nodes.size());
        sub.nodes.push_back(graph.nodes[i]);
      }
    }
    for (const auto& [src, dst] : graph.edges) {
      if (reachable[src] && reachable[dst])
        sub.edges.emplace_back(new_index[src], new_index[dst]);
    }
    result.components.push_back(std::move(sub));
  }
  return result;
}

CorpusStats graph_stats(
    const std::vector<std::tuple<int, std::string, std::size_t>>& models) {
  CorpusStats stats;
  std::map<int, ClassNodeStats> classes;
  std::map<int, std::vector<double>> counts;
  for (const auto& [class_id, class_name, nodes] : models) {
    auto& entry = classes[class_id];
    entry.class_id = class_id;
    if (entry.class_name.empty()) entry.class_name = class_name;
    counts[class_id].push_back(static_cast<double>(nodes));
    stats.total_models += 1;
    stats.total_nodes += nodes;
  }
  for (auto& [class_id, entry] : classes) {
    const std::vector<double>& values = counts[class_id];
    entry.model_count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    entry.mean_nodes = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) {
      const double d = v - entry.mean_nodes;
      sq += d * d;
    }
    entry.variance_nodes = sq / static_cast<double>(values.size());
    stats.per_class.push_back(entry);
  }
  return stats;
}

}  // namespace stepgraph::graph
