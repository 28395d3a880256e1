#pragma once

#include <iosfwd>
#include <string>

#include "stepgraph/graph/cad_graph.hpp"

namespace stepgraph::graph {

/// GraphML 1.0, directed. Node data: instance_id (int), type (string),
/// attrs (string, percent-encoded and '|'-joined). Parallel edges appear as
/// repeated edge elements. Graph data: label and source_path when present.
void export_graphml(const CadGraph& graph, std::ostream& out);
void export_graphml(const CadGraph& graph, const std::string& path);

std::string graphml_string(const CadGraph& graph);

/// Inverse of export_graphml. Throws MalformedGraphml on anything the
/// exporter would not have written.
CadGraph import_graphml(std::istream& in);
CadGraph import_graphml_file(const std::string& path);
CadGraph import_graphml_string(const std::string& text);

}  // namespace stepgraph::graph
