#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stepgraph/step/argument.hpp"
#include "stepgraph/step/token.hpp"

namespace stepgraph::step {

struct HeaderRecord {
  std::string name;
  ArgumentList args;
  bool operator==(const HeaderRecord&) const = default;
};

/// One DATA-section record. types has one entry for simple instances and
/// several for Part 21 complex instances; args[i] belongs to types[i].
struct EntityInstance {
  long long id = 0;
  std::vector<std::string> types;
  std::vector<ArgumentList> args;
  bool operator==(const EntityInstance&) const = default;

  bool is_complex() const { return types.size() > 1; }
};

struct StepFile {
  std::vector<HeaderRecord> header;
  std::vector<EntityInstance> instances;  // file order
  std::string schema_name;

  /// id -> position in instances, built by parse_file.
  std::unordered_map<long long, std::size_t> id_index;

  const EntityInstance* find(long long id) const {
    auto it = id_index.find(id);
    return it == id_index.end() ? nullptr : &instances[it->second];
  }
};

struct DanglingReference {
  long long source_id = 0;
  long long target_id = 0;
  std::string argument_path;  // e.g. "2" or "3.0"; complex: "1:2"
  bool operator==(const DanglingReference&) const = default;
};

StepFile parse_file(const std::vector<Token>& tokens);

/// Convenience: tokenize + parse.
StepFile parse_text(std::string_view text);
StepFile parse_path(const std::string& path);

/// Reports unresolved Reference arguments ordered by source id, then
/// argument position. Empty result means every reference resolves.
std::vector<DanglingReference> validate_references(const StepFile& file);

/// Serializes back to Part 21 clear text. Re-parsing the output yields an
/// instance table equal in ids, types and argument trees.
std::string write_text(const StepFile& file);

/// Walks every Reference argument of an instance in argument order,
/// recursing through lists and typed wrappers.
void for_each_reference(
    const EntityInstance& instance,
    const std::function<void(long long target, const std::string& path)>& fn);

}  // namespace stepgraph::step
