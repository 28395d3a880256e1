#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stepgraph/pipeline/manifest.hpp"
#include "stepgraph/step/parser.hpp"

namespace stepgraph::pipeline {

/// Entity-graph shape a synthetic class is built around.
enum class TopologyFamily { Star, Chain, Ring, Tree, Grid, Fan };

struct SyntheticClassSpec {
  std::string name;
  TopologyFamily topology = TopologyFamily::Star;
  int min_units = 4;
  int max_units = 8;
  int min_sub = 0;  // second size axis, used by Tree and Grid
  int max_sub = 0;
};

/// Six part families with distinct entity types, topologies and mean sizes.
std::vector<SyntheticClassSpec> default_class_specs();

/// One AP214-flavored model built around the spec's topology: a shared
/// product-structure skeleton (including one complex multi-type instance)
/// plus a randomized number of class-specific geometry units. Deterministic
/// in file_seed.
step::StepFile synthesize_model(const SyntheticClassSpec& spec, std::uint64_t file_seed,
                                const std::string& part_name);

/// Writes count_per_class files per spec under out_dir/<class>/ and returns
/// the manifest (paths relative to out_dir). Same seed, same bytes.
/// Throws InvalidArgument on fewer than 2 specs or a non-positive count.
DatasetManifest generate_synthetic_corpus(const std::filesystem::path& out_dir,
                                          const std::vector<SyntheticClassSpec>& specs,
                                          int count_per_class, std::uint64_t seed);

}  // namespace stepgraph::pipeline
