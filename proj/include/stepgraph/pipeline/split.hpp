#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stepgraph/pipeline/manifest.hpp"

namespace stepgraph::pipeline {

enum class SplitTag { Train, Val, Test };

const char* split_tag_name(SplitTag tag);

struct SplitAssignment {
  std::vector<SplitTag> tags;  // parallel to manifest.entries
  std::uint64_t seed = 0;

  std::vector<std::size_t> indices_of(SplitTag tag) const;
  std::size_t count_of(SplitTag tag) const;
};

/// Stratified 90/10 train/test split of the whole corpus, then 10% of the
/// remaining train pool as validation; per-class quotas by largest-remainder
/// apportionment, shuffled deterministically in the seed. Throws
/// ClassTooSmall when any class holds fewer than 3 models.
SplitAssignment split_dataset(const DatasetManifest& manifest, std::uint64_t seed);

}  // namespace stepgraph::pipeline
