#include "stepgraph/pipeline/split.hpp"

#include <algorithm>
#include <numeric>

#include "stepgraph/error.hpp"
#include "stepgraph/random.hpp"

namespace stepgraph::pipeline {

const char* split_tag_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::Train: return "train";
    case SplitTag::Val: return "val";
    case SplitTag::Test: return "test";
  }
  return "train";
}

std::vector<std::size_t> SplitAssignment::indices_of(SplitTag tag) const {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == tag) indices.push_back(i);
  }
  return indices;
}

std::size_t SplitAssignment::count_of(SplitTag tag) const {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), tag));
}

namespace {

/// Largest-remainder apportionment of `target` slots over groups sized
/// `counts` (which sum to `total`). Exact integer arithmetic; remainder ties
/// go to the lower group id.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& counts, std::size_t target,
                                   std::size_t total) {
  const std::size_t n = counts.size();
  std::vector<std::size_t> base(n);
  std::vector<std::size_t> remainder(n);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t scaled = counts[c] * target;
    base[c] = scaled / total;
    remainder[c] = scaled % total;
    assigned += base[c];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < target && k < n; ++k) {
    const std::size_t c = order[k];
    if (base[c] < counts[c]) {
      ++base[c];
      ++assigned;
    }
  }
  return base;
}

/// Nearest integer to 10% of n (half rounds up).
std::size_t tenth_of(std::size_t n) { return (n + 5) / 10; }

}  // namespace

SplitAssignment split_dataset(const DatasetManifest& manifest, std::uint64_t seed) {
  validate_manifest(manifest);
  const auto class_count = static_cast<std::size_t>(manifest.class_count());

  std::vector<std::vector<std::size_t>> groups(class_count);
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    groups[static_cast<std::size_t>(manifest.entries[i].class_id)].push_back(i);
  }
  for (std::size_t c = 0; c < class_count; ++c) {
    if (groups[c].size() < 3) {
      throw Error(ErrorCode::ClassTooSmall,
                  "class '" + manifest.class_names[c] + "' holds only " +
                      std::to_string(groups[c].size()) + " models; at least 3 are needed");
    }
  }

  Rng rng(seed);
  for (std::vector<std::size_t>& group : groups) rng.shuffle(group);

  std::vector<std::size_t> sizes(class_count);
  for (std::size_t c = 0; c < class_count; ++c) sizes[c] = groups[c].size();
  const std::size_t total = manifest.entries.size();

  const std::vector<std::size_t> test_counts = apportion(sizes, tenth_of(total), total);

  std::vector<std::size_t> pool(class_count);
  std::size_t pool_total = 0;
  for (std::size_t c = 0; c < class_count; ++c) {
    pool[c] = sizes[c] - test_counts[c];
    pool_total += pool[c];
  }
  const std::vector<std::size_t> val_counts = apportion(pool, tenth_of(pool_total), pool_total);

  SplitAssignment assignment;
  assignment.seed = seed;
  assignment.tags.assign(total, SplitTag::Train);
  for (std::size_t c = 0; c < class_count; ++c) {
    const std::vector<std::size_t>& group = groups[c];
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (k < test_counts[c]) {
        assignment.tags[group[k]] = SplitTag::Test;
      } else if (k < test_counts[c] + val_counts[c]) {
        assignment.tags[group[k]] = SplitTag::Val;
      }
    }
  }
  return assignment;
}

}  // namespace stepgraph::pipeline
