#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lfp/corpus.h"

namespace lfp {

// 64-bit FNV-1a; seedless so feature indices are stable across runs.
std::uint64_t hash64(std::string_view s);

struct FeatureConfig {
  int hash_bits = 22;
  int order = 1;
  // Upper bounds of the distance buckets; distances above the last bound
  // share one overflow bucket. Defaults: 1,2,3,4 exact, 5, 6-10, 11+.
  std::vector<int> distance_buckets = {1, 2, 3, 4, 5, 10};

  std::size_t table_size() const { return std::size_t{1} << hash_bits; }
  int bucket(int distance) const;

  // Throws ContractViolation on out-of-range hash_bits/order or unsorted buckets.
  void validate() const;

  bool operator==(const FeatureConfig&) const = default;
};

// Sparse hashed feature counts.
struct FeatureVector {
  std::unordered_map<std::uint32_t, std::int32_t> entries;

  void add(std::uint32_t index, std::int32_t count = 1) { entries[index] += count; }
  void add_all(const FeatureVector& other);
  // Total emission count (collision-proof, unlike entries.size()).
  std::int64_t total_count() const;

  bool operator==(const FeatureVector&) const = default;
};

constexpr int kNoSibling = -1;

FeatureVector extract_edge_features(const Sentence& sentence, int head, int child,
                                    const FeatureConfig& config);
void extract_edge_features_into(FeatureVector& out, const Sentence& sentence, int head,
                                int child, const FeatureConfig& config);

// prev_sibling is kNoSibling for the first child on its side, otherwise the
// adjacent previous child: strictly between head and child.
FeatureVector extract_sibling_features(const Sentence& sentence, int head, int child,
                                       int prev_sibling, const FeatureConfig& config);
void extract_sibling_features_into(FeatureVector& out, const Sentence& sentence, int head,
                                   int child, int prev_sibling, const FeatureConfig& config);

// All (head, child, prev_sibling) triples of the tree, children ordered
// outward from the head on each side; first child pairs with kNoSibling.
std::vector<std::array<int, 3>> sibling_decomposition(const DependencyTree& tree);

// Sum of per-edge features; with order=2 also per-adjacent-sibling features.
FeatureVector tree_feature_vector(const Sentence& sentence, const DependencyTree& tree,
                                  const FeatureConfig& config);

// Number of template emissions for one edge (before hashing); used by tests
// and capacity planning.
int edge_template_count(int head, int child);
int sibling_template_count();

}  // namespace lfp
