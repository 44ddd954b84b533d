#pragma once

#include <functional>
#include <vector>

#include "lfp/corpus.h"
#include "lfp/errors.h"
#include "lfp/features.h"

namespace lfp {

// scores(head, child) for head in 0..n, child in 1..n; diagonal unused.
struct EdgeScoreMatrix {
  int n = 0;
  std::vector<double> scores;

  explicit EdgeScoreMatrix(int n_) : n(n_), scores((n_ + 1) * (n_ + 1), 0.0) {}
  double& at(int head, int child) { return scores[head * (n + 1) + child]; }
  double at(int head, int child) const { return scores[head * (n + 1) + child]; }
};

// scores(head, child, prev_sibling) with prev_sibling == kNoSibling for the
// first child on its side.
struct SiblingScoreTable {
  int n = 0;
  std::vector<double> scores;

  explicit SiblingScoreTable(int n_)
      : n(n_), scores(static_cast<std::size_t>(n_ + 1) * (n_ + 1) * (n_ + 2), 0.0) {}
  std::size_t index(int head, int child, int sib) const {
    const int s = (sib == kNoSibling) ? n + 1 : sib;
    return (static_cast<std::size_t>(head) * (n + 1) + child) * (n + 2) + s;
  }
  double& at(int head, int child, int sib) { return scores[index(head, child, sib)]; }
  double at(int head, int child, int sib) const { return scores[index(head, child, sib)]; }
};

struct DecodeResult {
  DependencyTree tree;
  double score = 0.0;
};

// Max-score projective tree under edge-factored scoring. O(n^3) time,
// O(n^2) space. Deterministic: increasing span length, leftmost split wins ties.
DecodeResult eisner_decode(const EdgeScoreMatrix& matrix);

// Max-score projective tree under edge + adjacent-sibling scoring. O(n^3).
DecodeResult eisner_decode_second_order(const EdgeScoreMatrix& matrix,
                                        const SiblingScoreTable& siblings);

// Calls fn for every valid projective tree over n tokens, in lexicographic
// order of the head array.
void enumerate_projective_trees(int n, const std::function<void(const DependencyTree&)>& fn);

// Exhaustive max over all projective trees; ties broken toward the
// lexicographically smallest head array. Refuses n > 8.
DecodeResult brute_force_decode(const std::function<double(const DependencyTree&)>& score_fn,
                                int n);

double tree_score(const EdgeScoreMatrix& matrix, const DependencyTree& tree);
double tree_score_second_order(const EdgeScoreMatrix& matrix, const SiblingScoreTable& siblings,
                               const DependencyTree& tree);

// Builds the edge score matrix for a sentence; scorer is any callable
// double(const FeatureVector&).
template <typename Scorer>
EdgeScoreMatrix build_edge_scores(const Sentence& sentence, const FeatureConfig& config,
                                  Scorer&& scorer) {
  const int n = sentence.length();
  EdgeScoreMatrix m(n);
  FeatureVector fv;
  for (int h = 0; h <= n; ++h) {
    for (int c = 1; c <= n; ++c) {
      if (h == c) continue;
      fv.entries.clear();
      extract_edge_features_into(fv, sentence, h, c, config);
      m.at(h, c) = scorer(fv);
    }
  }
  return m;
}

template <typename Scorer>
SiblingScoreTable build_sibling_scores(const Sentence& sentence, const FeatureConfig& config,
                                       Scorer&& scorer) {
  const int n = sentence.length();
  SiblingScoreTable t(n);
  FeatureVector fv;
  for (int h = 0; h <= n; ++h) {
    for (int c = 1; c <= n; ++c) {
      if (h == c) continue;
      fv.entries.clear();
      extract_sibling_features_into(fv, sentence, h, c, kNoSibling, config);
      t.at(h, c, kNoSibling) = scorer(fv);
      const int lo = std::min(h, c);
      const int hi = std::max(h, c);
      for (int s = lo + 1; s < hi; ++s) {
        fv.entries.clear();
        extract_sibling_features_into(fv, sentence, h, c, s, config);
        t.at(h, c, s) = scorer(fv);
      }
    }
  }
  return t;
}

// Scores all candidate edges (and sibling parts for order 2) and decodes.
template <typename Scorer>
DecodeResult decode_sentence(const Sentence& sentence, const FeatureConfig& config,
                             Scorer&& scorer) {
  EdgeScoreMatrix m = build_edge_scores(sentence, config, scorer);
  if (config.order == 2) {
    SiblingScoreTable t = build_sibling_scores(sentence, config, scorer);
    return eisner_decode_second_order(m, t);
  }
  return eisner_decode(m);
}

}  // namespace lfp
