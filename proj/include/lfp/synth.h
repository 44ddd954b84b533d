#pragma once

#include <cstdint>

#include "lfp/corpus.h"

namespace lfp {

// Synthetic treebank for accuracy/speed experiments when no licensed corpus
// is available. Sentences are sampled from a small vocabulary; gold trees are
// the max-score projective trees under a hidden deterministic teacher scorer
// over pos/word pairs, so the data is learnable by an edge-factored model.
struct TreebankSpec {
  int n_sentences = 1000;
  int min_length = 4;
  int max_length = 10;
  int vocab_size = 200;
  int pos_size = 12;
  std::uint64_t seed = 1;          // sentence sampling
  std::uint64_t teacher_seed = 7;  // hidden scorer; keep fixed across train/test splits

  void validate() const;
};

Treebank generate_treebank(const TreebankSpec& spec);

}  // namespace lfp
