#include "lfp/synth.h"

#include <random>
#include <string>

#include "lfp/decoder.h"
#include "lfp/errors.h"
#include "lfp/features.h"

namespace lfp {

void TreebankSpec::validate() const {
  if (n_sentences < 1) throw ContractViolation("n_sentences must be >= 1");
  if (min_length < 1 || min_length > max_length) {
    throw ContractViolation("bad sentence length range");
  }
  if (vocab_size < 2 || pos_size < 2) throw ContractViolation("vocab/pos size must be >= 2");
}

namespace {

// splitmix64-style mix; maps a key to a deterministic value in [-1, 1].
double teacher_value(std::uint64_t key) {
  std::uint64_t z = key + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z) / static_cast<double>(UINT64_MAX) * 2.0 - 1.0;
}

double teacher_edge_score(std::uint64_t seed, const Sentence& sent, int h, int c) {
  const int dist = std::min(std::abs(h - c), 6);
  const std::string pos_key = "tp|" + sent.tokens[h].pos + "|" + sent.tokens[c].pos + "|" +
                              (h < c ? "R" : "L") + "|" + std::to_string(dist);
  const std::string word_key = "tw|" + sent.tokens[h].form + "|" + sent.tokens[c].form + "|" +
                               (h < c ? "R" : "L");
  // Mostly pos-driven with a mild lexical perturbation, so held-out sentences
  // (unseen word pairs) remain predictable from the pos patterns alone.
  return 2.0 * teacher_value(hash64(pos_key) ^ seed) +
         0.3 * teacher_value(hash64(word_key) ^ seed) - 0.05 * std::abs(h - c);
}

}  // namespace

Treebank generate_treebank(const TreebankSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> len_dist(spec.min_length, spec.max_length);
  std::uniform_int_distribution<int> word_dist(0, spec.vocab_size - 1);

  Treebank bank;
  bank.reserve(spec.n_sentences);
  for (int i = 0; i < spec.n_sentences; ++i) {
    const int len = len_dist(rng);
    std::vector<Token> tokens;
    tokens.reserve(len);
    for (int j = 0; j < len; ++j) {
      const int w = word_dist(rng);
      tokens.push_back(Token{"w" + std::to_string(w), "p" + std::to_string(w % spec.pos_size)});
    }
    Sentence sent = Sentence::make(std::move(tokens));

    EdgeScoreMatrix m(len);
    for (int h = 0; h <= len; ++h) {
      for (int c = 1; c <= len; ++c) {
        if (h == c) continue;
        m.at(h, c) = teacher_edge_score(spec.teacher_seed, sent, h, c);
      }
    }
    DecodeResult gold = eisner_decode(m);
    bank.emplace_back(std::move(sent), std::move(gold.tree));
  }
  return bank;
}

}  // namespace lfp
