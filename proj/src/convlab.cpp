#include "lfp/convlab.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "lfp/decoder.h"
#include "lfp/errors.h"

namespace lfp {

void SeparableSpec::validate() const {
  if (n_sentences < 1) throw ContractViolation("n_sentences must be >= 1");
  if (min_length < 2 || min_length > max_length || max_length > 6) {
    throw ContractViolation("sentence lengths must satisfy 2 <= min <= max <= 6");
  }
  if (vocab_size < 2) throw ContractViolation("vocab_size must be >= 2");
  if (target_margin <= 0.0) throw ContractViolation("target_margin must be positive");
  if (max_attempts_per_sentence < 1) throw ContractViolation("attempt budget must be >= 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vocab {
  std::vector<Token> items;
};

Vocab make_vocab(int size) {
  Vocab v;
  const int n_pos = std::max(2, std::min(5, size));
  for (int i = 0; i < size; ++i) {
    v.items.push_back(Token{"w" + std::to_string(i), "p" + std::to_string(i % n_pos)});
  }
  return v;
}

Sentence sample_sentence(std::mt19937_64& rng, const Vocab& vocab, int min_len, int max_len) {
  std::uniform_int_distribution<int> len_dist(min_len, max_len);
  std::uniform_int_distribution<std::size_t> word_dist(0, vocab.items.size() - 1);
  const int len = len_dist(rng);
  std::vector<Token> tokens;
  tokens.reserve(len);
  for (int i = 0; i < len; ++i) tokens.push_back(vocab.items[word_dist(rng)]);
  return Sentence::make(std::move(tokens));
}

double sparse_dot(std::span<const double> dense, const FeatureVector& fv) {
  double s = 0.0;
  for (const auto& [idx, c] : fv.entries) s += c * dense[idx];
  return s;
}

struct BestTwo {
  DependencyTree best_tree;
  double best = -kInf;
  double second = -kInf;
};

BestTwo score_candidates(const Sentence& sent, std::span<const double> direction,
                         const FeatureConfig& config) {
  BestTwo out;
  enumerate_projective_trees(sent.length(), [&](const DependencyTree& tree) {
    const double s = sparse_dot(direction, tree_feature_vector(sent, tree, config));
    if (s > out.best) {
      out.second = out.best;
      out.best = s;
      out.best_tree = tree;
    } else if (s > out.second) {
      out.second = s;
    }
  });
  return out;
}

}  // namespace

SeparableCorpus generate_separable_corpus(const SeparableSpec& spec, const FeatureConfig& config) {
  spec.validate();
  config.validate();

  std::mt19937_64 rng(spec.seed);
  const Vocab vocab = make_vocab(spec.vocab_size);

  // Support pool: restrict U to features that actually occur, so the unit
  // norm is not spread over the whole table and margins stay usable. The
  // pool's candidate feature vectors are also used to sharpen U below.
  struct PoolSentence {
    std::vector<FeatureVector> candidates;
  };
  std::vector<PoolSentence> pool;
  std::unordered_set<std::uint32_t> support;
  const int pool_size = std::max(40, spec.n_sentences / 4);
  for (int i = 0; i < pool_size; ++i) {
    Sentence sent = sample_sentence(rng, vocab, spec.min_length, spec.max_length);
    PoolSentence ps;
    enumerate_projective_trees(sent.length(), [&](const DependencyTree& tree) {
      ps.candidates.push_back(tree_feature_vector(sent, tree, config));
      for (const auto& [idx, c] : ps.candidates.back().entries) support.insert(idx);
    });
    pool.push_back(std::move(ps));
  }

  std::vector<double> direction(config.table_size(), 0.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::uint32_t idx : support) direction[idx] = gauss(rng);

  auto normalize = [&] {
    double norm_sq = 0.0;
    for (std::uint32_t idx : support) norm_sq += direction[idx] * direction[idx];
    if (norm_sq <= 0.0) throw GenerationError("empty feature support", 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::uint32_t idx : support) direction[idx] *= inv;
  };
  normalize();

  // Widen U's own best-vs-second gaps on the pool: repeatedly push U toward
  // the difference between its current top tree and the runner-up. The gold
  // trees are fixed only afterwards, so any resulting U is a valid separator.
  for (int round = 0; round < 40; ++round) {
    for (const auto& ps : pool) {
      const FeatureVector* best = nullptr;
      const FeatureVector* second = nullptr;
      double best_s = -kInf, second_s = -kInf;
      for (const auto& fv : ps.candidates) {
        const double s = sparse_dot(direction, fv);
        if (s > best_s) {
          second_s = best_s;
          second = best;
          best_s = s;
          best = &fv;
        } else if (s > second_s) {
          second_s = s;
          second = &fv;
        }
      }
      if (!best || !second || best_s - second_s >= 2.0 * spec.target_margin) continue;
      for (const auto& [idx, c] : best->entries) direction[idx] += 0.05 * c;
      for (const auto& [idx, c] : second->entries) direction[idx] -= 0.05 * c;
    }
    normalize();
  }

  SeparableCorpus out;
  out.direction = std::move(direction);
  double best_rejected = -kInf;
  for (int i = 0; i < spec.n_sentences; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < spec.max_attempts_per_sentence; ++attempt) {
      Sentence sent = sample_sentence(rng, vocab, spec.min_length, spec.max_length);
      BestTwo bt = score_candidates(sent, out.direction, config);
      const double margin = bt.best - bt.second;
      if (margin >= spec.target_margin) {
        out.corpus.emplace_back(std::move(sent), std::move(bt.best_tree));
        accepted = true;
        break;
      }
      best_rejected = std::max(best_rejected, margin);
    }
    if (!accepted) {
      throw GenerationError("resampling budget exhausted at sentence " + std::to_string(i) +
                                "; best achieved margin " + std::to_string(best_rejected),
                            best_rejected);
    }
  }
  return out;
}

double compute_margin(const Treebank& corpus, std::span<const double> direction,
                      const FeatureConfig& config) {
  config.validate();
  double margin = kInf;
  for (const auto& [sent, gold] : corpus) {
    if (sent.length() > 8) throw ContractViolation("compute_margin: sentence length > 8");
    const double gold_score = sparse_dot(direction, tree_feature_vector(sent, gold, config));
    enumerate_projective_trees(sent.length(), [&](const DependencyTree& tree) {
      if (tree.heads == gold.heads) return;
      const double s = sparse_dot(direction, tree_feature_vector(sent, tree, config));
      margin = std::min(margin, gold_score - s);
    });
  }
  return margin;
}

namespace {

double diff_norm(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  for (const auto& [idx, c] : a.entries) {
    auto it = b.entries.find(idx);
    const double d = c - (it == b.entries.end() ? 0 : it->second);
    sum += d * d;
  }
  for (const auto& [idx, c] : b.entries) {
    if (!a.entries.contains(idx)) sum += static_cast<double>(c) * c;
  }
  return std::sqrt(sum);
}

}  // namespace

double compute_radius(const Treebank& corpus, const FeatureConfig& config) {
  config.validate();
  double radius = 0.0;
  for (const auto& [sent, gold] : corpus) {
    if (sent.length() > 8) throw ContractViolation("compute_radius: sentence length > 8");
    const FeatureVector gold_fv = tree_feature_vector(sent, gold, config);
    enumerate_projective_trees(sent.length(), [&](const DependencyTree& tree) {
      radius = std::max(radius, diff_norm(gold_fv, tree_feature_vector(sent, tree, config)));
    });
  }
  return radius;
}

ConvergenceReport verify_bounds(const TrainTrace& trace, double delta, double radius, int k) {
  if (k < 1) throw ContractViolation("verify_bounds: k must be >= 1");
  ConvergenceReport r;
  r.delta = delta;
  r.radius = radius;
  r.k = k;
  r.partial_steps = trace.partial_steps;
  if (trace.epochs.empty()) {
    r.steps_observed = trace.full_steps;
  } else {
    r.steps_observed = static_cast<long>((trace.total_updates + k - 1) / k);
  }
  r.separable = delta > 0.0;
  if (r.separable) {
    r.bound_worst = (radius * radius) / (delta * delta);
    r.bound_optimal = r.bound_worst / k;
    r.worst_case_ok = static_cast<double>(r.steps_observed) <= r.bound_worst;
    r.optimal_ratio = r.bound_optimal > 0.0 ? static_cast<double>(r.steps_observed) / r.bound_optimal
                                            : 0.0;
  } else {
    r.bound_worst = kInf;
    r.bound_optimal = kInf;
    r.worst_case_ok = false;
    r.optimal_ratio = 0.0;
  }
  return r;
}

std::string ConvergenceReport::to_text() const {
  std::ostringstream out;
  out << "convergence report (k=" << k << ")\n";
  if (!separable) {
    out << "  not separable (delta <= 0); bounds vacuous\n";
    return out.str();
  }
  out << "  delta            " << delta << "\n"
      << "  radius           " << radius << "\n"
      << "  steps observed   " << steps_observed
      << (partial_steps > 0 ? " (+" + std::to_string(partial_steps) + " partial)" : "") << "\n"
      << "  worst-case bound " << bound_worst << "  -> "
      << (worst_case_ok ? "satisfied" : "VIOLATED") << "\n"
      << "  optimal bound    " << bound_optimal << "  (steps/bound = " << optimal_ratio << ")\n";
  return out.str();
}

std::string ConvergenceReport::to_json() const {
  nlohmann::json j;
  j["delta"] = delta;
  j["radius"] = radius;
  j["k"] = k;
  j["steps_observed"] = steps_observed;
  j["partial_steps"] = partial_steps;
  j["separable"] = separable;
  if (separable) {
    j["bound_worst"] = bound_worst;
    j["bound_optimal"] = bound_optimal;
    j["worst_case_ok"] = worst_case_ok;
    j["optimal_ratio"] = optimal_ratio;
  }
  return j.dump();
}

}  // namespace lfp
