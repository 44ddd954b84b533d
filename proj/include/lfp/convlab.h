#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lfp/corpus.h"
#include "lfp/features.h"
#include "lfp/trainer.h"

namespace lfp {

struct SeparableSpec {
  int n_sentences = 100;
  int min_length = 2;
  int max_length = 3;
  int vocab_size = 8;
  double target_margin = 0.3;
  std::uint64_t seed = 1;
  int max_attempts_per_sentence = 1000;

  void validate() const;
};

struct SeparableCorpus {
  Treebank corpus;
  std::vector<double> direction;  // unit separator U over the hashed feature space
};

// Builds a unit direction U and a corpus whose gold trees are the U-optimal
// projective trees, each beating every other candidate by at least
// target_margin (sentences are rejected and resampled until they do).
// Deterministic for a fixed seed. Throws GenerationError when the resampling
// budget runs out.
SeparableCorpus generate_separable_corpus(const SeparableSpec& spec, const FeatureConfig& config);

// Min over all sentences and all incorrect candidates of
// U.phi(gold) - U.phi(z), by exhaustive enumeration. May be <= 0 for
// non-separable input; +infinity when no incorrect candidate exists.
double compute_margin(const Treebank& corpus, std::span<const double> direction,
                      const FeatureConfig& config);

// Max over all sentences and candidates of ||phi(gold) - phi(z)||_2.
double compute_radius(const Treebank& corpus, const FeatureConfig& config);

struct ConvergenceReport {
  double delta = 0.0;
  double radius = 0.0;
  int k = 1;
  long steps_observed = 0;
  int partial_steps = 0;
  double bound_worst = 0.0;    // R^2 / delta^2
  double bound_optimal = 0.0;  // bound_worst / k
  bool separable = false;
  bool worst_case_ok = false;
  double optimal_ratio = 0.0;  // steps / bound_optimal

  std::string to_text() const;
  std::string to_json() const;
};

// For a full-delay trace, steps are the recorded full steps (partial steps
// flagged separately); for a parallel training trace, steps are
// ceil(total_updates / k).
ConvergenceReport verify_bounds(const TrainTrace& trace, double delta, double radius, int k);

}  // namespace lfp
