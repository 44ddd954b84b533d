#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lfp/corpus.h"
#include "lfp/features.h"
#include "lfp/model.h"

namespace lfp {

enum class TrainMode { kSequential, kLocked, kLockFree };

const char* mode_name(TrainMode mode);
TrainMode mode_from_name(const std::string& name);

struct TrainConfig {
  int epochs = 10;
  int threads = 1;
  TrainMode mode = TrainMode::kSequential;
  std::uint64_t seed = 1;
  int order = 1;
  bool shuffle = true;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  int mistakes = 0;
  double seconds = 0.0;
  std::uint64_t cumulative_updates = 0;
};

struct TrainTrace {
  TrainMode mode = TrainMode::kSequential;
  int threads = 1;
  std::vector<EpochRecord> epochs;
  // Full-delay simulation only.
  int full_steps = 0;
  int partial_steps = 0;
  std::uint64_t total_updates = 0;

  int total_mistakes() const;
  // One line per epoch: epoch, mode, k, mistakes, seconds, cumulative_updates.
  std::string to_log() const;
};

struct TrainResult {
  std::unique_ptr<WeightModel> model;
  TrainTrace trace;
};

// Structured perceptron over projective trees (Eisner decoding), in one of
// three modes. Sequential and lockfree-with-one-thread take the identical
// code path. Stops early on a zero-mistake epoch.
TrainResult train(const Treebank& corpus, const FeatureConfig& feature_config,
                  const TrainConfig& train_config);

// Deterministic single-threaded simulation of the worst case: each time step
// collects k examples misclassified under the frozen current weights, decodes
// them all against those weights, then applies all k updates at once.
// Steps with fewer than k available mistakes are applied and flagged partial.
TrainResult train_full_delay(const Treebank& corpus, const FeatureConfig& feature_config,
                             int k, int max_steps = 1000000);

}  // namespace lfp
