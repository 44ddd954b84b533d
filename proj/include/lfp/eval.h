#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lfp/corpus.h"
#include "lfp/features.h"
#include "lfp/trainer.h"

namespace lfp {

struct EvalResult {
  long correct_heads = 0;
  long total_tokens = 0;

  double uas() const { return total_tokens == 0 ? 0.0 : static_cast<double>(correct_heads) / total_tokens; }

  EvalResult& operator+=(const EvalResult& o) {
    correct_heads += o.correct_heads;
    total_tokens += o.total_tokens;
    return *this;
  }
};

// Unlabeled attachment: fraction of real tokens whose predicted head matches
// gold. ROOT is excluded from the totals.
EvalResult uas(const DependencyTree& pred, const DependencyTree& gold);

struct BenchResult {
  TrainMode mode = TrainMode::kSequential;
  int threads = 1;
  double seconds_per_pass = 0.0;
  double speedup = 0.0;  // baseline seconds / seconds_per_pass
  long peak_memory_bytes = 0;
};

// Times one full training pass (decode + update) per grid entry: one warm-up
// pass, then the median of `repetitions` timed passes over a fresh model
// each. The first entry must be the sequential baseline.
std::vector<BenchResult> bench(const Treebank& corpus, const FeatureConfig& config,
                               const std::vector<std::pair<TrainMode, int>>& grid,
                               int repetitions);

std::string bench_table(const std::vector<BenchResult>& results);

// Process high-water-mark RSS in bytes (VmHWM).
long peak_rss_bytes();

}  // namespace lfp
