#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lfp/features.h"

namespace lfp {

double dot(std::span<const double> weights, const FeatureVector& fv);

// Shared parameter vector with lazily-averaged bookkeeping.
//
// Concurrency: score() may run concurrently with update() (torn ensembles are
// accepted); update() may run from multiple threads, each per-coordinate
// addition is an atomic read-modify-write so no update is lost at coordinate
// granularity. averaged() must only be called after writers quiesce.
class WeightModel {
 public:
  explicit WeightModel(FeatureConfig config);

  WeightModel(const WeightModel&) = delete;
  WeightModel& operator=(const WeightModel&) = delete;

  const FeatureConfig& config() const { return config_; }

  double weight(std::uint32_t index) const {
    return weights_[index].load(std::memory_order_relaxed);
  }
  double score(const FeatureVector& fv) const;

  // Applies weights += gold - pred coordinate-wise and advances the
  // averaging bookkeeping. Indices with net-zero delta are untouched.
  void update(const FeatureVector& gold_fv, const FeatureVector& pred_fv);

  std::uint64_t updates() const { return updates_.load(std::memory_order_relaxed); }

  // Current raw (pre-averaging) weights.
  std::vector<double> raw_weights() const;

  // Mean of the weight vector over all updates so far; raw weights if no
  // update has happened. Side-effect free and idempotent.
  std::vector<double> averaged() const;

  static void save(const std::string& path, const FeatureConfig& config,
                   std::span<const double> weights);
  struct Loaded {
    FeatureConfig config;
    std::vector<double> weights;
  };
  static Loaded load(const std::string& path);

 private:
  FeatureConfig config_;
  std::vector<std::atomic<double>> weights_;
  std::vector<std::atomic<double>> accum_;        // sum of historical values per coordinate
  std::vector<std::atomic<std::uint64_t>> last_;  // update index of last touch
  std::atomic<std::uint64_t> updates_{0};
};

}  // namespace lfp
