#include "lfp/trainer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "lfp/decoder.h"
#include "lfp/errors.h"

namespace lfp {

const char* mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::kSequential: return "sequential";
    case TrainMode::kLocked: return "locked";
    case TrainMode::kLockFree: return "lockfree";
  }
  return "?";
}

TrainMode mode_from_name(const std::string& name) {
  if (name == "sequential") return TrainMode::kSequential;
  if (name == "locked") return TrainMode::kLocked;
  if (name == "lockfree") return TrainMode::kLockFree;
  throw ContractViolation("unknown train mode: " + name);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ContractViolation("epochs must be >= 1");
  if (threads < 1) throw ContractViolation("threads must be >= 1");
  if (mode == TrainMode::kSequential && threads != 1) {
    throw ContractViolation("sequential mode requires threads == 1");
  }
  if (order != 1 && order != 2) throw ContractViolation("order must be 1 or 2");
}

int TrainTrace::total_mistakes() const {
  int total = 0;
  for (const auto& e : epochs) total += e.mistakes;
  return total;
}

std::string TrainTrace::to_log() const {
  std::ostringstream out;
  for (const auto& e : epochs) {
    out << "epoch=" << e.epoch << " mode=" << mode_name(mode) << " k=" << threads
        << " mistakes=" << e.mistakes << " seconds=" << e.seconds
        << " cumulative_updates=" << e.cumulative_updates << '\n';
  }
  return out.str();
}

namespace {

// Per-sentence candidate features, extracted once outside any lock.
struct SentenceFeatures {
  int n = 0;
  std::vector<FeatureVector> edge;  // (n+1)*(n+1), indexed head*(n+1)+child
  std::vector<FeatureVector> sib;   // (n+1)*(n+1)*(n+2) when order == 2

  const FeatureVector& edge_fv(int h, int c) const { return edge[h * (n + 1) + c]; }
  const FeatureVector& sib_fv(int h, int c, int s) const {
    const int si = (s == kNoSibling) ? n + 1 : s;
    return sib[(static_cast<std::size_t>(h) * (n + 1) + c) * (n + 2) + si];
  }
};

SentenceFeatures extract_all(const Sentence& sent, const FeatureConfig& fc) {
  SentenceFeatures sf;
  const int n = sent.length();
  sf.n = n;
  sf.edge.resize(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int h = 0; h <= n; ++h) {
    for (int c = 1; c <= n; ++c) {
      if (h == c) continue;
      extract_edge_features_into(sf.edge[h * (n + 1) + c], sent, h, c, fc);
    }
  }
  if (fc.order == 2) {
    sf.sib.resize(static_cast<std::size_t>(n + 1) * (n + 1) * (n + 2));
    for (int h = 0; h <= n; ++h) {
      for (int c = 1; c <= n; ++c) {
        if (h == c) continue;
        auto& null_fv = sf.sib[(static_cast<std::size_t>(h) * (n + 1) + c) * (n + 2) + n + 1];
        extract_sibling_features_into(null_fv, sent, h, c, kNoSibling, fc);
        const int lo = std::min(h, c);
        const int hi = std::max(h, c);
        for (int s = lo + 1; s < hi; ++s) {
          auto& fv = sf.sib[(static_cast<std::size_t>(h) * (n + 1) + c) * (n + 2) + s];
          extract_sibling_features_into(fv, sent, h, c, s, fc);
        }
      }
    }
  }
  return sf;
}

FeatureVector assemble_tree_fv(const SentenceFeatures& sf, const DependencyTree& tree,
                               const FeatureConfig& fc) {
  FeatureVector out;
  for (int j = 1; j <= sf.n; ++j) out.add_all(sf.edge_fv(tree.heads[j], j));
  if (fc.order == 2) {
    for (const auto& [h, c, s] : sibling_decomposition(tree)) {
      out.add_all(sf.sib_fv(h, c, s));
    }
  }
  return out;
}

struct DecodedExample {
  bool mistake = false;
  FeatureVector gold_fv;
  FeatureVector pred_fv;
};

// Scores candidates against the live weights, decodes, and checks the
// update-validity invariant against the scoring-time snapshot.
DecodedExample decode_against(const WeightModel& model, const SentenceFeatures& sf,
                              const DependencyTree& gold, const FeatureConfig& fc) {
  const int n = sf.n;
  EdgeScoreMatrix m(n);
  for (int h = 0; h <= n; ++h) {
    for (int c = 1; c <= n; ++c) {
      if (h == c) continue;
      m.at(h, c) = model.score(sf.edge_fv(h, c));
    }
  }
  DecodeResult pred;
  double gold_score = 0.0;
  if (fc.order == 2) {
    SiblingScoreTable t(n);
    for (int h = 0; h <= n; ++h) {
      for (int c = 1; c <= n; ++c) {
        if (h == c) continue;
        t.at(h, c, kNoSibling) = model.score(sf.sib_fv(h, c, kNoSibling));
        const int lo = std::min(h, c);
        const int hi = std::max(h, c);
        for (int s = lo + 1; s < hi; ++s) {
          t.at(h, c, s) = model.score(sf.sib_fv(h, c, s));
        }
      }
    }
    pred = eisner_decode_second_order(m, t);
    gold_score = tree_score_second_order(m, t, gold);
  } else {
    pred = eisner_decode(m);
    gold_score = tree_score(m, gold);
  }

  if (pred.score + 1e-6 < gold_score) {
    throw ContractViolation("decoder returned a tree scoring below gold");
  }

  DecodedExample out;
  if (pred.tree.heads != gold.heads) {
    out.mistake = true;
    out.gold_fv = assemble_tree_fv(sf, gold, fc);
    out.pred_fv = assemble_tree_fv(sf, pred.tree, fc);
  }
  return out;
}

// One example through decode + conditional update; extraction stays outside
// the exclusion region, weight reads and the update inside it.
bool process_example(WeightModel& model, const TreebankEntry& entry, const FeatureConfig& fc,
                     std::mutex* exclusion) {
  SentenceFeatures sf = extract_all(entry.first, fc);
  auto body = [&]() -> bool {
    DecodedExample d = decode_against(model, sf, entry.second, fc);
    if (d.mistake) model.update(d.gold_fv, d.pred_fv);
    return d.mistake;
  };
  if (exclusion) {
    std::lock_guard<std::mutex> lock(*exclusion);
    return body();
  }
  return body();
}

}  // namespace

TrainResult train(const Treebank& corpus, const FeatureConfig& feature_config,
                  const TrainConfig& train_config) {
  train_config.validate();
  if (corpus.empty()) throw ContractViolation("train: empty corpus");

  FeatureConfig fc = feature_config;
  fc.order = train_config.order;
  fc.validate();

  TrainResult result;
  result.model = std::make_unique<WeightModel>(fc);
  result.trace.mode = train_config.mode;
  result.trace.threads = train_config.threads;

  const std::size_t n_examples = corpus.size();
  const int k = train_config.threads;
  std::mutex exclusion;
  std::mutex* exclusion_ptr = (train_config.mode == TrainMode::kLocked) ? &exclusion : nullptr;

  std::vector<std::size_t> order(n_examples);
  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (train_config.shuffle) {
      std::mt19937_64 rng(train_config.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(epoch));
      std::shuffle(order.begin(), order.end(), rng);
    }

    std::atomic<int> mistakes{0};
    const auto t0 = std::chrono::steady_clock::now();

    auto run_range = [&](std::size_t lo, std::size_t hi) {
      int local = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        if (process_example(*result.model, corpus[order[i]], fc, exclusion_ptr)) ++local;
      }
      mistakes.fetch_add(local, std::memory_order_relaxed);
    };

    if (train_config.mode == TrainMode::kSequential) {
      run_range(0, n_examples);
    } else {
      const std::size_t chunk = (n_examples + k - 1) / k;
      std::vector<std::thread> workers;
      std::vector<std::exception_ptr> errors(k);
      for (int w = 0; w < k; ++w) {
        const std::size_t lo = std::min(n_examples, w * chunk);
        const std::size_t hi = std::min(n_examples, lo + chunk);
        workers.emplace_back([&, w, lo, hi] {
          try {
            run_range(lo, hi);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : workers) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    const auto t1 = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mistakes = mistakes.load();
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    rec.cumulative_updates = result.model->updates();
    result.trace.epochs.push_back(rec);
    if (rec.mistakes == 0) break;
  }

  result.trace.total_updates = result.model->updates();
  return result;
}

TrainResult train_full_delay(const Treebank& corpus, const FeatureConfig& feature_config,
                             int k, int max_steps) {
  feature_config.validate();
  if (corpus.empty()) throw ContractViolation("train_full_delay: empty corpus");
  if (k < 1) throw ContractViolation("train_full_delay: k must be >= 1");

  TrainResult result;
  result.model = std::make_unique<WeightModel>(feature_config);
  result.trace.mode = TrainMode::kLockFree;
  result.trace.threads = k;

  // Candidate features never change; extract once.
  std::vector<SentenceFeatures> cache;
  cache.reserve(corpus.size());
  for (const auto& entry : corpus) cache.push_back(extract_all(entry.first, feature_config));

  // Cyclic scan cursor; with k=1 this visits examples exactly like an
  // in-order sequential pass.
  std::size_t cursor = 0;
  const std::size_t n_examples = corpus.size();
  for (int step = 0; step < max_steps; ++step) {
    // Collect up to k mistakes against the frozen current weights, scanning
    // at most one full cycle.
    std::vector<DecodedExample> batch;
    for (std::size_t scanned = 0;
         scanned < n_examples && static_cast<int>(batch.size()) < k; ++scanned) {
      const std::size_t i = (cursor + scanned) % n_examples;
      DecodedExample d = decode_against(*result.model, cache[i], corpus[i].second, feature_config);
      if (d.mistake) {
        batch.push_back(std::move(d));
        if (static_cast<int>(batch.size()) == k) cursor = (i + 1) % n_examples;
      }
    }
    if (batch.empty()) break;  // full cycle found no mistakes: converged
    for (const auto& d : batch) result.model->update(d.gold_fv, d.pred_fv);
    if (static_cast<int>(batch.size()) == k) {
      ++result.trace.full_steps;
    } else {
      ++result.trace.partial_steps;
    }
  }

  result.trace.total_updates = result.model->updates();
  return result;
}

}  // namespace lfp
