#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lfp/convlab.h"
#include "lfp/decoder.h"
#include "lfp/errors.h"
#include "lfp/trainer.h"
#include "testutil.h"

using namespace lfp;

namespace {

FeatureConfig lab_config() {
  FeatureConfig c;
  c.hash_bits = 16;
  return c;
}

SeparableCorpus lab_corpus(std::uint64_t seed, int sentences = 80) {
  SeparableSpec spec;
  spec.n_sentences = sentences;
  spec.target_margin = 0.3;
  spec.seed = seed;
  return generate_separable_corpus(spec, lab_config());
}

// A corpus whose gold trees are exactly what the zero model's tie-breaking
// decoder produces, so training has nothing to learn.
Treebank pre_converged_corpus(int sentences) {
  std::mt19937_64 rng(99);
  Treebank bank;
  const FeatureConfig fc = lab_config();
  for (int i = 0; i < sentences; ++i) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Sentence s = testutil::random_sentence(rng, n);
    DependencyTree gold = eisner_decode(EdgeScoreMatrix(n)).tree;
    bank.emplace_back(std::move(s), std::move(gold));
  }
  return bank;
}

}  // namespace

TEST_CASE("sequential training converges on a separable corpus within the bound") {
  SeparableCorpus sc = lab_corpus(21);
  const FeatureConfig fc = lab_config();
  const double delta = compute_margin(sc.corpus, sc.direction, fc);
  const double radius = compute_radius(sc.corpus, fc);
  REQUIRE(delta > 0.0);

  TrainConfig tc;
  tc.epochs = 1000;
  tc.mode = TrainMode::kSequential;
  TrainResult res = train(sc.corpus, fc, tc);

  CHECK(res.trace.epochs.back().mistakes == 0);  // converged, early stop fired
  const double bound = (radius * radius) / (delta * delta);
  CHECK(static_cast<double>(res.trace.total_mistakes()) <= bound);
  CHECK(res.trace.total_updates == static_cast<std::uint64_t>(res.trace.total_mistakes()));
}

TEST_CASE("lockfree with one thread equals sequential exactly") {
  SeparableCorpus sc = lab_corpus(22, 40);
  const FeatureConfig fc = lab_config();

  TrainConfig seq;
  seq.epochs = 50;
  seq.mode = TrainMode::kSequential;
  seq.seed = 5;
  TrainConfig lf = seq;
  lf.mode = TrainMode::kLockFree;
  lf.threads = 1;

  TrainResult a = train(sc.corpus, fc, seq);
  TrainResult b = train(sc.corpus, fc, lf);
  CHECK(a.model->raw_weights() == b.model->raw_weights());
  CHECK(a.model->averaged() == b.model->averaged());
  REQUIRE(a.trace.epochs.size() == b.trace.epochs.size());
  for (std::size_t i = 0; i < a.trace.epochs.size(); ++i) {
    CHECK(a.trace.epochs[i].mistakes == b.trace.epochs[i].mistakes);
  }
}

TEST_CASE("locked and lockfree multi-thread runs both converge") {
  SeparableCorpus sc = lab_corpus(23);
  const FeatureConfig fc = lab_config();
  for (TrainMode mode : {TrainMode::kLocked, TrainMode::kLockFree}) {
    TrainConfig tc;
    tc.epochs = 1000;
    tc.mode = mode;
    tc.threads = 4;
    TrainResult res = train(sc.corpus, fc, tc);
    CAPTURE(mode_name(mode));
    CHECK(res.trace.epochs.back().mistakes == 0);
  }
}

TEST_CASE("training is deterministic for a fixed seed") {
  SeparableCorpus sc = lab_corpus(24, 40);
  const FeatureConfig fc = lab_config();
  TrainConfig tc;
  tc.epochs = 5;
  tc.seed = 77;
  TrainResult a = train(sc.corpus, fc, tc);
  TrainResult b = train(sc.corpus, fc, tc);
  CHECK(a.model->raw_weights() == b.model->raw_weights());
  CHECK(a.trace.total_updates == b.trace.total_updates);
}

TEST_CASE("shuffle changes the visit order but a fixed seed pins it") {
  SeparableCorpus sc = lab_corpus(25, 40);
  const FeatureConfig fc = lab_config();
  TrainConfig tc;
  tc.epochs = 1;
  tc.seed = 1;
  TrainResult a = train(sc.corpus, fc, tc);
  tc.seed = 2;
  TrainResult b = train(sc.corpus, fc, tc);
  // Different seeds should (generically) leave different weights after one epoch.
  CHECK(a.model->raw_weights() != b.model->raw_weights());
}

TEST_CASE("empty corpus and bad configs are refused") {
  const FeatureConfig fc = lab_config();
  TrainConfig tc;
  CHECK_THROWS_AS(train({}, fc, tc), ContractViolation);
  tc.threads = 4;  // sequential with threads != 1
  Treebank bank = pre_converged_corpus(2);
  CHECK_THROWS_AS(train(bank, fc, tc), ContractViolation);
  tc.threads = 1;
  tc.epochs = 0;
  CHECK_THROWS_AS(train(bank, fc, tc), ContractViolation);
  CHECK_THROWS_AS(train_full_delay({}, fc, 2), ContractViolation);
  CHECK_THROWS_AS(train_full_delay(bank, fc, 0), ContractViolation);
}

TEST_CASE("full delay takes zero steps on a pre-converged corpus") {
  Treebank bank = pre_converged_corpus(20);
  TrainResult res = train_full_delay(bank, lab_config(), 4);
  CHECK(res.trace.full_steps == 0);
  CHECK(res.trace.partial_steps == 0);
  CHECK(res.trace.total_updates == 0);
}

TEST_CASE("full delay with k=1 replays the in-order sequential run exactly") {
  SeparableCorpus sc = lab_corpus(26, 40);
  const FeatureConfig fc = lab_config();

  TrainResult fd = train_full_delay(sc.corpus, fc, 1);

  TrainConfig tc;
  tc.epochs = 1000;
  tc.mode = TrainMode::kSequential;
  tc.shuffle = false;
  TrainResult seq = train(sc.corpus, fc, tc);

  CHECK(fd.trace.partial_steps == 0);
  CHECK(fd.trace.full_steps == seq.trace.total_mistakes());
  CHECK(fd.trace.total_updates == seq.trace.total_updates);
  CHECK(fd.model->raw_weights() == seq.model->raw_weights());
}

TEST_CASE("full delay converges within the worst-case bound for k in {2,4,8}") {
  SeparableCorpus sc = lab_corpus(27);
  const FeatureConfig fc = lab_config();
  const double delta = compute_margin(sc.corpus, sc.direction, fc);
  const double radius = compute_radius(sc.corpus, fc);
  REQUIRE(delta > 0.0);
  const double bound = (radius * radius) / (delta * delta);

  for (int k : {2, 4, 8}) {
    TrainResult res = train_full_delay(sc.corpus, fc, k);
    CAPTURE(k);
    CHECK(res.trace.full_steps + res.trace.partial_steps > 0);
    CHECK(static_cast<double>(res.trace.full_steps) <= bound);
    // Converged: replaying the corpus against the final weights finds no mistakes.
    TrainResult again = train_full_delay(sc.corpus, fc, k);
    CHECK(again.trace.full_steps == res.trace.full_steps);
    CHECK(again.trace.partial_steps == res.trace.partial_steps);
    CHECK(again.model->raw_weights() == res.model->raw_weights());
  }
}

TEST_CASE("trace log lines carry the run metadata") {
  SeparableCorpus sc = lab_corpus(28, 20);
  TrainConfig tc;
  tc.epochs = 2;
  TrainResult res = train(sc.corpus, lab_config(), tc);
  const std::string log = res.trace.to_log();
  CHECK(log.find("epoch=1 ") != std::string::npos);
  CHECK(log.find("mode=sequential") != std::string::npos);
  CHECK(log.find("k=1") != std::string::npos);
  CHECK(log.find("cumulative_updates=") != std::string::npos);
}

TEST_CASE("mode names round-trip") {
  for (TrainMode m : {TrainMode::kSequential, TrainMode::kLocked, TrainMode::kLockFree}) {
    CHECK(mode_from_name(mode_name(m)) == m);
  }
  CHECK_THROWS_AS(mode_from_name("turbo"), ContractViolation);
}
