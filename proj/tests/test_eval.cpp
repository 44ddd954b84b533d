#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lfp/errors.h"
#include "lfp/eval.h"
#include "lfp/synth.h"
#include "testutil.h"

using namespace lfp;

TEST_CASE("uas of identical trees is 1") {
  DependencyTree t = DependencyTree::make({0, 1, 2, 1});
  EvalResult r = uas(t, t);
  CHECK(r.correct_heads == 4);
  CHECK(r.total_tokens == 4);
  CHECK(r.uas() == 1.0);
}

TEST_CASE("uas counts per-token head matches") {
  DependencyTree gold = DependencyTree::make({0, 1, 2, 3});
  DependencyTree pred = DependencyTree::make({0, 1, 1, 3});  // token 3 wrong
  EvalResult r = uas(pred, gold);
  CHECK(r.correct_heads == 3);
  CHECK(r.total_tokens == 4);
  CHECK(r.uas() == 0.75);
}

TEST_CASE("uas rejects mismatched lengths") {
  CHECK_THROWS_AS(uas(DependencyTree::make({0}), DependencyTree::make({0, 1})),
                  ContractViolation);
}

TEST_CASE("aggregation over a corpus equals pooled counting") {
  EvalResult total;
  total += uas(DependencyTree::make({0, 1}), DependencyTree::make({0, 1}));
  total += uas(DependencyTree::make({0, 0, 2}), DependencyTree::make({0, 1, 2}));
  CHECK(total.correct_heads == 4);
  CHECK(total.total_tokens == 5);
  CHECK(total.uas() == 0.8);
}

TEST_CASE("empty result reports zero not NaN") {
  EvalResult r;
  CHECK(r.uas() == 0.0);
}

TEST_CASE("speedup arithmetic: 449 over 55.4 is about 8.1") {
  // Reporting convention check: speedup is baseline seconds over measured seconds.
  CHECK(449.0 / 55.4 == doctest::Approx(8.1).epsilon(0.01));
}

TEST_CASE("peak_rss_bytes is positive and monotone") {
  const long before = peak_rss_bytes();
  CHECK(before > 0);
  std::vector<double> ballast(4 << 20, 1.0);  // 32 MB
  CHECK(ballast[123] == 1.0);
  CHECK(peak_rss_bytes() >= before);
}

TEST_CASE("bench grid must start with the sequential baseline") {
  TreebankSpec spec;
  spec.n_sentences = 5;
  Treebank bank = generate_treebank(spec);
  FeatureConfig fc;
  fc.hash_bits = 14;
  CHECK_THROWS_AS(bench(bank, fc, {{TrainMode::kLocked, 2}}, 1), ContractViolation);
  CHECK_THROWS_AS(bench(bank, fc, {}, 1), ContractViolation);
  CHECK_THROWS_AS(bench(bank, fc, {{TrainMode::kSequential, 1}}, 0), ContractViolation);
}

TEST_CASE("small bench grid reports a unit baseline speedup") {
  TreebankSpec spec;
  spec.n_sentences = 40;
  spec.max_length = 6;
  Treebank bank = generate_treebank(spec);
  FeatureConfig fc;
  fc.hash_bits = 14;
  std::vector<BenchResult> results =
      bench(bank, fc, {{TrainMode::kSequential, 1}, {TrainMode::kLockFree, 2}}, 1);
  REQUIRE(results.size() == 2);
  CHECK(results[0].mode == TrainMode::kSequential);
  CHECK(results[0].speedup == 1.0);
  CHECK(results[0].seconds_per_pass > 0.0);
  CHECK(results[1].threads == 2);
  CHECK(results[1].speedup > 0.0);
  CHECK(results[1].peak_memory_bytes > 0);

  const std::string table = bench_table(results);
  CHECK(table.find("sequential") != std::string::npos);
  CHECK(table.find("lockfree") != std::string::npos);
  CHECK(table.find("speedup") != std::string::npos);
}

TEST_CASE("synthetic treebank is projective, sized, and deterministic") {
  TreebankSpec spec;
  spec.n_sentences = 50;
  spec.seed = 4;
  Treebank a = generate_treebank(spec);
  Treebank b = generate_treebank(spec);
  CHECK(a == b);
  CHECK(a.size() == 50);
  for (const auto& [sent, tree] : a) {
    CHECK(sent.length() >= spec.min_length);
    CHECK(sent.length() <= spec.max_length);
    CHECK(is_valid_tree(tree));
    CHECK(is_projective(tree));
  }
  spec.seed = 5;
  CHECK(generate_treebank(spec) != a);
}
