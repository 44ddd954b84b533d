#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lfp/convlab.h"
#include "lfp/decoder.h"
#include "lfp/errors.h"
#include "lfp/model.h"
#include "testutil.h"

using namespace lfp;

namespace {

FeatureConfig lab_config() {
  FeatureConfig c;
  c.hash_bits = 16;
  return c;
}

// Test-side margin oracle: direct enumeration, no shared code with
// compute_margin beyond the feature extractor it is specified over.
double margin_oracle(const Treebank& corpus, std::span<const double> u,
                     const FeatureConfig& fc) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [sent, gold] : corpus) {
    FeatureVector gold_fv = tree_feature_vector(sent, gold, fc);
    const double gold_s = dot(u, gold_fv);
    enumerate_projective_trees(sent.length(), [&](const DependencyTree& z) {
      if (z == gold) return;
      best = std::min(best, gold_s - dot(u, tree_feature_vector(sent, z, fc)));
    });
  }
  return best;
}

double radius_oracle(const Treebank& corpus, const FeatureConfig& fc) {
  double best = 0.0;
  for (const auto& [sent, gold] : corpus) {
    FeatureVector gold_fv = tree_feature_vector(sent, gold, fc);
    enumerate_projective_trees(sent.length(), [&](const DependencyTree& z) {
      FeatureVector diff = tree_feature_vector(sent, z, fc);
      for (const auto& [idx, c] : gold_fv.entries) diff.add(idx, -c);
      double sq = 0.0;
      for (const auto& [idx, c] : diff.entries) sq += static_cast<double>(c) * c;
      best = std::max(best, std::sqrt(sq));
    });
  }
  return best;
}

}  // namespace

TEST_CASE("generated corpus is separable at the requested margin") {
  SeparableSpec spec;
  spec.n_sentences = 30;
  spec.target_margin = 0.3;
  spec.seed = 31;
  const FeatureConfig fc = lab_config();
  SeparableCorpus sc = generate_separable_corpus(spec, fc);

  REQUIRE(sc.corpus.size() == 30);
  // Unit direction.
  double norm = 0.0;
  for (double x : sc.direction) norm += x * x;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));

  const double m = compute_margin(sc.corpus, sc.direction, fc);
  CHECK(m >= spec.target_margin);
  CHECK(m == doctest::Approx(margin_oracle(sc.corpus, sc.direction, fc)).epsilon(1e-12));
  for (const auto& [sent, gold] : sc.corpus) {
    CHECK(is_valid_tree(gold));
    CHECK(is_projective(gold));
    CHECK(sent.length() >= spec.min_length);
    CHECK(sent.length() <= spec.max_length);
  }
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
  SeparableSpec spec;
  spec.n_sentences = 15;
  spec.seed = 5;
  const FeatureConfig fc = lab_config();
  SeparableCorpus a = generate_separable_corpus(spec, fc);
  SeparableCorpus b = generate_separable_corpus(spec, fc);
  CHECK(a.corpus == b.corpus);
  CHECK(a.direction == b.direction);
  spec.seed = 6;
  SeparableCorpus c = generate_separable_corpus(spec, fc);
  CHECK(a.corpus != c.corpus);
}

TEST_CASE("an impossible margin raises GenerationError with the best margin achieved") {
  SeparableSpec spec;
  spec.n_sentences = 5;
  spec.target_margin = 1e6;
  spec.max_attempts_per_sentence = 3;
  try {
    generate_separable_corpus(spec, lab_config());
    FAIL("expected GenerationError");
  } catch (const GenerationError& e) {
    CHECK(e.achieved_margin < 1e6);
    CHECK(std::string(e.what()).find("margin") != std::string::npos);
  }
}

TEST_CASE("swapping a gold tree destroys the margin") {
  SeparableSpec spec;
  spec.n_sentences = 10;
  spec.seed = 8;
  const FeatureConfig fc = lab_config();
  SeparableCorpus sc = generate_separable_corpus(spec, fc);

  // Replace one gold tree with a different projective tree.
  auto& [sent, gold] = sc.corpus[0];
  DependencyTree replacement;
  enumerate_projective_trees(sent.length(), [&](const DependencyTree& z) {
    if (replacement.heads.empty() && z != gold) replacement = z;
  });
  REQUIRE_FALSE(replacement.heads.empty());
  gold = replacement;
  CHECK(compute_margin(sc.corpus, sc.direction, fc) <= 0.0);
}

TEST_CASE("margin on a hand-built two-token sentence") {
  const FeatureConfig fc = lab_config();
  Sentence sent = Sentence::make({{"left", "L"}, {"right", "R"}});

  // Direction that rewards exactly the gold tree's features.
  DependencyTree gold = DependencyTree::make({0, 1});
  FeatureVector gold_fv = tree_feature_vector(sent, gold, fc);
  std::vector<double> u(fc.table_size(), 0.0);
  for (const auto& [idx, c] : gold_fv.entries) u[idx] += c;
  double norm = 0.0;
  for (double x : u) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : u) x /= norm;

  Treebank corpus = {{sent, gold}};
  const double got = compute_margin(corpus, u, fc);

  // Oracle over the three projective candidates.
  const double expect = margin_oracle(corpus, u, fc);
  long candidates = 0;
  enumerate_projective_trees(2, [&](const DependencyTree&) { ++candidates; });
  CHECK(candidates == 3);
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  CHECK(got > 0.0);
}

TEST_CASE("margin is +infinity when no incorrect candidate exists") {
  const FeatureConfig fc = lab_config();
  Sentence sent = Sentence::make({{"only", "O"}});
  Treebank corpus = {{sent, DependencyTree::make({0})}};
  std::vector<double> u(fc.table_size(), 0.0);
  CHECK(std::isinf(compute_margin(corpus, u, fc)));
}

TEST_CASE("radius matches the enumeration oracle and is order-invariant") {
  SeparableSpec spec;
  spec.n_sentences = 12;
  spec.seed = 9;
  const FeatureConfig fc = lab_config();
  SeparableCorpus sc = generate_separable_corpus(spec, fc);

  const double r = compute_radius(sc.corpus, fc);
  CHECK(r == doctest::Approx(radius_oracle(sc.corpus, fc)).epsilon(1e-12));
  CHECK(r > 0.0);

  Treebank reversed(sc.corpus.rbegin(), sc.corpus.rend());
  CHECK(compute_radius(reversed, fc) == r);
}

TEST_CASE("radius of a single-candidate corpus is zero") {
  const FeatureConfig fc = lab_config();
  Sentence sent = Sentence::make({{"only", "O"}});
  Treebank corpus = {{sent, DependencyTree::make({0})}};
  CHECK(compute_radius(corpus, fc) == 0.0);
}

TEST_CASE("verify_bounds algebra") {
  TrainTrace trace;
  trace.full_steps = 10;
  trace.partial_steps = 2;
  trace.total_updates = 42;

  SUBCASE("full-delay trace counts full steps; bounds scale by k") {
    for (int k : {1, 2, 4, 8}) {
      ConvergenceReport r = verify_bounds(trace, 0.5, 4.0, k);
      CHECK(r.steps_observed == 10);
      CHECK(r.partial_steps == 2);
      CHECK(r.bound_worst == 64.0);
      CHECK(r.bound_optimal == 64.0 / k);
      CHECK(r.separable);
      CHECK(r.worst_case_ok);
      CHECK(r.optimal_ratio == doctest::Approx(10.0 / (64.0 / k)));
    }
  }
  SUBCASE("parallel trace uses ceil(total_updates / k)") {
    TrainTrace par;
    par.epochs.push_back({});
    par.total_updates = 42;
    ConvergenceReport r = verify_bounds(par, 0.5, 4.0, 4);
    CHECK(r.steps_observed == 11);  // ceil(42/4)
  }
  SUBCASE("bound violation is reported") {
    ConvergenceReport r = verify_bounds(trace, 2.0, 4.0, 1);  // bound = 4 < 10 steps
    CHECK_FALSE(r.worst_case_ok);
  }
  SUBCASE("non-positive margin marks the report non-separable") {
    ConvergenceReport r = verify_bounds(trace, 0.0, 4.0, 2);
    CHECK_FALSE(r.separable);
    CHECK(r.to_text().find("vacuous") != std::string::npos);
  }
}

TEST_CASE("doubling the target margin tightens the step bound in practice") {
  const FeatureConfig fc = lab_config();
  auto run = [&](double target) {
    SeparableSpec spec;
    spec.n_sentences = 60;
    spec.seed = 12;
    spec.target_margin = target;
    SeparableCorpus sc = generate_separable_corpus(spec, fc);
    const double delta = compute_margin(sc.corpus, sc.direction, fc);
    const double radius = compute_radius(sc.corpus, fc);
    TrainResult fd = train_full_delay(sc.corpus, fc, 4);
    return verify_bounds(fd.trace, delta, radius, 4);
  };
  ConvergenceReport narrow = run(0.2);
  ConvergenceReport wide = run(0.4);
  CHECK(narrow.worst_case_ok);
  CHECK(wide.worst_case_ok);
  // Normalized by radius, the wider margin admits the smaller bound.
  CHECK(wide.bound_worst / (wide.radius * wide.radius) <
        narrow.bound_worst / (narrow.radius * narrow.radius));
}

TEST_CASE("report serialization carries the key fields") {
  TrainTrace trace;
  trace.full_steps = 3;
  ConvergenceReport r = verify_bounds(trace, 0.5, 2.0, 2);
  const std::string text = r.to_text();
  CHECK(text.find("delta") != std::string::npos);
  CHECK(text.find("radius") != std::string::npos);
  const std::string json = r.to_json();
  CHECK(json.find("\"bound_worst\"") != std::string::npos);
  CHECK(json.find("\"steps_observed\"") != std::string::npos);
}

TEST_CASE("spec validation") {
  SeparableSpec spec;
  spec.min_length = 0;
  CHECK_THROWS_AS(spec.validate(), ContractViolation);
  spec.min_length = 4;
  spec.max_length = 3;
  CHECK_THROWS_AS(spec.validate(), ContractViolation);
  spec.max_length = 7;  // exceeds the enumeration guard
  CHECK_THROWS_AS(spec.validate(), ContractViolation);
}
