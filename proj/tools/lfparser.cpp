#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfp/convlab.h"
#include "lfp/corpus.h"
#include "lfp/decoder.h"
#include "lfp/errors.h"
#include "lfp/eval.h"
#include "lfp/model.h"
#include "lfp/synth.h"
#include "lfp/trainer.h"

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lfp::ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lfp::ParseError("cannot open file for writing: " + path);
  out << content;
}

lfp::Treebank load_training_corpus(const std::string& path) {
  lfp::Treebank bank = lfp::parse_conll(read_input(path));
  int dropped = 0;
  bank = lfp::filter_projective(std::move(bank), &dropped);
  if (dropped > 0) {
    std::cerr << "dropped " << dropped << " non-projective sentence(s)\n";
  }
  if (bank.empty()) throw lfp::ParseError("no projective sentences in " + path);
  return bank;
}

int cmd_train(const std::string& corpus_path, const std::string& model_path,
              const std::string& trace_path, int order, const std::string& mode, int threads,
              int epochs, int hash_bits, std::uint64_t seed, bool no_shuffle) {
  lfp::Treebank bank = load_training_corpus(corpus_path);

  lfp::FeatureConfig fc;
  fc.hash_bits = hash_bits;
  fc.order = order;
  lfp::TrainConfig tc;
  tc.epochs = epochs;
  tc.mode = lfp::mode_from_name(mode);
  tc.threads = (tc.mode == lfp::TrainMode::kSequential) ? 1 : threads;
  tc.seed = seed;
  tc.order = order;
  tc.shuffle = !no_shuffle;

  lfp::TrainResult res = lfp::train(bank, fc, tc);
  lfp::WeightModel::save(model_path, res.model->config(), res.model->averaged());

  const std::string log = res.trace.to_log();
  if (trace_path.empty()) {
    std::cout << log;
  } else {
    write_output(trace_path, log);
  }
  return 0;
}

int cmd_parse(const std::string& model_path, const std::string& input_path,
              const std::string& output_path) {
  lfp::WeightModel::Loaded loaded = lfp::WeightModel::load(model_path);
  lfp::Treebank bank = lfp::parse_conll(read_input(input_path));
  std::span<const double> weights(loaded.weights);
  auto scorer = [&](const lfp::FeatureVector& fv) { return lfp::dot(weights, fv); };
  for (auto& [sent, tree] : bank) {
    tree = lfp::decode_sentence(sent, loaded.config, scorer).tree;
  }
  write_output(output_path, lfp::write_conll(bank));
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& gold_path) {
  lfp::Treebank pred = lfp::parse_conll(read_input(pred_path));
  lfp::Treebank gold = lfp::parse_conll(read_input(gold_path));
  if (pred.size() != gold.size()) {
    throw lfp::ParseError("sentence count mismatch: " + std::to_string(pred.size()) + " vs " +
                          std::to_string(gold.size()));
  }
  lfp::EvalResult total;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    total += lfp::uas(pred[i].second, gold[i].second);
  }
  std::cout << "UAS: " << std::fixed << std::setprecision(2) << total.uas() * 100.0 << " ("
            << total.correct_heads << "/" << total.total_tokens << ")\n";
  return 0;
}

int cmd_bench(const std::string& corpus_path, int synthetic, int order, int hash_bits,
              std::vector<int> ks, int reps, std::uint64_t seed) {
  lfp::Treebank bank;
  if (!corpus_path.empty()) {
    bank = load_training_corpus(corpus_path);
  } else {
    lfp::TreebankSpec spec;
    spec.n_sentences = synthetic;
    spec.seed = seed;
    bank = lfp::generate_treebank(spec);
  }
  lfp::FeatureConfig fc;
  fc.hash_bits = hash_bits;
  fc.order = order;

  std::vector<std::pair<lfp::TrainMode, int>> grid;
  grid.emplace_back(lfp::TrainMode::kSequential, 1);
  for (int k : ks) grid.emplace_back(lfp::TrainMode::kLocked, k);
  for (int k : ks) grid.emplace_back(lfp::TrainMode::kLockFree, k);

  std::vector<lfp::BenchResult> results = lfp::bench(bank, fc, grid, reps);
  std::cout << lfp::bench_table(results);
  for (const auto& r : results) {
    nlohmann::json j;
    j["mode"] = lfp::mode_name(r.mode);
    j["threads"] = r.threads;
    j["seconds_per_pass"] = r.seconds_per_pass;
    j["speedup"] = r.speedup;
    j["peak_memory_bytes"] = r.peak_memory_bytes;
    std::cout << j.dump() << '\n';
  }
  return 0;
}

int cmd_convlab(int k, double delta, int sentences, std::uint64_t seed, int min_len, int max_len,
                int vocab, int hash_bits, int max_steps) {
  lfp::SeparableSpec spec;
  spec.n_sentences = sentences;
  spec.min_length = min_len;
  spec.max_length = max_len;
  spec.vocab_size = vocab;
  spec.target_margin = delta;
  spec.seed = seed;

  lfp::FeatureConfig fc;
  fc.hash_bits = hash_bits;
  fc.order = 1;

  lfp::SeparableCorpus sc = lfp::generate_separable_corpus(spec, fc);
  const double measured_delta = lfp::compute_margin(sc.corpus, sc.direction, fc);
  const double radius = lfp::compute_radius(sc.corpus, fc);

  lfp::TrainResult fd = lfp::train_full_delay(sc.corpus, fc, k, max_steps);
  lfp::ConvergenceReport worst = lfp::verify_bounds(fd.trace, measured_delta, radius, k);
  std::cout << "--- full-delay (worst case) ---\n" << worst.to_text() << worst.to_json() << "\n";

  lfp::TrainConfig tc;
  tc.epochs = 1000;
  tc.threads = k;
  tc.mode = lfp::TrainMode::kLockFree;
  tc.seed = seed;
  tc.order = 1;
  lfp::TrainResult lf = lfp::train(sc.corpus, fc, tc);
  lfp::ConvergenceReport opt = lfp::verify_bounds(lf.trace, measured_delta, radius, k);
  std::cout << "--- lockfree run (optimal-case comparison) ---\n"
            << opt.to_text() << opt.to_json() << "\n";
  return worst.worst_case_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based dependency parser trained by structured perceptron "
               "(sequential, locked, and lock-free parallel modes)"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train a model from a CoNLL-X treebank");
  std::string corpus_path, model_path, trace_path;
  std::string mode = "sequential";
  int order = 1, threads = 1, epochs = 10, hash_bits = 22;
  std::uint64_t seed = 1;
  bool no_shuffle = false;
  train->add_option("corpus", corpus_path, "CoNLL-X training file")->required();
  train->add_option("--model", model_path, "output model file")->required();
  train->add_option("--trace", trace_path, "trace log file (default: stdout)");
  train->add_option("--order", order, "feature order (1 or 2)")->check(CLI::IsMember({1, 2}));
  train->add_option("--mode", mode, "sequential|locked|lockfree")
      ->check(CLI::IsMember({"sequential", "locked", "lockfree"}));
  train->add_option("--threads", threads, "worker threads");
  train->add_option("--epochs", epochs, "training epochs");
  train->add_option("--hash-bits", hash_bits, "feature table = 2^hash_bits");
  train->add_option("--seed", seed, "RNG seed");
  train->add_flag("--no-shuffle", no_shuffle, "keep corpus order each epoch");

  // parse
  auto* parse = app.add_subcommand("parse", "Parse CoNLL-X input with a trained model");
  std::string parse_model, parse_in = "-", parse_out = "-";
  parse->add_option("--model", parse_model, "model file")->required();
  parse->add_option("input", parse_in, "input CoNLL-X file (default stdin)");
  parse->add_option("--output", parse_out, "output file (default stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "Compare two CoNLL-X files, print UAS");
  std::string eval_pred, eval_gold;
  eval->add_option("predicted", eval_pred, "predicted CoNLL-X file")->required();
  eval->add_option("gold", eval_gold, "gold CoNLL-X file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Per-pass timing and speedup grid");
  std::string bench_corpus;
  int bench_synth = 2000, bench_order = 1, bench_bits = 20, bench_reps = 3;
  std::uint64_t bench_seed = 1;
  std::vector<int> bench_ks = {2, 4, 8};
  bench->add_option("corpus", bench_corpus, "CoNLL-X corpus (default: synthetic)");
  bench->add_option("--synthetic", bench_synth, "synthetic corpus size when no corpus given");
  bench->add_option("--order", bench_order, "feature order")->check(CLI::IsMember({1, 2}));
  bench->add_option("--hash-bits", bench_bits, "feature table = 2^hash_bits");
  bench->add_option("--k", bench_ks, "thread counts for the parallel modes");
  bench->add_option("--reps", bench_reps, "timed repetitions per configuration");
  bench->add_option("--seed", bench_seed, "RNG seed");

  // convlab
  auto* convlab = app.add_subcommand("convlab", "Convergence laboratory: generate a separable "
                                                "corpus and verify the bounds");
  int cl_k = 4, cl_sentences = 200, cl_min = 2, cl_max = 3, cl_vocab = 8, cl_bits = 16;
  int cl_max_steps = 1000000;
  double cl_delta = 0.5;
  std::uint64_t cl_seed = 1;
  convlab->add_option("--k", cl_k, "simulated/parallel thread count");
  convlab->add_option("--delta", cl_delta, "target margin");
  convlab->add_option("--sentences", cl_sentences, "corpus size");
  convlab->add_option("--seed", cl_seed, "RNG seed");
  convlab->add_option("--min-len", cl_min, "min sentence length");
  convlab->add_option("--max-len", cl_max, "max sentence length");
  convlab->add_option("--vocab", cl_vocab, "vocabulary size");
  convlab->add_option("--hash-bits", cl_bits, "feature table = 2^hash_bits");
  convlab->add_option("--max-steps", cl_max_steps, "full-delay step cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors are exit 1
  }

  try {
    if (app.got_subcommand(train)) {
      return cmd_train(corpus_path, model_path, trace_path, order, mode, threads, epochs,
                       hash_bits, seed, no_shuffle);
    }
    if (app.got_subcommand(parse)) return cmd_parse(parse_model, parse_in, parse_out);
    if (app.got_subcommand(eval)) return cmd_eval(eval_pred, eval_gold);
    if (app.got_subcommand(bench)) {
      return cmd_bench(bench_corpus, bench_synth, bench_order, bench_bits, bench_ks, bench_reps,
                       bench_seed);
    }
    if (app.got_subcommand(convlab)) {
      return cmd_convlab(cl_k, cl_delta, cl_sentences, cl_seed, cl_min, cl_max, cl_vocab, cl_bits,
                         cl_max_steps);
    }
  } catch (const lfp::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
