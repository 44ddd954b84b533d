#include "lfp/eval.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lfp/errors.h"

namespace lfp {

EvalResult uas(const DependencyTree& pred, const DependencyTree& gold) {
  if (pred.length() != gold.length()) {
    throw ContractViolation("uas: tree length mismatch");
  }
  EvalResult r;
  for (int j = 1; j <= gold.length(); ++j) {
    r.total_tokens += 1;
    if (pred.heads[j] == gold.heads[j]) r.correct_heads += 1;
  }
  return r;
}

long peak_rss_bytes() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream in(line.substr(6));
      long kb = 0;
      in >> kb;
      return kb * 1024;
    }
  }
  return 0;
}

namespace {

double one_pass_seconds(const Treebank& corpus, const FeatureConfig& config, TrainMode mode,
                        int threads) {
  TrainConfig tc;
  tc.epochs = 1;
  tc.threads = threads;
  tc.mode = mode;
  tc.seed = 12345;
  tc.order = config.order;
  tc.shuffle = true;
  TrainResult res = train(corpus, config, tc);
  return res.trace.epochs.at(0).seconds;
}

}  // namespace

std::vector<BenchResult> bench(const Treebank& corpus, const FeatureConfig& config,
                               const std::vector<std::pair<TrainMode, int>>& grid,
                               int repetitions) {
  if (grid.empty() || grid.front().first != TrainMode::kSequential) {
    throw ContractViolation("bench: grid must start with the sequential baseline");
  }
  if (repetitions < 1) throw ContractViolation("bench: repetitions must be >= 1");

  std::vector<BenchResult> results;
  double baseline = 0.0;
  for (const auto& [mode, k] : grid) {
    one_pass_seconds(corpus, config, mode, k);  // warm-up, untimed
    std::vector<double> times;
    times.reserve(repetitions);
    for (int r = 0; r < repetitions; ++r) {
      times.push_back(one_pass_seconds(corpus, config, mode, k));
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    if (results.empty()) baseline = median;

    BenchResult br;
    br.mode = mode;
    br.threads = k;
    br.seconds_per_pass = median;
    br.speedup = baseline / median;
    br.peak_memory_bytes = peak_rss_bytes();
    results.push_back(br);
  }
  return results;
}

std::string bench_table(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "mode" << std::right << std::setw(8) << "threads"
      << std::setw(14) << "sec/pass" << std::setw(10) << "speedup" << std::setw(14) << "peak MB"
      << '\n';
  for (const auto& r : results) {
    out << std::left << std::setw(14) << mode_name(r.mode) << std::right << std::setw(8)
        << r.threads << std::setw(14) << std::fixed << std::setprecision(3) << r.seconds_per_pass
        << std::setw(9) << std::setprecision(1) << r.speedup << "x" << std::setw(14)
        << std::setprecision(1) << (r.peak_memory_bytes / 1048576.0) << '\n';
  }
  return out.str();
}

}  // namespace lfp
