#include "lfp/model.h"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "lfp/errors.h"

namespace lfp {

double dot(std::span<const double> weights, const FeatureVector& fv) {
  double s = 0.0;
  for (const auto& [idx, c] : fv.entries) s += c * weights[idx];
  return s;
}

WeightModel::WeightModel(FeatureConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t size = config_.table_size();
  weights_ = std::vector<std::atomic<double>>(size);
  accum_ = std::vector<std::atomic<double>>(size);
  last_ = std::vector<std::atomic<std::uint64_t>>(size);
  for (std::size_t i = 0; i < size; ++i) {
    weights_[i].store(0.0, std::memory_order_relaxed);
    accum_[i].store(0.0, std::memory_order_relaxed);
    last_[i].store(0, std::memory_order_relaxed);
  }
}

double WeightModel::score(const FeatureVector& fv) const {
  double s = 0.0;
  for (const auto& [idx, c] : fv.entries) {
    s += c * weights_[idx].load(std::memory_order_relaxed);
  }
  return s;
}

void WeightModel::update(const FeatureVector& gold_fv, const FeatureVector& pred_fv) {
  // Net per-coordinate deltas; identical entries cancel exactly.
  std::vector<std::pair<std::uint32_t, std::int32_t>> deltas;
  deltas.reserve(gold_fv.entries.size() + pred_fv.entries.size());
  for (const auto& [idx, c] : gold_fv.entries) deltas.emplace_back(idx, c);
  for (const auto& [idx, c] : pred_fv.entries) deltas.emplace_back(idx, -c);
  std::sort(deltas.begin(), deltas.end());

  const std::uint64_t g = updates_.fetch_add(1, std::memory_order_relaxed) + 1;

  std::size_t i = 0;
  while (i < deltas.size()) {
    const std::uint32_t idx = deltas[i].first;
    std::int64_t delta = 0;
    for (; i < deltas.size() && deltas[i].first == idx; ++i) delta += deltas[i].second;
    if (delta == 0) continue;

    const double oldw = weights_[idx].fetch_add(static_cast<double>(delta),
                                                std::memory_order_relaxed);
    const double neww = oldw + static_cast<double>(delta);
    const std::uint64_t prev = last_[idx].exchange(g, std::memory_order_relaxed);
    // The coordinate held oldw for updates prev+1 .. g-1 and holds neww at g.
    // Under lock-free racing this is approximate; exact when serialized.
    const double span = static_cast<double>(static_cast<std::int64_t>(g - 1) -
                                            static_cast<std::int64_t>(prev));
    accum_[idx].fetch_add(oldw * span + neww, std::memory_order_relaxed);
  }
}

std::vector<double> WeightModel::raw_weights() const {
  std::vector<double> out(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    out[i] = weights_[i].load(std::memory_order_relaxed);
  }
  return out;
}

std::vector<double> WeightModel::averaged() const {
  const std::uint64_t g = updates_.load(std::memory_order_relaxed);
  if (g == 0) return raw_weights();
  std::vector<double> out(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i].load(std::memory_order_relaxed);
    const std::uint64_t last = last_[i].load(std::memory_order_relaxed);
    const double total = accum_[i].load(std::memory_order_relaxed) +
                         w * static_cast<double>(g - std::min(g, last));
    out[i] = total / static_cast<double>(g);
  }
  return out;
}

namespace {
constexpr char kMagic[4] = {'L', 'F', 'P', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ParseError("model file truncated");
  return v;
}
}  // namespace

void WeightModel::save(const std::string& path, const FeatureConfig& config,
                       std::span<const double> weights) {
  if (weights.size() != config.table_size()) {
    throw ContractViolation("weight array size does not match hash_bits");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open model file for writing: " + path);
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint32_t>(config.hash_bits));
  write_pod(out, static_cast<std::uint32_t>(config.order));
  write_pod(out, static_cast<std::uint32_t>(config.distance_buckets.size()));
  for (int b : config.distance_buckets) write_pod(out, static_cast<std::int32_t>(b));
  out.write(reinterpret_cast<const char*>(weights.data()),
            static_cast<std::streamsize>(weights.size() * sizeof(double)));
  if (!out) throw ParseError("failed writing model file: " + path);
}

WeightModel::Loaded WeightModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError("not a model file: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) throw ParseError("unsupported model version");
  Loaded loaded;
  loaded.config.hash_bits = static_cast<int>(read_pod<std::uint32_t>(in));
  loaded.config.order = static_cast<int>(read_pod<std::uint32_t>(in));
  const auto n_buckets = read_pod<std::uint32_t>(in);
  loaded.config.distance_buckets.clear();
  for (std::uint32_t i = 0; i < n_buckets; ++i) {
    loaded.config.distance_buckets.push_back(read_pod<std::int32_t>(in));
  }
  loaded.config.validate();
  loaded.weights.resize(loaded.config.table_size());
  in.read(reinterpret_cast<char*>(loaded.weights.data()),
          static_cast<std::streamsize>(loaded.weights.size() * sizeof(double)));
  if (!in) throw ParseError("model file truncated: " + path);
  return loaded;
}

}  // namespace lfp
