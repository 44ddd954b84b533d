#include "lfp/features.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <string>

#include "lfp/errors.h"

namespace lfp {

std::uint64_t hash64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int FeatureConfig::bucket(int distance) const {
  for (std::size_t i = 0; i < distance_buckets.size(); ++i) {
    if (distance <= distance_buckets[i]) return static_cast<int>(i);
  }
  return static_cast<int>(distance_buckets.size());
}

void FeatureConfig::validate() const {
  if (hash_bits < 8 || hash_bits > 30) {
    throw ContractViolation("hash_bits must be in [8, 30], got " + std::to_string(hash_bits));
  }
  if (order != 1 && order != 2) {
    throw ContractViolation("order must be 1 or 2, got " + std::to_string(order));
  }
  for (std::size_t i = 0; i < distance_buckets.size(); ++i) {
    if (distance_buckets[i] < 1 || (i > 0 && distance_buckets[i] <= distance_buckets[i - 1])) {
      throw ContractViolation("distance_buckets must be strictly increasing and positive");
    }
  }
}

void FeatureVector::add_all(const FeatureVector& other) {
  for (const auto& [idx, c] : other.entries) entries[idx] += c;
}

std::int64_t FeatureVector::total_count() const {
  std::int64_t total = 0;
  for (const auto& [idx, c] : entries) total += c;
  return total;
}

namespace {

constexpr const char* kNullForm = "<null>";
constexpr const char* kNullPos = "<null-pos>";
constexpr const char* kBosPos = "<bos-pos>";
constexpr const char* kEosPos = "<eos-pos>";

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Emits each template twice: with direction+distance bucket and with
// direction only.
class Emitter {
 public:
  Emitter(FeatureVector& out, const FeatureConfig& config, int head, int child)
      : out_(out), mask_(static_cast<std::uint32_t>(config.table_size() - 1)) {
    dir_suffix_ = (head < child) ? "|dR" : "|dL";
    dist_suffix_ = dir_suffix_ + "|q" + std::to_string(config.bucket(std::abs(head - child)));
  }

  std::string& buf() {
    buf_.clear();
    return buf_;
  }

  void emit() {
    const std::size_t base = buf_.size();
    buf_ += dist_suffix_;
    out_.add(static_cast<std::uint32_t>(hash64(buf_)) & mask_);
    buf_.resize(base);
    buf_ += dir_suffix_;
    out_.add(static_cast<std::uint32_t>(hash64(buf_)) & mask_);
  }

 private:
  FeatureVector& out_;
  std::uint32_t mask_;
  std::string dir_suffix_;
  std::string dist_suffix_;
  std::string buf_;
};

}  // namespace

int edge_template_count(int head, int child) {
  int between = std::max(0, std::abs(head - child) - 1);
  return (13 + between + 4) * 2;
}

int sibling_template_count() { return 5 * 2; }

void extract_edge_features_into(FeatureVector& out, const Sentence& sentence, int head,
                                int child, const FeatureConfig& config) {
  const int n = sentence.length();
  if (head < 0 || head > n || child < 1 || child > n || head == child) {
    throw ContractViolation("edge (" + std::to_string(head) + "," + std::to_string(child) +
                            ") out of range for sentence of length " + std::to_string(n));
  }
  const std::string hw = lower(sentence.tokens[head].form);
  const std::string cw = lower(sentence.tokens[child].form);
  const std::string& hp = sentence.tokens[head].pos;
  const std::string& cp = sentence.tokens[child].pos;

  Emitter em(out, config, head, child);
  auto piece = [&](std::string& b, std::string_view tag, std::string_view v) {
    b += tag;
    b += v;
  };

  {  // unigrams and word|pos pairs
    auto& b = em.buf(); piece(b, "t01:", hw); em.emit();
  }
  { auto& b = em.buf(); piece(b, "t02:", hp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t03:", cw); em.emit(); }
  { auto& b = em.buf(); piece(b, "t04:", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t05:", hw); piece(b, "|", hp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t06:", cw); piece(b, "|", cp); em.emit(); }
  // head x child bigrams
  { auto& b = em.buf(); piece(b, "t07:", hw); piece(b, "|", cw); em.emit(); }
  { auto& b = em.buf(); piece(b, "t08:", hw); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t09:", hp); piece(b, "|", cw); em.emit(); }
  { auto& b = em.buf(); piece(b, "t10:", hp); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t11:", hw); piece(b, "|", hp); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t12:", hp); piece(b, "|", cw); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t13:", hw); piece(b, "|", hp); piece(b, "|", cw); piece(b, "|", cp); em.emit(); }

  // in-between pos trigrams
  const int lo = std::min(head, child);
  const int hi = std::max(head, child);
  for (int t = lo + 1; t < hi; ++t) {
    auto& b = em.buf();
    piece(b, "t20:", hp);
    piece(b, "|", sentence.tokens[t].pos);
    piece(b, "|", cp);
    em.emit();
  }

  // surrounding pos 4-grams
  auto pos_at = [&](int i) -> std::string_view {
    if (i < 0) return kBosPos;
    if (i > n) return kEosPos;
    return sentence.tokens[i].pos;
  };
  { auto& b = em.buf(); piece(b, "t21:", hp); piece(b, "|", pos_at(head + 1)); piece(b, "|", pos_at(child - 1)); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t22:", pos_at(head - 1)); piece(b, "|", hp); piece(b, "|", pos_at(child - 1)); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "t23:", hp); piece(b, "|", pos_at(head + 1)); piece(b, "|", cp); piece(b, "|", pos_at(child + 1)); em.emit(); }
  { auto& b = em.buf(); piece(b, "t24:", pos_at(head - 1)); piece(b, "|", hp); piece(b, "|", cp); piece(b, "|", pos_at(child + 1)); em.emit(); }
}

FeatureVector extract_edge_features(const Sentence& sentence, int head, int child,
                                    const FeatureConfig& config) {
  FeatureVector fv;
  extract_edge_features_into(fv, sentence, head, child, config);
  return fv;
}

void extract_sibling_features_into(FeatureVector& out, const Sentence& sentence, int head,
                                   int child, int prev_sibling, const FeatureConfig& config) {
  const int n = sentence.length();
  if (head < 0 || head > n || child < 1 || child > n || head == child) {
    throw ContractViolation("sibling edge out of range");
  }
  if (prev_sibling != kNoSibling) {
    const int lo = std::min(head, child);
    const int hi = std::max(head, child);
    if (prev_sibling <= lo || prev_sibling >= hi) {
      throw ContractViolation("prev_sibling " + std::to_string(prev_sibling) +
                              " not strictly between head " + std::to_string(head) +
                              " and child " + std::to_string(child));
    }
  }
  const std::string& hp = sentence.tokens[head].pos;
  const std::string& cp = sentence.tokens[child].pos;
  const std::string cw = lower(sentence.tokens[child].form);
  const bool has_sib = prev_sibling != kNoSibling;
  const std::string sw = has_sib ? lower(sentence.tokens[prev_sibling].form) : kNullForm;
  const std::string_view sp = has_sib ? std::string_view(sentence.tokens[prev_sibling].pos)
                                      : std::string_view(kNullPos);

  Emitter em(out, config, head, child);
  auto piece = [&](std::string& b, std::string_view tag, std::string_view v) {
    b += tag;
    b += v;
  };
  { auto& b = em.buf(); piece(b, "s01:", hp); piece(b, "|", sp); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "s02:", sp); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "s03:", sw); piece(b, "|", cw); em.emit(); }
  { auto& b = em.buf(); piece(b, "s04:", sw); piece(b, "|", cp); em.emit(); }
  { auto& b = em.buf(); piece(b, "s05:", sp); piece(b, "|", cw); em.emit(); }
}

FeatureVector extract_sibling_features(const Sentence& sentence, int head, int child,
                                       int prev_sibling, const FeatureConfig& config) {
  FeatureVector fv;
  extract_sibling_features_into(fv, sentence, head, child, prev_sibling, config);
  return fv;
}

std::vector<std::array<int, 3>> sibling_decomposition(const DependencyTree& tree) {
  const int n = tree.length();
  std::vector<std::array<int, 3>> out;
  out.reserve(n);
  for (int h = 0; h <= n; ++h) {
    // Right children in left-to-right order (closest to head first).
    int prev = kNoSibling;
    for (int c = h + 1; c <= n; ++c) {
      if (tree.heads[c] == h) {
        out.push_back({h, c, prev});
        prev = c;
      }
    }
    // Left children from closest to furthest.
    prev = kNoSibling;
    for (int c = h - 1; c >= 1; --c) {
      if (tree.heads[c] == h) {
        out.push_back({h, c, prev});
        prev = c;
      }
    }
  }
  return out;
}

FeatureVector tree_feature_vector(const Sentence& sentence, const DependencyTree& tree,
                                  const FeatureConfig& config) {
  const int n = sentence.length();
  if (tree.length() != n) {
    throw ContractViolation("sentence/tree length mismatch");
  }
  FeatureVector fv;
  for (int j = 1; j <= n; ++j) {
    extract_edge_features_into(fv, sentence, tree.heads[j], j, config);
  }
  if (config.order == 2) {
    for (const auto& [h, c, s] : sibling_decomposition(tree)) {
      extract_sibling_features_into(fv, sentence, h, c, s, config);
    }
  }
  return fv;
}

}  // namespace lfp
