#include "lfp/corpus.h"

#include <charconv>
#include <sstream>
#include <string_view>

#include "lfp/errors.h"

namespace lfp {

Sentence Sentence::make(std::vector<Token> real_tokens) {
  Sentence s;
  s.tokens.reserve(real_tokens.size() + 1);
  s.tokens.push_back(Token{kRootForm, kRootPos});
  for (auto& t : real_tokens) s.tokens.push_back(std::move(t));
  return s;
}

DependencyTree DependencyTree::make(std::vector<int> token_heads) {
  DependencyTree t;
  t.heads.reserve(token_heads.size() + 1);
  t.heads.push_back(-1);
  for (int h : token_heads) t.heads.push_back(h);
  return t;
}

bool is_valid_tree(const DependencyTree& tree) {
  const int n = tree.length();
  if (n < 1) return false;
  for (int j = 1; j <= n; ++j) {
    int h = tree.heads[j];
    if (h < 0 || h > n || h == j) return false;
  }
  // Walk up from every token; each chain must reach ROOT without revisiting.
  for (int j = 1; j <= n; ++j) {
    int cur = j;
    int steps = 0;
    while (cur != 0) {
      cur = tree.heads[cur];
      if (++steps > n) return false;  // cycle
    }
  }
  return true;
}

void check_tree(const DependencyTree& tree, const std::string& context) {
  if (!is_valid_tree(tree)) {
    throw StructureError(context.empty()
                             ? "invalid dependency tree (cycle or bad heads)"
                             : context + ": invalid dependency tree (cycle or bad heads)");
  }
}

namespace {

bool is_ancestor(const DependencyTree& tree, int anc, int node) {
  int cur = node;
  const int n = tree.length();
  for (int steps = 0; steps <= n; ++steps) {
    if (cur == anc) return true;
    if (cur == 0) return false;
    cur = tree.heads[cur];
  }
  return false;
}

}  // namespace

bool is_projective(const DependencyTree& tree) {
  const int n = tree.length();
  for (int j = 1; j <= n; ++j) {
    const int h = tree.heads[j];
    const int lo = std::min(h, j);
    const int hi = std::max(h, j);
    for (int t = lo + 1; t < hi; ++t) {
      if (!is_ancestor(tree, h, t)) return false;
    }
  }
  return true;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

struct PendingToken {
  std::string form;
  std::string pos;
  int head;
  int line_no;
};

void flush_block(std::vector<PendingToken>& block, Treebank& bank) {
  if (block.empty()) return;
  const int n = static_cast<int>(block.size());
  std::vector<Token> tokens;
  std::vector<int> heads;
  tokens.reserve(n);
  heads.reserve(n);
  for (const auto& pt : block) {
    if (pt.head < 0 || pt.head > n) {
      throw ParseError("line " + std::to_string(pt.line_no) + ": HEAD " +
                       std::to_string(pt.head) + " out of range 0.." + std::to_string(n));
    }
    tokens.push_back(Token{pt.form, pt.pos});
    heads.push_back(pt.head);
  }
  Sentence sent = Sentence::make(std::move(tokens));
  DependencyTree tree = DependencyTree::make(std::move(heads));
  check_tree(tree, "sentence ending at line " + std::to_string(block.back().line_no));
  bank.emplace_back(std::move(sent), std::move(tree));
  block.clear();
}

}  // namespace

Treebank parse_conll(const std::string& text) {
  Treebank bank;
  std::vector<PendingToken> block;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    if (blank) {
      flush_block(block, bank);
      if (pos > text.size()) break;
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 10 tab-separated columns, got " +
                       std::to_string(cols.size()));
    }
    int id = 0;
    if (!parse_int(cols[0], id) || id != static_cast<int>(block.size()) + 1) {
      throw ParseError("line " + std::to_string(line_no) + ": bad token ID '" + std::string(cols[0]) + "'");
    }
    if (cols[1].empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty FORM");
    }
    int head = 0;
    if (!parse_int(cols[6], head)) {
      throw ParseError("line " + std::to_string(line_no) + ": non-integer HEAD '" + std::string(cols[6]) + "'");
    }
    block.push_back(PendingToken{std::string(cols[1]), std::string(cols[4]), head, line_no});
  }
  flush_block(block, bank);
  return bank;
}

std::string write_conll(const Treebank& bank) {
  std::ostringstream out;
  for (const auto& [sent, tree] : bank) {
    const int n = sent.length();
    for (int j = 1; j <= n; ++j) {
      out << j << '\t' << sent.tokens[j].form << "\t_\t_\t" << sent.tokens[j].pos
          << "\t_\t" << tree.heads[j] << "\t_\t_\t_\n";
    }
    out << '\n';
  }
  return out.str();
}

Treebank filter_projective(Treebank bank, int* dropped) {
  Treebank kept;
  kept.reserve(bank.size());
  int n_dropped = 0;
  for (auto& entry : bank) {
    if (is_projective(entry.second)) {
      kept.push_back(std::move(entry));
    } else {
      ++n_dropped;
    }
  }
  if (dropped) *dropped = n_dropped;
  return kept;
}

}  // namespace lfp
