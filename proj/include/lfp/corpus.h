#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lfp {

inline constexpr const char* kRootForm = "<root>";
inline constexpr const char* kRootPos = "<root-pos>";

struct Token {
  std::string form;
  std::string pos;
  bool operator==(const Token&) const = default;
};

// Tokenized sentence; index 0 is always the artificial ROOT token.
struct Sentence {
  std::vector<Token> tokens;

  // Number of real tokens (excluding ROOT).
  int length() const { return static_cast<int>(tokens.size()) - 1; }

  // Builds a sentence from real tokens, prepending the ROOT sentinel.
  static Sentence make(std::vector<Token> real_tokens);

  bool operator==(const Sentence&) const = default;
};

// Head assignment per token; heads[0] is the ROOT placeholder (-1),
// heads[j] in 0..n for j in 1..n.
struct DependencyTree {
  std::vector<int> heads;

  int length() const { return static_cast<int>(heads.size()) - 1; }

  // Builds a tree from per-token heads (heads of tokens 1..n).
  static DependencyTree make(std::vector<int> token_heads);

  bool operator==(const DependencyTree&) const = default;
};

// True iff every head index is in range, there are no self-loops, and every
// token is reachable from ROOT (single connected tree, acyclic).
bool is_valid_tree(const DependencyTree& tree);

// Throws StructureError if is_valid_tree fails.
void check_tree(const DependencyTree& tree, const std::string& context = "");

// True iff for every edge (head, child), every token strictly between them is
// a descendant of the head (equivalently: no two edges cross).
bool is_projective(const DependencyTree& tree);

using TreebankEntry = std::pair<Sentence, DependencyTree>;
using Treebank = std::vector<TreebankEntry>;

// Reads CoNLL-X text: one token per line, 10 tab-separated columns
// (ID FORM LEMMA CPOSTAG POSTAG FEATS HEAD DEPREL PHEAD PDEPREL), blank line
// between sentences. Only FORM, POSTAG, HEAD are consumed.
// Throws ParseError for malformed lines, StructureError for invalid trees.
Treebank parse_conll(const std::string& text);

// Inverse of parse_conll for the consumed fields; unused columns become "_".
std::string write_conll(const Treebank& bank);

// Drops non-projective entries; if dropped is non-null it receives the count.
Treebank filter_projective(Treebank bank, int* dropped = nullptr);

}  // namespace lfp
