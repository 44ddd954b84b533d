#include "lfp/decoder.h"

#include <algorithm>
#include <limits>

namespace lfp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Triangular chart over spans 0 <= s <= t <= n.
struct Chart {
  int n;
  std::vector<double> val;
  std::vector<int> bp;
  Chart(int n_, double init) : n(n_), val((n_ + 1) * (n_ + 1), init), bp((n_ + 1) * (n_ + 1), -1) {}
  double& v(int s, int t) { return val[s * (n + 1) + t]; }
  int& b(int s, int t) { return bp[s * (n + 1) + t]; }
};

struct FirstOrderCharts {
  Chart cr, cl, ir, il;
  explicit FirstOrderCharts(int n)
      : cr(n, kNegInf), cl(n, kNegInf), ir(n, kNegInf), il(n, kNegInf) {}
};

void backtrack_cr(FirstOrderCharts& ch, int s, int t, std::vector<int>& heads);
void backtrack_cl(FirstOrderCharts& ch, int s, int t, std::vector<int>& heads);

void backtrack_ir(FirstOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  heads[t] = s;
  const int r = ch.ir.b(s, t);
  backtrack_cr(ch, s, r, heads);
  backtrack_cl(ch, r + 1, t, heads);
}

void backtrack_il(FirstOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  heads[s] = t;
  const int r = ch.il.b(s, t);
  backtrack_cr(ch, s, r, heads);
  backtrack_cl(ch, r + 1, t, heads);
}

void backtrack_cr(FirstOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  if (s == t) return;
  const int r = ch.cr.b(s, t);
  backtrack_ir(ch, s, r, heads);
  backtrack_cr(ch, r, t, heads);
}

void backtrack_cl(FirstOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  if (s == t) return;
  const int r = ch.cl.b(s, t);
  backtrack_cl(ch, s, r, heads);
  backtrack_il(ch, r, t, heads);
}

}  // namespace

DecodeResult eisner_decode(const EdgeScoreMatrix& matrix) {
  const int n = matrix.n;
  if (n < 1) throw ContractViolation("eisner_decode requires n >= 1");

  FirstOrderCharts ch(n);
  for (int i = 0; i <= n; ++i) {
    ch.cr.v(i, i) = 0.0;
    ch.cl.v(i, i) = 0.0;
  }

  for (int len = 1; len <= n; ++len) {
    for (int s = 0; s + len <= n; ++s) {
      const int t = s + len;
      // Incomplete items: head takes the far endpoint as child.
      double best = kNegInf;
      int best_r = -1;
      for (int r = s; r < t; ++r) {
        const double v = ch.cr.v(s, r) + ch.cl.v(r + 1, t);
        if (v > best) {
          best = v;
          best_r = r;
        }
      }
      ch.ir.v(s, t) = best + matrix.at(s, t);
      ch.ir.b(s, t) = best_r;
      if (s >= 1) {
        ch.il.v(s, t) = best + matrix.at(t, s);
        ch.il.b(s, t) = best_r;
      }
      // Complete items.
      double best_cr = kNegInf;
      int best_cr_r = -1;
      for (int r = s + 1; r <= t; ++r) {
        const double v = ch.ir.v(s, r) + ch.cr.v(r, t);
        if (v > best_cr) {
          best_cr = v;
          best_cr_r = r;
        }
      }
      ch.cr.v(s, t) = best_cr;
      ch.cr.b(s, t) = best_cr_r;

      double best_cl = kNegInf;
      int best_cl_r = -1;
      for (int r = s; r < t; ++r) {
        const double v = ch.cl.v(s, r) + ch.il.v(r, t);
        if (v > best_cl) {
          best_cl = v;
          best_cl_r = r;
        }
      }
      ch.cl.v(s, t) = best_cl;
      ch.cl.b(s, t) = best_cl_r;
    }
  }

  DecodeResult res;
  res.tree.heads.assign(n + 1, -1);
  res.score = ch.cr.v(0, n);
  backtrack_cr(ch, 0, n, res.tree.heads);
  return res;
}

namespace {

struct SecondOrderCharts {
  Chart cr, cl, ir, il, sib;
  // For incomplete items the backpointer encodes the previous sibling:
  // -1 means first child (kNoSibling), otherwise the sibling index u.
  explicit SecondOrderCharts(int n)
      : cr(n, kNegInf), cl(n, kNegInf), ir(n, kNegInf), il(n, kNegInf), sib(n, kNegInf) {}
};

void bt2_cr(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads);
void bt2_cl(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads);
void bt2_ir(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads);
void bt2_il(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads);

void bt2_sib(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  const int r = ch.sib.b(s, t);
  bt2_cr(ch, s, r, heads);
  bt2_cl(ch, r + 1, t, heads);
}

void bt2_ir(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  heads[t] = s;
  const int u = ch.ir.b(s, t);
  if (u < 0) {
    bt2_cl(ch, s + 1, t, heads);
  } else {
    bt2_ir(ch, s, u, heads);
    bt2_sib(ch, u, t, heads);
  }
}

void bt2_il(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  heads[s] = t;
  const int u = ch.il.b(s, t);
  if (u < 0) {
    bt2_cr(ch, s, t - 1, heads);
  } else {
    bt2_sib(ch, s, u, heads);
    bt2_il(ch, u, t, heads);
  }
}

void bt2_cr(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  if (s == t) return;
  const int r = ch.cr.b(s, t);
  bt2_ir(ch, s, r, heads);
  bt2_cr(ch, r, t, heads);
}

void bt2_cl(SecondOrderCharts& ch, int s, int t, std::vector<int>& heads) {
  if (s == t) return;
  const int r = ch.cl.b(s, t);
  bt2_cl(ch, s, r, heads);
  bt2_il(ch, r, t, heads);
}

}  // namespace

DecodeResult eisner_decode_second_order(const EdgeScoreMatrix& matrix,
                                        const SiblingScoreTable& siblings) {
  const int n = matrix.n;
  if (n < 1) throw ContractViolation("eisner_decode_second_order requires n >= 1");
  if (siblings.n != n) throw ContractViolation("sibling table size mismatch");

  SecondOrderCharts ch(n);
  for (int i = 0; i <= n; ++i) {
    ch.cr.v(i, i) = 0.0;
    ch.cl.v(i, i) = 0.0;
  }

  for (int len = 1; len <= n; ++len) {
    for (int s = 0; s + len <= n; ++s) {
      const int t = s + len;

      // Sibling span: two adjacent children s and t of some head outside.
      {
        double best = kNegInf;
        int best_r = -1;
        for (int r = s; r < t; ++r) {
          const double v = ch.cr.v(s, r) + ch.cl.v(r + 1, t);
          if (v > best) {
            best = v;
            best_r = r;
          }
        }
        ch.sib.v(s, t) = best;
        ch.sib.b(s, t) = best_r;
      }

      // I_right: head s, child t.
      {
        double best = ch.cl.v(s + 1, t) + siblings.at(s, t, kNoSibling);
        int best_u = -1;
        for (int u = s + 1; u < t; ++u) {
          const double v = ch.ir.v(s, u) + ch.sib.v(u, t) + siblings.at(s, t, u);
          if (v > best) {
            best = v;
            best_u = u;
          }
        }
        ch.ir.v(s, t) = best + matrix.at(s, t);
        ch.ir.b(s, t) = best_u;
      }

      // I_left: head t, child s (s must be a real token).
      if (s >= 1) {
        double best = ch.cr.v(s, t - 1) + siblings.at(t, s, kNoSibling);
        int best_u = -1;
        for (int u = s + 1; u < t; ++u) {
          const double v = ch.sib.v(s, u) + ch.il.v(u, t) + siblings.at(t, s, u);
          if (v > best) {
            best = v;
            best_u = u;
          }
        }
        ch.il.v(s, t) = best + matrix.at(t, s);
        ch.il.b(s, t) = best_u;
      }

      // Complete items, as in the first-order program.
      {
        double best = kNegInf;
        int best_r = -1;
        for (int r = s + 1; r <= t; ++r) {
          const double v = ch.ir.v(s, r) + ch.cr.v(r, t);
          if (v > best) {
            best = v;
            best_r = r;
          }
        }
        ch.cr.v(s, t) = best;
        ch.cr.b(s, t) = best_r;
      }
      {
        double best = kNegInf;
        int best_r = -1;
        for (int r = s; r < t; ++r) {
          const double v = ch.cl.v(s, r) + ch.il.v(r, t);
          if (v > best) {
            best = v;
            best_r = r;
          }
        }
        ch.cl.v(s, t) = best;
        ch.cl.b(s, t) = best_r;
      }
    }
  }

  DecodeResult res;
  res.tree.heads.assign(n + 1, -1);
  res.score = ch.cr.v(0, n);
  bt2_cr(ch, 0, n, res.tree.heads);
  return res;
}

namespace {

void enumerate_rec(DependencyTree& tree, int j,
                   const std::function<void(const DependencyTree&)>& fn) {
  const int n = tree.length();
  if (j > n) {
    if (is_valid_tree(tree) && is_projective(tree)) fn(tree);
    return;
  }
  for (int h = 0; h <= n; ++h) {
    if (h == j) continue;
    tree.heads[j] = h;
    enumerate_rec(tree, j + 1, fn);
  }
}

}  // namespace

void enumerate_projective_trees(int n,
                                const std::function<void(const DependencyTree&)>& fn) {
  if (n < 1) throw ContractViolation("enumerate_projective_trees requires n >= 1");
  DependencyTree tree;
  tree.heads.assign(n + 1, -1);
  enumerate_rec(tree, 1, fn);
}

DecodeResult brute_force_decode(const std::function<double(const DependencyTree&)>& score_fn,
                                int n) {
  if (n < 1) throw ContractViolation("brute_force_decode requires n >= 1");
  if (n > 8) {
    throw ContractViolation("brute_force_decode refuses n > 8 (got " + std::to_string(n) + ")");
  }
  DecodeResult best;
  best.score = kNegInf;
  bool found = false;
  enumerate_projective_trees(n, [&](const DependencyTree& tree) {
    const double s = score_fn(tree);
    if (!found || s > best.score) {
      best.tree = tree;
      best.score = s;
      found = true;
    }
  });
  return best;
}

double tree_score(const EdgeScoreMatrix& matrix, const DependencyTree& tree) {
  double s = 0.0;
  for (int j = 1; j <= tree.length(); ++j) s += matrix.at(tree.heads[j], j);
  return s;
}

double tree_score_second_order(const EdgeScoreMatrix& matrix, const SiblingScoreTable& siblings,
                               const DependencyTree& tree) {
  double s = tree_score(matrix, tree);
  for (const auto& [h, c, sib] : sibling_decomposition(tree)) {
    s += siblings.at(h, c, sib);
  }
  return s;
}

}  // namespace lfp
