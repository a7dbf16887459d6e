#pragma once

#include "cfspanner/adjust.hpp"

namespace cfspanner {

// Decorated non-terminal A^{x,y}_{i,j}: pre/post are the variable operations
// at the very beginning and very end of the sub-word this symbol produces.
// No eps-tagged symbols survive decoration, so i, j are always a real range.
struct DecNT {
  int base = 0;
  int i = 0;
  int j = 0;
  OpSet pre = 0;
  OpSet post = 0;
};

struct DecProd {
  int lhs = 0;
  bool is_term = false;
  int pos = 0;                 // terminal rules: document position i
  int left = -1, right = -1;   // binary rules
  int split = 0;               // left child covers [i..split]
  OpSet inner_left = 0;        // left child's post superscript
  OpSet inner_right = 0;       // right child's pre superscript
};

struct DecoratedTerminal {
  OpSet pre = 0;
  int pos = 0;
  OpSet post = 0;
  auto operator<=>(const DecoratedTerminal&) const = default;
};
using DecWord = std::vector<DecoratedTerminal>;

struct DecoratedGrammar {
  Doc doc;
  std::vector<std::string> vars;
  std::vector<std::string> base_names;
  std::vector<DecNT> nts;
  std::vector<OpSet> nt_varops;  // x_base lifted per decorated non-terminal
  std::vector<DecProd> productions;
  std::vector<std::vector<int>> prods_of;
  // Fresh-start alternatives S -> S^{x,y}_{1,n}, in canonical (x,y) order.
  std::vector<int> start_rules;
  std::uint64_t construction_work = 0;

  int num_vars() const { return static_cast<int>(vars.size()); }
  bool empty_language() const { return start_rules.empty(); }
  std::string nt_name(int id) const;
};

// Builds Dec(G_d) (Steps 1-3 of the decoration construction): superscript
// push-down, then useless/epsilon/unit elimination, then terminal rewrite to
// decorated terminals (x, i, y).
DecoratedGrammar decorate(const AdjustedGrammar& ag, const VarOpSetTable& ops);

// Mapping induced by a decorated word alone; ops in the last terminal's post
// set map to position n+1. Throws if some op is missing or repeated.
SpanMapping decorated_to_mapping(const DecWord& w, int num_vars);

// stable[A] iff the superscripts already account for all of x_A.
std::vector<char> compute_stable(const DecoratedGrammar& dg);

// Test instrument: every derivation of the decorated grammar, with the
// decorated word and the complete (op, position) pair set of the derivation
// (terminal decorations, inner superscripts at binary splits, and the start
// rule's boundary superscripts).
struct DecDerivation {
  int start_nt = -1;
  DecWord word;
  std::vector<std::pair<OpId, int>> pairs;  // sorted, deduplicated
};
std::vector<DecDerivation> enumerate_decorated(const DecoratedGrammar& dg,
                                               std::size_t limit = 1 << 20);

std::string dump_decorated(const DecoratedGrammar& dg);

}  // namespace cfspanner
