#pragma once

#include <set>

#include "cfspanner/transforms.hpp"

namespace cfspanner {

// Non-terminals of G_d: A_{i,j} (1 <= i <= j <= n) derives the ref-words of A
// cleaning to d[i..j], A_eps (encoded i = j = 0) derives op-only ref-words.
struct AdjNT {
  int base = 0;  // non-terminal id in the source functional grammar
  int i = 0;
  int j = 0;
  bool eps_tagged() const { return i == 0; }
  auto operator<=>(const AdjNT&) const = default;
};

struct AdjProd {
  enum class Kind : std::uint8_t { TermChar, TermOp, Binary };
  int lhs = 0;
  Kind kind = Kind::TermChar;
  char32_t term = 0;  // TermChar: the document symbol sigma_i
  OpId op = 0;        // TermOp: A_eps -> tau
  int left = 0, right = 0;  // Binary
};

struct AdjustedGrammar {
  Doc doc;
  std::vector<std::string> vars;
  std::vector<std::string> base_names;   // names of the source non-terminals
  std::vector<AdjNT> nts;                // interned, BFS order from start
  std::vector<AdjProd> productions;
  std::vector<std::vector<int>> prods_of;  // per nt, production indices
  int start = -1;                          // S_{1,n}; -1 = empty language
  // Work counter: candidate rule instantiations examined during
  // construction; drives the cubic-scaling acceptance check.
  std::uint64_t construction_work = 0;

  bool empty_language() const { return start < 0; }
  std::string nt_name(int id) const;
  std::size_t size() const;  // sum of rhs lengths
};

// Builds G_d for a functional CNF grammar (Section 5.1 schemata), pruned to
// useful symbols. |d| must be >= 1; d = epsilon goes through
// empty_doc_mapping instead.
AdjustedGrammar adjust(const FunctionalGrammar& g, const Doc& d);

// Exhaustive finite language of G_d; every word has length <= |d| + 2k, so
// the bound is a safety check only.
std::set<RefWord> language_of(const AdjustedGrammar& ag, int length_bound);

// Words derivable from one specific adjusted non-terminal (Lemma 5.1 tests).
std::set<RefWord> language_from(const AdjustedGrammar& ag, int nt,
                                int length_bound);

std::string dump_adjusted(const AdjustedGrammar& ag);

}  // namespace cfspanner
