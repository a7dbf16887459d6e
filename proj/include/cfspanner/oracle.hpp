#pragma once

#include <cstdint>
#include <set>

#include "cfspanner/grammar.hpp"

namespace cfspanner {

// Default cap on (|d|+2)^(2k) gap-assignment candidates for the naive
// evaluator; overridable per call (CLI: --oracle-budget or
// CFSPANNER_ORACLE_BUDGET).
constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

// CYK membership for a CNF grammar over the extended alphabet. The optional
// start overrides the grammar's start symbol (used by the G_d tests).
bool cyk_accepts(const Grammar& cnf, const RefWord& r);
bool cyk_accepts(const Grammar& cnf, const RefWord& r, int start);

// Number of parse trees of r in a CNF grammar (saturated at 2); used by the
// unambiguity-preservation tests.
int cyk_count_trees(const Grammar& cnf, const RefWord& r, int saturate = 2);

// All valid ref-words r with clean(r) = d, each exactly once, in a fixed
// deterministic order. Throws ResourceError when (|d|+2)^(2k) exceeds budget.
std::vector<RefWord> valid_refwords(const Doc& d, int num_vars,
                                    std::uint64_t budget = kDefaultOracleBudget);

// Reference evaluator (naive polynomial algorithm): CYK over all valid
// ref-words cleaning to d. Ground truth for the enumeration pipeline.
std::set<SpanMapping> naive_evaluate(const Grammar& g, const Doc& d,
                                     std::uint64_t budget = kDefaultOracleBudget);

// Bounded derivation search, independent of CYK: all ref-words derivable from
// the start symbol within max_steps production applications, visiting at most
// max_forms sentential forms. Used by functionality checks and as a second
// opinion on cyk_accepts for tiny grammars.
std::set<RefWord> derive_refwords(const Grammar& g, int max_steps,
                                  std::size_t max_forms = 200000);

}  // namespace cfspanner
