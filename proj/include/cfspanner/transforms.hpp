#pragma once

#include "cfspanner/grammar.hpp"

namespace cfspanner {

// Wrapper type used as a witness that a grammar is functional (every ref-word
// in R(G) is valid) and in CNF over the extended alphabet. Produced by
// functionalize; downstream stages trust the witness and do not re-verify.
struct FunctionalGrammar {
  Grammar grammar;
};

// Per-non-terminal variable-operation sets (Prop 5.4): x_A is the set of ops
// occurring in every ref-word derivable from A, indexed by non-terminal id.
using VarOpSetTable = std::vector<OpSet>;

// Removes non-productive and unreachable non-terminals. Returns the
// empty-language marker if the start symbol itself is useless.
Grammar remove_useless(const Grammar& g);

// Chomsky normal form over the extended alphabet: every production becomes
// A -> B C or A -> s with s in Sigma union Gamma_X. Drops the empty ref-word
// from the language (d = epsilon is routed through empty_doc_mapping instead).
// Preserves unambiguity.
Grammar to_cnf(const Grammar& g);

// Builds an equivalent functional grammar with non-terminals (A, M) for
// M a subset of Gamma_X; start is (S, Gamma_X). Input must be in CNF.
// Useless pairs are pruned. Preserves unambiguity.
FunctionalGrammar functionalize(const Grammar& cnf);

// Computes x_A for every non-terminal of a useless-free functional grammar.
// Throws if two productions of the same non-terminal disagree (which would
// mean the input is not functional).
VarOpSetTable compute_varop_sets(const Grammar& g);
inline VarOpSetTable compute_varop_sets(const FunctionalGrammar& g) {
  return compute_varop_sets(g.grammar);
}

// Spanner union: requires g1.vars == g2.vars.
Grammar union_grammars(const Grammar& g1, const Grammar& g2);

// Spanner projection onto the named variables (erases the other ops).
Grammar project(const Grammar& g, const std::vector<std::string>& keep);

// The epsilon-document case: returns the unique all-[1,1) mapping if the
// spanner is nonempty on the empty document, otherwise nothing.
std::optional<SpanMapping> empty_doc_mapping(const Grammar& g);

// Syntactic check for the regular shape A -> s B | s.
bool is_regular_form(const Grammar& g);

}  // namespace cfspanner
