#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfspanner {

// Documents are sequences of Unicode scalar values; all positions in the API
// are 1-based, spans are half-open [i,j) with 1 <= i <= j <= n+1.
using Doc = std::u32string;

std::u32string utf8_decode(const std::string& bytes);
std::string utf8_encode(const std::u32string& text);
std::string utf8_encode_char(char32_t c);

struct Span {
  int begin = 1;  // inclusive
  int end = 1;    // exclusive
  auto operator<=>(const Span&) const = default;
};

// Variable operations are packed two per variable: bit 2m opens variable m,
// bit 2m+1 closes it. This caps the engine at 15 variables, documented in the
// README; the decorated-grammar blow-up makes larger k infeasible anyway.
using OpId = int;
using OpSet = std::uint32_t;

constexpr int kMaxVars = 15;

inline OpId open_op(int var) { return 2 * var; }
inline OpId close_op(int var) { return 2 * var + 1; }
inline bool op_is_close(OpId op) { return (op & 1) != 0; }
inline int op_var(OpId op) { return op >> 1; }
inline OpSet op_bit(OpId op) { return OpSet{1} << op; }

struct Symbol {
  enum class Kind : std::uint8_t { Terminal, Op, NonTerminal };
  Kind kind = Kind::Terminal;
  char32_t term = 0;
  OpId op = 0;
  int nt = 0;

  static Symbol terminal(char32_t c) {
    Symbol s;
    s.kind = Kind::Terminal;
    s.term = c;
    return s;
  }
  static Symbol operation(OpId op) {
    Symbol s;
    s.kind = Kind::Op;
    s.op = op;
    return s;
  }
  static Symbol nonterminal(int id) {
    Symbol s;
    s.kind = Kind::NonTerminal;
    s.nt = id;
    return s;
  }
  bool operator==(const Symbol&) const = default;
};

struct Production {
  int lhs = 0;
  std::vector<Symbol> rhs;  // empty = epsilon production
  bool operator==(const Production&) const = default;
};

struct Grammar {
  std::vector<std::string> vars;           // X; index = variable id
  std::vector<std::string> nonterminals;   // V; index = non-terminal id
  std::set<char32_t> terminals;            // Sigma
  std::vector<Production> productions;     // P, in source order
  int start = 0;
  bool declared_unambiguous = false;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_ops() const { return 2 * num_vars(); }
  OpSet all_ops() const {
    return num_vars() == 0 ? 0 : (OpSet{1} << num_ops()) - 1;
  }
  // |G| = sum of right-hand-side lengths.
  std::size_t size() const;
  // The empty-language marker is a grammar with no productions at all.
  bool empty_language() const { return productions.empty(); }

  int find_nonterminal(const std::string& name) const;  // -1 if absent
  int add_nonterminal(const std::string& name);
  std::string fresh_nonterminal(const std::string& base);
  int find_var(const std::string& name) const;  // -1 if absent

  std::string op_name(OpId op) const;
  std::string symbol_name(const Symbol& s) const;
};

// Structural equality: same variables, terminals, start name, flag, and the
// same ordered production list compared by symbol names (so two grammars that
// differ only in internal id numbering are equal).
bool structurally_equal(const Grammar& a, const Grammar& b);

Grammar make_empty_language_marker(const Grammar& like);

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& msg);
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Grammar parse_grammar(const std::string& text);
std::string serialize_grammar(const Grammar& g);

// Ref-words: strings over Sigma union Gamma_X.
struct RefSymbol {
  bool is_op = false;
  char32_t term = 0;
  OpId op = 0;

  static RefSymbol terminal(char32_t c) {
    RefSymbol s;
    s.term = c;
    return s;
  }
  static RefSymbol operation(OpId op) {
    RefSymbol s;
    s.is_op = true;
    s.op = op;
    return s;
  }
  auto operator<=>(const RefSymbol& o) const {
    if (auto c = is_op <=> o.is_op; c != 0) return c;
    if (is_op) return op <=> o.op;
    return term <=> o.term;
  }
  bool operator==(const RefSymbol& o) const { return (*this <=> o) == 0; }
};

using RefWord = std::vector<RefSymbol>;

Doc clean(const RefWord& r);

// True iff each variable opens exactly once, closes exactly once, and opens
// before it closes.
bool is_valid(const RefWord& r, int num_vars);

struct SpanMapping {
  std::vector<Span> spans;  // indexed by variable id; always total on X
  auto operator<=>(const SpanMapping&) const = default;
};

SpanMapping ref_to_mapping(const RefWord& r, int num_vars);

std::string refword_to_string(const RefWord& r, const Grammar& g);
std::string mapping_to_string(const SpanMapping& m, const Grammar& g);

}  // namespace cfspanner
