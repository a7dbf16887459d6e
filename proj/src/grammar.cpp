#include "cfspanner/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace cfspanner {

std::u32string utf8_decode(const std::string& bytes) {
  std::u32string out;
  std::size_t i = 0;
  auto fail = [&] { throw std::runtime_error("invalid UTF-8 input"); };
  while (i < bytes.size()) {
    unsigned char b0 = bytes[i];
    char32_t cp;
    int extra;
    if (b0 < 0x80) {
      cp = b0;
      extra = 0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      fail();
      return out;
    }
    if (i + extra >= bytes.size()) fail();
    for (int k = 1; k <= extra; ++k) {
      unsigned char b = bytes[i + k];
      if ((b & 0xC0) != 0x80) fail();
      cp = (cp << 6) | (b & 0x3F);
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail();
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string utf8_encode_char(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
  return out;
}

std::string utf8_encode(const std::u32string& text) {
  std::string out;
  for (char32_t c : text) out += utf8_encode_char(c);
  return out;
}

std::size_t Grammar::size() const {
  std::size_t n = 0;
  for (const auto& p : productions) n += p.rhs.size();
  return n;
}

int Grammar::find_nonterminal(const std::string& name) const {
  for (std::size_t i = 0; i < nonterminals.size(); ++i)
    if (nonterminals[i] == name) return static_cast<int>(i);
  return -1;
}

int Grammar::add_nonterminal(const std::string& name) {
  int id = find_nonterminal(name);
  if (id >= 0) return id;
  nonterminals.push_back(name);
  return static_cast<int>(nonterminals.size()) - 1;
}

std::string Grammar::fresh_nonterminal(const std::string& base) {
  for (int counter = 0;; ++counter) {
    std::string name = base + "%" + std::to_string(counter);
    if (find_nonterminal(name) < 0) return name;
  }
}

int Grammar::find_var(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return static_cast<int>(i);
  return -1;
}

std::string Grammar::op_name(OpId op) const {
  const std::string& v = vars.at(op_var(op));
  return op_is_close(op) ? v + "}" : "{" + v;
}

std::string Grammar::symbol_name(const Symbol& s) const {
  switch (s.kind) {
    case Symbol::Kind::Terminal:
      return "'" + utf8_encode_char(s.term) + "'";
    case Symbol::Kind::Op:
      return op_name(s.op);
    case Symbol::Kind::NonTerminal:
      return nonterminals.at(s.nt);
  }
  return {};
}

bool structurally_equal(const Grammar& a, const Grammar& b) {
  if (a.vars != b.vars || a.terminals != b.terminals) return false;
  if (a.declared_unambiguous != b.declared_unambiguous) return false;
  if (a.nonterminals.at(a.start) != b.nonterminals.at(b.start)) return false;
  if (a.productions.size() != b.productions.size()) return false;
  for (std::size_t i = 0; i < a.productions.size(); ++i) {
    const auto& pa = a.productions[i];
    const auto& pb = b.productions[i];
    if (a.nonterminals.at(pa.lhs) != b.nonterminals.at(pb.lhs)) return false;
    if (pa.rhs.size() != pb.rhs.size()) return false;
    for (std::size_t j = 0; j < pa.rhs.size(); ++j)
      if (a.symbol_name(pa.rhs[j]) != b.symbol_name(pb.rhs[j])) return false;
  }
  return true;
}

Grammar make_empty_language_marker(const Grammar& like) {
  Grammar g;
  g.vars = like.vars;
  g.nonterminals = {like.nonterminals.at(like.start)};
  g.start = 0;
  g.declared_unambiguous = like.declared_unambiguous;
  return g;
}

ParseError::ParseError(int line, int col, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ", col " +
                         std::to_string(col) + ": " + msg),
      line(line),
      col(col) {}

namespace {

struct Token {
  enum class Kind { NonTerm, Term, Open, Close, Eps, Arrow, Bar };
  Kind kind;
  std::string text;  // identifier or variable name
  char32_t term = 0;
  int col;
};

bool is_ident_start_lower(char32_t c) { return c >= 'a' && c <= 'z'; }
bool is_ident_start_upper(char32_t c) { return c >= 'A' && c <= 'Z'; }
bool is_ident_char(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

// Tokenizes one rule line. Non-terminal identifiers additionally admit '%'
// after the first character: '%' cannot be typed in hand-written grammars by
// convention but generated grammars use it for fresh names, and serialized
// output must re-parse.
std::vector<Token> lex_rule_line(const std::u32string& line, int lineno) {
  std::vector<Token> toks;
  std::size_t i = 0;
  auto err = [&](std::size_t at, const std::string& msg) {
    throw ParseError(lineno, static_cast<int>(at) + 1, msg);
  };
  while (i < line.size()) {
    char32_t c = line[i];
    int col = static_cast<int>(i) + 1;
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '|') {
      toks.push_back({Token::Kind::Bar, "", 0, col});
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      toks.push_back({Token::Kind::Arrow, "", 0, col});
      i += 2;
      continue;
    }
    if (c == '\'') {
      ++i;
      if (i >= line.size()) err(i, "unterminated terminal literal");
      char32_t t = line[i];
      if (t == '\\') {
        ++i;
        if (i >= line.size()) err(i, "unterminated escape");
        switch (line[i]) {
          case '\\': t = '\\'; break;
          case '\'': t = '\''; break;
          case 'n': t = '\n'; break;
          case 't': t = '\t'; break;
          default: err(i, "unknown escape in terminal literal");
        }
      }
      ++i;
      if (i >= line.size() || line[i] != '\'')
        err(i, "unterminated terminal literal");
      ++i;
      toks.push_back({Token::Kind::Term, "", t, col});
      continue;
    }
    if (c == '{') {
      ++i;
      std::size_t j = i;
      if (j >= line.size() || !is_ident_start_lower(line[j]))
        err(j, "expected variable name after '{'");
      while (j < line.size() && is_ident_char(line[j])) ++j;
      toks.push_back({Token::Kind::Open,
                      utf8_encode(line.substr(i, j - i)), 0, col});
      i = j;
      continue;
    }
    if (is_ident_start_lower(c)) {
      std::size_t j = i;
      while (j < line.size() && is_ident_char(line[j])) ++j;
      std::string name = utf8_encode(line.substr(i, j - i));
      if (j < line.size() && line[j] == '}') {
        toks.push_back({Token::Kind::Close, name, 0, col});
        i = j + 1;
        continue;
      }
      if (name == "eps") {
        toks.push_back({Token::Kind::Eps, "", 0, col});
        i = j;
        continue;
      }
      err(i, "unexpected identifier '" + name +
                 "' (variables appear only as '{" + name + "' or '" + name +
                 "}')");
    }
    if (is_ident_start_upper(c)) {
      std::size_t j = i;
      while (j < line.size() && (is_ident_char(line[j]) || line[j] == '%'))
        ++j;
      toks.push_back({Token::Kind::NonTerm,
                      utf8_encode(line.substr(i, j - i)), 0, col});
      i = j;
      continue;
    }
    err(i, "unexpected character");
  }
  return toks;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Grammar parse_grammar(const std::string& text) {
  Grammar g;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool saw_vars = false, saw_start = false;
  std::string start_name;
  // (lhs name, rhs tokens) accumulated before id resolution
  struct RawProd {
    std::string lhs;
    std::vector<Token> rhs;
    int lineno;
  };
  std::vector<RawProd> raw_prods;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string no_comment = raw.substr(0, raw.find('#'));
    std::string line = strip(no_comment);
    if (line.empty()) continue;

    if (line.rfind("vars:", 0) == 0) {
      if (saw_vars) throw ParseError(lineno, 1, "duplicate vars: line");
      saw_vars = true;
      std::string rest = strip(line.substr(5));
      std::size_t pos = 0;
      while (pos < rest.size()) {
        std::size_t comma = rest.find(',', pos);
        std::string name = strip(rest.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (name.empty())
          throw ParseError(lineno, static_cast<int>(pos) + 1,
                           "empty variable name");
        if (!is_ident_start_lower(name[0]))
          throw ParseError(lineno, 1,
                           "variable name must start with a lowercase letter");
        for (char c : name)
          if (!is_ident_char(static_cast<char32_t>(c)))
            throw ParseError(lineno, 1, "bad variable name '" + name + "'");
        if (g.find_var(name) >= 0)
          throw ParseError(lineno, 1, "duplicate variable '" + name + "'");
        g.vars.push_back(name);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (g.num_vars() > kMaxVars)
        throw ParseError(lineno, 1, "at most 15 variables are supported");
      continue;
    }
    if (line.rfind("start:", 0) == 0) {
      if (saw_start) throw ParseError(lineno, 1, "duplicate start: line");
      saw_start = true;
      start_name = strip(line.substr(6));
      if (start_name.empty() || !is_ident_start_upper(start_name[0]))
        throw ParseError(lineno, 1, "bad start symbol");
      continue;
    }
    if (line.rfind("unambiguous:", 0) == 0) {
      std::string v = strip(line.substr(12));
      if (v == "true" || v == "yes")
        g.declared_unambiguous = true;
      else if (v == "false" || v == "no")
        g.declared_unambiguous = false;
      else
        throw ParseError(lineno, 1, "unambiguous: expects true or false");
      continue;
    }

    auto toks = lex_rule_line(utf8_decode(no_comment), lineno);
    if (toks.empty()) continue;
    if (toks.size() < 2 || toks[0].kind != Token::Kind::NonTerm ||
        toks[1].kind != Token::Kind::Arrow)
      throw ParseError(lineno, toks[0].col, "expected 'A -> ...' rule");
    RawProd cur{toks[0].text, {}, lineno};
    for (std::size_t i = 2; i < toks.size(); ++i) {
      if (toks[i].kind == Token::Kind::Bar) {
        raw_prods.push_back(cur);
        cur.rhs.clear();
        continue;
      }
      if (toks[i].kind == Token::Kind::Arrow)
        throw ParseError(lineno, toks[i].col, "unexpected '->'");
      cur.rhs.push_back(toks[i]);
    }
    raw_prods.push_back(cur);
  }

  if (!saw_vars) throw ParseError(lineno, 1, "missing vars: line");
  if (!saw_start) throw ParseError(lineno, 1, "missing start: line");

  // Declared non-terminals: every lhs, plus the start symbol.
  for (const auto& rp : raw_prods) g.add_nonterminal(rp.lhs);
  g.start = g.add_nonterminal(start_name);

  for (const auto& rp : raw_prods) {
    Production p;
    p.lhs = g.find_nonterminal(rp.lhs);
    bool saw_eps = false;
    for (const auto& t : rp.rhs) {
      switch (t.kind) {
        case Token::Kind::Term:
          g.terminals.insert(t.term);
          p.rhs.push_back(Symbol::terminal(t.term));
          break;
        case Token::Kind::Open:
        case Token::Kind::Close: {
          int v = g.find_var(t.text);
          if (v < 0)
            throw ParseError(rp.lineno, t.col,
                             "undeclared variable " + t.text);
          p.rhs.push_back(Symbol::operation(
              t.kind == Token::Kind::Open ? open_op(v) : close_op(v)));
          break;
        }
        case Token::Kind::NonTerm: {
          int nt = g.find_nonterminal(t.text);
          if (nt < 0)
            throw ParseError(rp.lineno, t.col,
                             "undeclared non-terminal " + t.text);
          p.rhs.push_back(Symbol::nonterminal(nt));
          break;
        }
        case Token::Kind::Eps:
          saw_eps = true;
          break;
        default:
          throw ParseError(rp.lineno, t.col, "unexpected token");
      }
    }
    if (saw_eps && !p.rhs.empty())
      throw ParseError(rp.lineno, 1, "eps must stand alone in an alternative");
    g.productions.push_back(std::move(p));
  }
  return g;
}

std::string serialize_grammar(const Grammar& g) {
  std::ostringstream out;
  out << "vars:";
  for (std::size_t i = 0; i < g.vars.size(); ++i)
    out << (i ? ", " : " ") << g.vars[i];
  out << "\n";
  out << "start: " << g.nonterminals.at(g.start) << "\n";
  if (g.declared_unambiguous) out << "unambiguous: true\n";
  for (const auto& p : g.productions) {
    out << g.nonterminals.at(p.lhs) << " ->";
    if (p.rhs.empty()) {
      out << " eps";
    } else {
      for (const auto& s : p.rhs) out << " " << g.symbol_name(s);
    }
    out << "\n";
  }
  return out.str();
}

Doc clean(const RefWord& r) {
  Doc d;
  for (const auto& s : r)
    if (!s.is_op) d.push_back(s.term);
  return d;
}

bool is_valid(const RefWord& r, int num_vars) {
  std::vector<int> opens(num_vars, 0), closes(num_vars, 0);
  for (const auto& s : r) {
    if (!s.is_op) continue;
    int v = op_var(s.op);
    if (v >= num_vars) return false;
    if (op_is_close(s.op)) {
      if (opens[v] != 1) return false;  // close before open, or double close
      ++closes[v];
      if (closes[v] > 1) return false;
    } else {
      ++opens[v];
      if (opens[v] > 1) return false;
    }
  }
  for (int v = 0; v < num_vars; ++v)
    if (opens[v] != 1 || closes[v] != 1) return false;
  return true;
}

SpanMapping ref_to_mapping(const RefWord& r, int num_vars) {
  if (!is_valid(r, num_vars))
    throw std::invalid_argument("ref_to_mapping: ref-word is not valid");
  SpanMapping m;
  m.spans.assign(num_vars, Span{});
  int pos = 1;  // 1 + number of document symbols seen so far
  for (const auto& s : r) {
    if (s.is_op) {
      if (op_is_close(s.op))
        m.spans[op_var(s.op)].end = pos;
      else
        m.spans[op_var(s.op)].begin = pos;
    } else {
      ++pos;
    }
  }
  return m;
}

std::string refword_to_string(const RefWord& r, const Grammar& g) {
  std::string out;
  for (const auto& s : r) {
    if (!out.empty()) out += " ";
    out += s.is_op ? g.op_name(s.op) : utf8_encode_char(s.term);
  }
  return out;
}

std::string mapping_to_string(const SpanMapping& m, const Grammar& g) {
  std::string out = "{";
  for (std::size_t v = 0; v < m.spans.size(); ++v) {
    if (v) out += ", ";
    out += g.vars[v] + "=[" + std::to_string(m.spans[v].begin) + "," +
           std::to_string(m.spans[v].end) + ")";
  }
  return out + "}";
}

}  // namespace cfspanner
