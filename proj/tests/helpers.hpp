#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cfspanner/grammar.hpp"

namespace testutil {

inline cfspanner::Grammar load(const std::string& name) {
  std::ifstream in(std::string(GRAMMAR_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return cfspanner::parse_grammar(ss.str());
}

// Builds a ref-word from a compact spec: lowercase letters are terminals,
// "<n" opens variable n, ">n" closes it (n a single digit), spaces ignored.
inline cfspanner::RefWord rw(const std::string& s) {
  using namespace cfspanner;
  RefWord r;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == ' ') continue;
    if (c == '<' || c == '>') {
      int v = s[++i] - '0';
      r.push_back(RefSymbol::operation(c == '<' ? open_op(v) : close_op(v)));
    } else {
      r.push_back(RefSymbol::terminal(static_cast<char32_t>(c)));
    }
  }
  return r;
}

inline cfspanner::SpanMapping sm(std::initializer_list<cfspanner::Span> spans) {
  cfspanner::SpanMapping m;
  m.spans.assign(spans);
  return m;
}

// All documents over {a,b} with length in [min_len, max_len].
inline std::vector<cfspanner::Doc> docs_ab(int min_len, int max_len) {
  std::vector<cfspanner::Doc> out;
  for (int len = min_len; len <= max_len; ++len)
    for (int bits = 0; bits < (1 << len); ++bits) {
      cfspanner::Doc d;
      for (int p = 0; p < len; ++p) d.push_back((bits >> p) & 1 ? U'b' : U'a');
      out.push_back(d);
    }
  return out;
}

}  // namespace testutil
