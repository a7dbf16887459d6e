// Acceptance checks, one per command-line argument "1".."9". Each prints a
// single pass/fail line and exits nonzero on failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cfspanner/enumerate.hpp"

using namespace cfspanner;

namespace {

Grammar load(const std::string& name) {
  std::ifstream in(std::string(GRAMMAR_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grammar(ss.str());
}

// The corpus of unambiguous grammars driving the sweep criteria.
const std::vector<const char*> kUnambCorpus = {
    "pair_ab.eg",    "disjeqlen_unamb.eg", "mark_a.eg",   "span_all.eg",
    "empty_span.eg", "bool_anbn.eg",       "bool_dyck.eg", "prefix_suffix.eg",
    "nested.eg",     "word_ab.eg",         "anbn_span.eg"};
const char* kK3Grammar = "k3.eg";

std::vector<Doc> docs_ab(int max_len) {
  std::vector<Doc> out{Doc{}};
  for (int len = 1; len <= max_len; ++len)
    for (int bits = 0; bits < (1 << len); ++bits) {
      Doc d;
      for (int p = 0; p < len; ++p) d.push_back((bits >> p) & 1 ? U'b' : U'a');
      out.push_back(d);
    }
  return out;
}

std::string doc_str(const Doc& d) {
  return d.empty() ? "<empty>" : utf8_encode(d);
}

SpanMapping mk(std::initializer_list<Span> spans) {
  SpanMapping m;
  m.spans.assign(spans);
  return m;
}

struct Failure {
  std::string msg;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw Failure{msg};
}

// 1. Paired-run grammar on "ababb": the two golden mappings in both modes.
void criterion1() {
  Grammar g = load("pair_ab.eg");
  Doc d = U"ababb";
  std::set<SpanMapping> expect{mk({{1, 2}, {2, 3}}), mk({{3, 4}, {4, 5}})};
  require(naive_evaluate(g, d) == expect, "naive output differs");
  auto out = spanner_enumerate(g, d);
  require(std::set<SpanMapping>(out.begin(), out.end()) == expect,
          "enumeration output differs");
  require(out.size() == 2, "enumeration emitted duplicates");
}

// 2. Disjoint-equal-length grammar on "aaba" against a geometric oracle.
void criterion2() {
  Grammar g = load("disjeqlen.eg");
  Doc d = U"aaba";
  const int n = static_cast<int>(d.size());
  std::set<SpanMapping> expect;
  for (int i1 = 1; i1 <= n + 1; ++i1)
    for (int j1 = i1; j1 <= n + 1; ++j1)
      for (int i2 = 1; i2 <= n + 1; ++i2) {
        int j2 = i2 + (j1 - i1);
        if (j2 > n + 1) continue;
        if (j1 <= i2 || j2 <= i1)  // disjoint
          expect.insert(mk({{i1, j1}, {i2, j2}}));
      }
  auto out = spanner_enumerate(g, d);
  std::set<SpanMapping> got(out.begin(), out.end());
  require(got == expect, "enumeration differs from the geometric oracle");
  require(got.count(mk({{1, 3}, {3, 5}})) == 1, "missing x=[1,3) y=[3,5)");
  require(got.count(mk({{2, 3}, {1, 2}})) == 1, "missing x=[2,3) y=[1,2)");
}

// Shared sweep for criteria 3 and 4.
void sweep(bool check_duplicates) {
  auto run = [&](const char* name, int max_len) {
    Grammar g = load(name);
    for (const Doc& d : docs_ab(max_len)) {
      auto out = spanner_enumerate(g, d);
      std::set<SpanMapping> got(out.begin(), out.end());
      if (check_duplicates)
        require(got.size() == out.size(),
                std::string(name) + " on " + doc_str(d) + ": duplicates");
      else
        require(got == naive_evaluate(g, d),
                std::string(name) + " on " + doc_str(d) + ": set mismatch");
    }
  };
  for (const char* name : kUnambCorpus) run(name, 5);
  run(kK3Grammar, 4);
}

void criterion3() { sweep(false); }
void criterion4() { sweep(true); }

// 5. Max step-delay is identical across document lengths 4..64.
void criterion5() {
  Grammar g = load("prefix_suffix.eg");
  std::uint64_t base = 0;
  for (int n : {4, 8, 16, 32, 64}) {
    DelayStats st;
    auto out = spanner_enumerate(g, Doc(n, U'a'), &st);
    require(out.size() ==
                static_cast<std::size_t>((n + 1) * (n + 2) / 2),
            "unexpected output count at n=" + std::to_string(n));
    if (n == 4) base = st.max_delay;
    require(st.max_delay == base,
            "max delay " + std::to_string(st.max_delay) + " at n=" +
                std::to_string(n) + " differs from " + std::to_string(base));
  }
}

// 6. L(G_d) equals the set of valid ref-words of the functional grammar
// cleaning to d.
void criterion6() {
  std::vector<const char*> corpus(kUnambCorpus);
  corpus.push_back("disjeqlen.eg");
  corpus.push_back(kK3Grammar);
  for (const char* name : corpus) {
    Grammar g = load(name);
    FunctionalGrammar f = functionalize(to_cnf(remove_useless(g)));
    int k = f.grammar.num_vars();
    int max_len = k == 3 ? 3 : 4;
    for (const Doc& d : docs_ab(max_len)) {
      if (d.empty()) continue;
      AdjustedGrammar ag = adjust(f, d);
      std::set<RefWord> expect;
      for (const RefWord& r : valid_refwords(d, k))
        if (cyk_accepts(f.grammar, r)) expect.insert(r);
      auto got = language_of(ag, static_cast<int>(d.size()) + 2 * k);
      require(got == expect,
              std::string(name) + " on " + doc_str(d) + ": language differs");
    }
  }
}

// 7. Every decorated derivation yields a valid pair set; mappings are
// duplicate-free and equal the oracle.
void criterion7() {
  for (const char* name : kUnambCorpus) {
    Grammar g = load(name);
    int k = g.num_vars();
    for (const Doc& d : docs_ab(4)) {
      if (d.empty()) continue;
      Preprocessed pp = preprocess(g, d);
      std::set<SpanMapping> got;
      std::size_t count = 0;
      for (const DecDerivation& der : enumerate_decorated(pp.dg)) {
        std::vector<int> open_pos(k, -1), close_pos(k, -1);
        for (auto [op, pos] : der.pairs) {
          int& slot =
              op_is_close(op) ? close_pos[op_var(op)] : open_pos[op_var(op)];
          require(slot < 0, std::string(name) + " on " + doc_str(d) +
                                ": repeated operation");
          slot = pos;
        }
        SpanMapping m;
        m.spans.assign(k, Span{});
        for (int v = 0; v < k; ++v) {
          require(open_pos[v] >= 1 && close_pos[v] >= open_pos[v],
                  std::string(name) + " on " + doc_str(d) +
                      ": invalid derivation pair set");
          m.spans[v] = {open_pos[v], close_pos[v]};
        }
        require(got.insert(m).second, std::string(name) + " on " +
                                          doc_str(d) + ": duplicate mapping");
        ++count;
      }
      require(got == naive_evaluate(g, d),
              std::string(name) + " on " + doc_str(d) + ": set mismatch");
    }
  }
}

// 8. Transform semantics preservation over the corpus.
void criterion8() {
  std::vector<const char*> corpus(kUnambCorpus);
  corpus.push_back("disjeqlen.eg");
  for (const char* name : corpus) {
    Grammar g = load(name);
    Grammar c = to_cnf(g);
    Grammar f = functionalize(c).grammar;
    Grammar u = union_grammars(g, g);
    std::vector<std::string> half(g.vars.begin(),
                                  g.vars.begin() + g.num_vars() / 2);
    Grammar pr = project(g, half);
    for (const Doc& d : docs_ab(3)) {
      auto expect = naive_evaluate(g, d);
      auto tag = [&](const char* what) {
        return std::string(name) + " on " + doc_str(d) + ": " + what;
      };
      if (!d.empty()) {  // CNF drops the empty ref-word by construction
        require(naive_evaluate(c, d) == expect, tag("to_cnf changed output"));
        require(naive_evaluate(f, d) == expect,
                tag("functionalize changed output"));
      }
      require(naive_evaluate(u, d) == expect, tag("union(g,g) changed output"));
      std::set<SpanMapping> projected;
      for (const auto& m : expect) {
        SpanMapping pm;
        for (int v = 0; v < g.num_vars() / 2; ++v)
          pm.spans.push_back(m.spans[v]);
        projected.insert(pm);
      }
      require(naive_evaluate(pr, d) == projected, tag("project disagrees"));
    }
  }
}

// 9. Work-counter scaling: adjust at most cubic, jump within the quintic
// trend, measured as log-log slopes over |d| = 8..64.
void criterion9() {
  Grammar g = load("prefix_suffix.eg");
  std::vector<int> lens{8, 16, 32, 64};
  std::vector<double> adjust_w, jump_w;
  for (int n : lens) {
    Preprocessed pp = preprocess(g, Doc(n, U'a'));
    require(pp.ag.construction_work > 0 && pp.jump.construction_work > 0,
            "work counters did not advance");
    adjust_w.push_back(static_cast<double>(pp.ag.construction_work));
    jump_w.push_back(static_cast<double>(pp.jump.construction_work));
  }
  auto slope = [&](const std::vector<double>& w) {
    return std::log(w.back() / w.front()) /
           std::log(static_cast<double>(lens.back()) / lens.front());
  };
  double sa = slope(adjust_w), sj = slope(jump_w);
  require(sa <= 3.3, "adjust-stage slope " + std::to_string(sa) + " > 3.3");
  require(sj <= 5.5, "jump-stage slope " + std::to_string(sj) + " > 5.5");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <1..9>\n";
    return 2;
  }
  int which = std::atoi(argv[1]);
  void (*checks[])() = {criterion1, criterion2, criterion3,
                        criterion4, criterion5, criterion6,
                        criterion7, criterion8, criterion9};
  if (which < 1 || which > 9) {
    std::cerr << "usage: acceptance <1..9>\n";
    return 2;
  }
  auto t0 = std::chrono::steady_clock::now();
  try {
    checks[which - 1]();
  } catch (const Failure& f) {
    std::cout << "criterion " << which << ": FAIL (" << f.msg << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << "criterion " << which << ": FAIL (exception: " << e.what()
              << ")\n";
    return 1;
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  std::cout << "criterion " << which << ": PASS (" << secs << " s)\n";
  return 0;
}
