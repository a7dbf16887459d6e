#include "doctest.h"
#include <algorithm>

#include "cfspanner/enumerate.hpp"
#include "helpers.hpp"

using namespace cfspanner;

namespace {

std::vector<std::vector<int>> brute_jump(const DecoratedGrammar& dg,
                                         const SkippableFlags& flags,
                                         const std::vector<char>& stable) {
  const int n = static_cast<int>(dg.nts.size());
  std::vector<char> removed(n, 1);
  for (int nt = 0; nt < n; ++nt)
    for (int pi : dg.prods_of[nt])
      if (!flags[pi]) removed[nt] = 0;
  std::vector<std::set<int>> reach(n);
  for (int nt = 0; nt < n; ++nt) reach[nt].insert(nt);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t pi = 0; pi < dg.productions.size(); ++pi) {
      if (!flags[pi]) continue;
      const DecProd& p = dg.productions[pi];
      int child = stable[p.left] ? p.right : p.left;
      for (int b : reach[child])
        if (reach[p.lhs].insert(b).second) changed = true;
    }
  }
  std::vector<std::vector<int>> out(n);
  for (int nt = 0; nt < n; ++nt)
    for (int b : reach[nt])
      if (!removed[b]) out[nt].push_back(b);
  return out;
}

}  // namespace

TEST_CASE("mark_skippable follows the definition") {
  Preprocessed pp = preprocess(testutil::load("prefix_suffix.eg"), U"aaaa");
  bool saw_skippable = false;
  for (std::size_t pi = 0; pi < pp.dg.productions.size(); ++pi) {
    const DecProd& p = pp.dg.productions[pi];
    bool expect = !p.is_term && !pp.stable[p.lhs] && p.inner_left == 0 &&
                  p.inner_right == 0 &&
                  (static_cast<bool>(pp.stable[p.left]) !=
                   static_cast<bool>(pp.stable[p.right]));
    CHECK(static_cast<bool>(pp.skippable[pi]) == expect);
    saw_skippable |= expect;
  }
  CHECK(saw_skippable);
}

TEST_CASE("compute_jump equals a brute-force closure") {
  struct Case {
    const char* name;
    Doc d;
  };
  for (const Case& c : {Case{"prefix_suffix.eg", U"aaaaa"},
                        Case{"pair_ab.eg", U"aabb"},
                        Case{"disjeqlen_unamb.eg", U"aba"},
                        Case{"nested.eg", U"aaa"}}) {
    Preprocessed pp = preprocess(testutil::load(c.name), c.d);
    if (pp.dg.empty_language()) continue;
    CHECK_MESSAGE(pp.jump.jump == brute_jump(pp.dg, pp.skippable, pp.stable),
                  c.name);
  }
}

TEST_CASE("jump of a non-terminal with only non-skippable rules is itself") {
  Preprocessed pp = preprocess(testutil::load("pair_ab.eg"), U"aabb");
  bool saw = false;
  for (std::size_t nt = 0; nt < pp.dg.nts.size(); ++nt) {
    if (pp.stable[nt] || pp.dg.prods_of[nt].empty()) continue;
    bool all_nonskip = true;
    for (int pi : pp.dg.prods_of[nt]) all_nonskip &= !pp.skippable[pi];
    if (all_nonskip) {
      saw = true;
      CHECK(pp.jump.jump[nt] == std::vector<int>{static_cast<int>(nt)});
    }
  }
  CHECK(saw);
}

TEST_CASE("apply_prod contract") {
  Preprocessed pp = preprocess(testutil::load("disjeqlen_unamb.eg"), U"aba");
  REQUIRE_FALSE(pp.dg.empty_language());
  for (std::size_t nt = 0; nt < pp.dg.nts.size(); ++nt) {
    if (pp.stable[nt]) {
      CHECK_THROWS_AS(
          apply_prod(pp.dg, pp.skippable, pp.stable, static_cast<int>(nt)),
          std::logic_error);
      continue;
    }
    std::size_t nonskip = 0;
    for (int pi : pp.dg.prods_of[nt]) nonskip += !pp.skippable[pi];
    if (nonskip == 0) continue;
    auto yields =
        apply_prod(pp.dg, pp.skippable, pp.stable, static_cast<int>(nt));
    CHECK(yields.size() == nonskip);
    for (const auto& y : yields) {
      // A non-skippable rule under a non-stable head either contributes
      // inner operations or splits into two non-stable children.
      CHECK((!y.map.empty() || y.beta.size() == 2));
      for (int b : y.beta) CHECK_FALSE(pp.stable[b]);
    }
  }
}

TEST_CASE("three-variable nesting example") {
  Grammar g = parse_grammar(
      "vars: x, y, z\n"
      "start: S\n"
      "unambiguous: true\n"
      "S -> {x {y 'a' 'a' 'a' y} 'a' {z 'a' x} 'a' z}\n");
  Doc d = U"aaaaaa";
  auto out = spanner_enumerate(g, d);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == testutil::sm({{1, 6}, {1, 4}, {5, 7}}));

  Preprocessed pp = preprocess(g, d);
  // The decorated start symbol spans 1..6 with pre {open x, open y} and
  // post {close z}; expanding it must eventually record close y at 4,
  // open z at 5, and close x at 6.
  REQUIRE(pp.dg.start_rules.size() == 1);
  const DecNT& s = pp.dg.nts[pp.dg.productions[pp.dg.start_rules[0]].lhs];
  CHECK(s.i == 1);
  CHECK(s.j == 6);
  CHECK(s.pre == (op_bit(open_op(0)) | op_bit(open_op(1))));
  CHECK(s.post == op_bit(close_op(2)));

  auto ders = enumerate_decorated(pp.dg);
  REQUIRE(ders.size() == 1);
  auto& pairs = ders[0].pairs;
  auto has = [&](OpId op, int pos) {
    return std::find(pairs.begin(), pairs.end(),
                     std::make_pair(op, pos)) != pairs.end();
  };
  CHECK(has(close_op(1), 4));
  CHECK(has(open_op(2), 5));
  CHECK(has(close_op(0), 6));
  CHECK(pairs.size() == 6);
}

TEST_CASE("stream: resumable, deterministic, with stats") {
  Grammar g = testutil::load("prefix_suffix.eg");
  Doc d(6, U'a');
  auto all = spanner_enumerate(g, d);
  CHECK(all.size() == 7 * 8 / 2);

  Preprocessed pp = preprocess(g, d);
  MappingStream s1(pp.dg, pp.jump, pp.skippable, pp.stable);
  std::vector<SpanMapping> collected;
  while (auto m = s1.next()) collected.push_back(*m);
  CHECK(collected == all);
  CHECK(s1.stats().outputs == all.size());
  CHECK(s1.next() == std::nullopt);  // stays exhausted

  // Early stop is allowed; a fresh stream replays identically.
  MappingStream s2(pp.dg, pp.jump, pp.skippable, pp.stable);
  auto first = s2.next();
  REQUIRE(first.has_value());
  CHECK(*first == all[0]);
}

TEST_CASE("delay is independent of document length") {
  Grammar g = testutil::load("prefix_suffix.eg");
  std::uint64_t base = 0;
  for (int n : {4, 8, 16}) {
    DelayStats st;
    auto out = spanner_enumerate(g, Doc(n, U'a'), &st);
    CHECK(out.size() == (n + 1) * (n + 2) / 2);
    if (base == 0) base = st.max_delay;
    CHECK(st.max_delay == base);
  }
}

TEST_CASE("boolean and empty cases") {
  auto one = spanner_enumerate(testutil::load("bool_anbn.eg"), U"aabb");
  REQUIRE(one.size() == 1);
  CHECK(one[0].spans.empty());

  CHECK(spanner_enumerate(testutil::load("bool_anbn.eg"), U"aab").empty());
  CHECK(spanner_enumerate(testutil::load("pair_ab.eg"), U"a").empty());
}

TEST_CASE("empty document routes through empty_doc_mapping") {
  auto dj = spanner_enumerate(testutil::load("disjeqlen_unamb.eg"), U"");
  REQUIRE(dj.size() == 1);
  CHECK(dj[0] == testutil::sm({{1, 1}, {1, 1}}));

  auto b = spanner_enumerate(testutil::load("bool_anbn.eg"), U"");
  CHECK(b.size() == 1);

  CHECK(spanner_enumerate(testutil::load("pair_ab.eg"), U"").empty());
}

TEST_CASE("enumeration matches the oracle on sample inputs") {
  for (const char* name : {"word_ab.eg", "anbn_span.eg", "k3.eg"}) {
    Grammar g = testutil::load(name);
    for (const Doc& d : testutil::docs_ab(1, 3)) {
      auto out = spanner_enumerate(g, d);
      std::set<SpanMapping> got(out.begin(), out.end());
      CHECK(got.size() == out.size());
      CHECK(got == naive_evaluate(g, d));
    }
  }
}
