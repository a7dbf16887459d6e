#include "doctest.h"

#include "cfspanner/oracle.hpp"
#include "cfspanner/transforms.hpp"
#include "helpers.hpp"

using namespace cfspanner;
using testutil::rw;

TEST_CASE("cyk_accepts on the paired-run grammar") {
  Grammar c = to_cnf(testutil::load("pair_ab.eg"));
  CHECK(cyk_accepts(c, rw("<0 aa >0 <1 bb >1 b")));
  CHECK_FALSE(cyk_accepts(c, rw("<0 a >0 <1 bb >1")));  // unequal run lengths
  CHECK_FALSE(cyk_accepts(c, RefWord{}));
  CHECK_THROWS(cyk_accepts(testutil::load("pair_ab.eg"), rw("ab")));  // no CNF
}

TEST_CASE("cyk_accepts with start override") {
  Grammar c = to_cnf(parse_grammar("vars:\nstart: S\nS -> A B\nA -> 'a'\nB -> 'b'\n"));
  int a = c.find_nonterminal("A");
  REQUIRE(a >= 0);
  CHECK(cyk_accepts(c, rw("a"), a));
  CHECK_FALSE(cyk_accepts(c, rw("a")));
}

TEST_CASE("valid_refwords: d=a, one variable") {
  auto words = valid_refwords(U"a", 1);
  // Three placements: both ops before the letter, around it, or after it.
  std::set<RefWord> expect{rw("<0 >0 a"), rw("<0 a >0"), rw("a <0 >0")};
  CHECK(std::set<RefWord>(words.begin(), words.end()) == expect);
  CHECK(words.size() == 3);
}

TEST_CASE("valid_refwords: trivial cases") {
  auto e = valid_refwords(U"", 1);
  REQUIRE(e.size() == 1);
  CHECK(e[0] == rw("<0 >0"));

  auto ab = valid_refwords(U"ab", 0);
  REQUIRE(ab.size() == 1);
  CHECK(ab[0] == rw("ab"));
}

TEST_CASE("valid_refwords: no duplicates, all valid, all clean to d") {
  Doc d = U"ab";
  auto words = valid_refwords(d, 2);
  std::set<RefWord> seen;
  for (const RefWord& r : words) {
    CHECK(seen.insert(r).second);
    CHECK(is_valid(r, 2));
    CHECK(clean(r) == d);
  }
  // Same-gap orderings are enumerated, not canonicalized: both interleavings
  // of two opens in one gap must be present.
  CHECK(seen.count(rw("<0 <1 ab >0 >1")));
  CHECK(seen.count(rw("<1 <0 ab >0 >1")));
  // But a close never precedes its own open within a gap.
  CHECK_FALSE(seen.count(rw(">0 <0 ab <1 >1")));
}

TEST_CASE("valid_refwords: budget guard") {
  CHECK_THROWS_AS(valid_refwords(U"aaaaaaaa", 4, 1000), ResourceError);
}

TEST_CASE("naive_evaluate: golden mappings") {
  Grammar g = testutil::load("pair_ab.eg");
  CHECK(naive_evaluate(g, U"ababb") ==
        std::set<SpanMapping>{testutil::sm({{1, 2}, {2, 3}}),
                              testutil::sm({{3, 4}, {4, 5}})});

  Grammar dj = testutil::load("disjeqlen.eg");
  auto out = naive_evaluate(dj, U"aaba");
  CHECK(out.count(testutil::sm({{1, 3}, {3, 5}})));
  CHECK(out.count(testutil::sm({{2, 3}, {1, 2}})));
}

TEST_CASE("naive_evaluate: definitional identity") {
  for (const char* name : {"mark_a.eg", "nested.eg"}) {
    Grammar g = testutil::load(name);
    Grammar c = to_cnf(g);
    int k = g.num_vars();
    for (const Doc& d : testutil::docs_ab(1, 3)) {
      std::set<SpanMapping> direct;
      for (const RefWord& r : valid_refwords(d, k))
        if (cyk_accepts(c, r)) direct.insert(ref_to_mapping(r, k));
      CHECK(naive_evaluate(g, d) == direct);
    }
  }
}

TEST_CASE("naive_evaluate: empty document") {
  Grammar dj = testutil::load("disjeqlen.eg");
  auto out = naive_evaluate(dj, U"");
  CHECK(out == std::set<SpanMapping>{testutil::sm({{1, 1}, {1, 1}})});
  CHECK(naive_evaluate(testutil::load("pair_ab.eg"), U"").empty());
}

TEST_CASE("naive_evaluate: empty-language marker") {
  Grammar g = testutil::load("pair_ab.eg");
  CHECK(naive_evaluate(make_empty_language_marker(g), U"ab").empty());
}

TEST_CASE("cyk_count_trees detects ambiguity") {
  // Two parse trees for "aa": S -> S S is ambiguous on three letters.
  Grammar c = to_cnf(parse_grammar("vars:\nstart: S\nS -> S S | 'a'\n"));
  CHECK(cyk_count_trees(c, rw("a")) == 1);
  CHECK(cyk_count_trees(c, rw("aaa")) == 2);  // saturated at 2
}

TEST_CASE("derive_refwords finds shallow derivations") {
  Grammar g = testutil::load("pair_ab.eg");
  auto words = derive_refwords(g, 6);
  CHECK(words.count(rw("<0 a >0 <1 b >1")));
  for (const RefWord& r : words) CHECK(cyk_accepts(to_cnf(g), r));
}
