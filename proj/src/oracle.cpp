#include "cfspanner/oracle.hpp"

#include <algorithm>

#include "cfspanner/transforms.hpp"

namespace cfspanner {

namespace {

void require_cnf(const Grammar& g) {
  for (const auto& p : g.productions) {
    bool term = p.rhs.size() == 1 && p.rhs[0].kind != Symbol::Kind::NonTerminal;
    bool bin = p.rhs.size() == 2 &&
               p.rhs[0].kind == Symbol::Kind::NonTerminal &&
               p.rhs[1].kind == Symbol::Kind::NonTerminal;
    if (!term && !bin)
      throw std::invalid_argument("cyk_accepts: grammar is not in CNF");
  }
}

// dp[i][l][A]: number of parse trees (saturated) of r[i..i+l-1] from A.
std::vector<std::vector<std::vector<int>>> cyk_table(const Grammar& g,
                                                     const RefWord& r,
                                                     int saturate) {
  const int len = static_cast<int>(r.size());
  const int nn = static_cast<int>(g.nonterminals.size());
  std::vector<std::vector<std::vector<int>>> dp(
      len, std::vector<std::vector<int>>(len + 1, std::vector<int>(nn, 0)));
  auto sat_add = [&](int& cell, long long v) {
    long long s = cell + v;
    cell = static_cast<int>(std::min<long long>(s, saturate));
  };
  for (const auto& p : g.productions) {
    if (p.rhs.size() != 1) continue;
    const Symbol& s = p.rhs[0];
    for (int i = 0; i < len; ++i) {
      bool match = s.kind == Symbol::Kind::Op
                       ? (r[i].is_op && r[i].op == s.op)
                       : (!r[i].is_op && r[i].term == s.term);
      if (match) sat_add(dp[i][1][p.lhs], 1);
    }
  }
  for (int l = 2; l <= len; ++l)
    for (int i = 0; i + l <= len; ++i)
      for (const auto& p : g.productions) {
        if (p.rhs.size() != 2) continue;
        int b = p.rhs[0].nt, c = p.rhs[1].nt;
        for (int split = 1; split < l; ++split) {
          int lc = dp[i][split][b];
          if (!lc) continue;
          int rc = dp[i + split][l - split][c];
          if (!rc) continue;
          sat_add(dp[i][l][p.lhs], static_cast<long long>(lc) * rc);
        }
      }
  return dp;
}

}  // namespace

bool cyk_accepts(const Grammar& cnf, const RefWord& r) {
  return cyk_accepts(cnf, r, cnf.start);
}

bool cyk_accepts(const Grammar& cnf, const RefWord& r, int start) {
  if (cnf.empty_language()) return false;
  require_cnf(cnf);
  if (r.empty()) return false;
  auto dp = cyk_table(cnf, r, 1);
  return dp[0][r.size()][start] > 0;
}

int cyk_count_trees(const Grammar& cnf, const RefWord& r, int saturate) {
  if (cnf.empty_language() || r.empty()) return 0;
  require_cnf(cnf);
  auto dp = cyk_table(cnf, r, saturate);
  return dp[0][r.size()][cnf.start];
}

std::vector<RefWord> valid_refwords(const Doc& d, int num_vars,
                                    std::uint64_t budget) {
  const int n = static_cast<int>(d.size());
  const int gaps = n + 1;  // gap g sits before d[g-1]; gap n+1 is at the end

  // Budget guard: (|d|+2)^(2k) candidate gap assignments.
  std::uint64_t cost = 1;
  for (int e = 0; e < 2 * num_vars; ++e) {
    cost *= static_cast<std::uint64_t>(n + 2);
    if (cost > budget)
      throw ResourceError("oracle budget exceeded: (|d|+2)^(2k) > " +
                          std::to_string(budget));
  }

  std::vector<RefWord> out;
  // assign[v] = (open gap, close gap), open <= close.
  std::vector<std::pair<int, int>> assign(num_vars, {1, 1});

  std::vector<std::vector<OpId>> gap_ops(gaps + 1);
  RefWord word;
  // Cross product of within-gap orderings, gaps left to right.
  auto emit_orders = [&](auto&& self, int gap) -> void {
    if (gap > gaps) {
      out.push_back(word);
      return;
    }
    std::vector<OpId> ops = gap_ops[gap];
    std::sort(ops.begin(), ops.end());
    auto rest = [&] {
      std::size_t mark = word.size();
      for (OpId op : ops) word.push_back(RefSymbol::operation(op));
      if (gap <= n) word.push_back(RefSymbol::terminal(d[gap - 1]));
      self(self, gap + 1);
      word.resize(mark);
    };
    if (ops.empty()) {
      rest();
      return;
    }
    do {
      // Keep Open(x) before Close(x) when both share a gap.
      bool ok = true;
      std::vector<bool> opened(num_vars, false);
      for (OpId op : ops) {
        if (op_is_close(op)) {
          // Only filter when this variable's open is in the same gap.
          for (OpId o2 : gap_ops[gap])
            if (o2 == open_op(op_var(op)) && !opened[op_var(op)]) ok = false;
        } else {
          opened[op_var(op)] = true;
        }
      }
      if (ok) rest();
    } while (std::next_permutation(ops.begin(), ops.end()));
  };

  auto recurse_assign = [&](auto&& self, int v) -> void {
    if (v == num_vars) {
      for (auto& go : gap_ops) go.clear();
      for (int u = 0; u < num_vars; ++u) {
        gap_ops[assign[u].first].push_back(open_op(u));
        gap_ops[assign[u].second].push_back(close_op(u));
      }
      emit_orders(emit_orders, 1);
      return;
    }
    for (int o = 1; o <= gaps; ++o)
      for (int c = o; c <= gaps; ++c) {
        assign[v] = {o, c};
        self(self, v + 1);
      }
  };
  recurse_assign(recurse_assign, 0);
  return out;
}

std::set<RefWord> derive_refwords(const Grammar& g, int max_steps,
                                  std::size_t max_forms) {
  std::set<RefWord> out;
  if (g.empty_language()) return out;
  std::vector<std::vector<const Production*>> prods_of(g.nonterminals.size());
  for (const auto& p : g.productions) prods_of[p.lhs].push_back(&p);

  using Form = std::vector<Symbol>;
  std::vector<std::pair<Form, int>> queue{{{Symbol::nonterminal(g.start)}, 0}};
  std::set<std::vector<long long>> seen;
  auto key = [](const Form& f) {
    std::vector<long long> k;
    for (const auto& s : f) {
      k.push_back(static_cast<long long>(s.kind));
      k.push_back(s.kind == Symbol::Kind::Terminal
                      ? static_cast<long long>(s.term)
                      : (s.kind == Symbol::Kind::Op ? s.op : s.nt));
    }
    return k;
  };
  std::size_t visited = 0;
  for (std::size_t q = 0; q < queue.size() && visited < max_forms; ++q) {
    auto [form, steps] = queue[q];
    ++visited;
    int nt_pos = -1;
    for (std::size_t i = 0; i < form.size(); ++i)
      if (form[i].kind == Symbol::Kind::NonTerminal) {
        nt_pos = static_cast<int>(i);
        break;
      }
    if (nt_pos < 0) {
      RefWord r;
      for (const auto& s : form)
        r.push_back(s.kind == Symbol::Kind::Terminal
                        ? RefSymbol::terminal(s.term)
                        : RefSymbol::operation(s.op));
      out.insert(std::move(r));
      continue;
    }
    if (steps >= max_steps) continue;
    for (const Production* p : prods_of[form[nt_pos].nt]) {
      Form next(form.begin(), form.begin() + nt_pos);
      next.insert(next.end(), p->rhs.begin(), p->rhs.end());
      next.insert(next.end(), form.begin() + nt_pos + 1, form.end());
      if (seen.insert(key(next)).second) queue.emplace_back(next, steps + 1);
    }
  }
  return out;
}

std::set<SpanMapping> naive_evaluate(const Grammar& g, const Doc& d,
                                     std::uint64_t budget) {
  std::set<SpanMapping> out;
  if (g.empty_language()) return out;
  const int k = g.num_vars();
  Grammar cnf = to_cnf(g);
  for (const RefWord& r : valid_refwords(d, k, budget)) {
    bool accept;
    if (r.empty()) {
      // Only possible for d = epsilon and k = 0; CNF cannot carry the empty
      // word, so consult the original grammar.
      accept = empty_doc_mapping(g).has_value();
    } else {
      accept = cyk_accepts(cnf, r);
    }
    if (accept) out.insert(ref_to_mapping(r, k));
  }
  return out;
}

}  // namespace cfspanner
