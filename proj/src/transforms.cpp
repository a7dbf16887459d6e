#include "cfspanner/transforms.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace cfspanner {

namespace {

// Key used to deduplicate productions during CNF conversion.
std::vector<long long> prod_key(const Production& p) {
  std::vector<long long> k{p.lhs};
  for (const auto& s : p.rhs) {
    switch (s.kind) {
      case Symbol::Kind::Terminal:
        k.push_back(1);
        k.push_back(static_cast<long long>(s.term));
        break;
      case Symbol::Kind::Op:
        k.push_back(2);
        k.push_back(s.op);
        break;
      case Symbol::Kind::NonTerminal:
        k.push_back(3);
        k.push_back(s.nt);
        break;
    }
  }
  return k;
}

std::vector<bool> productive_set(const Grammar& g) {
  std::vector<bool> productive(g.nonterminals.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (productive[p.lhs]) continue;
      bool ok = true;
      for (const auto& s : p.rhs)
        if (s.kind == Symbol::Kind::NonTerminal && !productive[s.nt]) {
          ok = false;
          break;
        }
      if (ok) {
        productive[p.lhs] = true;
        changed = true;
      }
    }
  }
  return productive;
}

}  // namespace

Grammar remove_useless(const Grammar& g) {
  if (g.empty_language()) return make_empty_language_marker(g);
  auto productive = productive_set(g);
  if (!productive[g.start]) return make_empty_language_marker(g);

  // Reachability over productions whose rhs is entirely productive.
  std::vector<bool> reachable(g.nonterminals.size(), false);
  reachable[g.start] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (!reachable[p.lhs] || !productive[p.lhs]) continue;
      bool all_prod = true;
      for (const auto& s : p.rhs)
        if (s.kind == Symbol::Kind::NonTerminal && !productive[s.nt])
          all_prod = false;
      if (!all_prod) continue;
      for (const auto& s : p.rhs)
        if (s.kind == Symbol::Kind::NonTerminal && !reachable[s.nt]) {
          reachable[s.nt] = true;
          changed = true;
        }
    }
  }

  std::vector<int> remap(g.nonterminals.size(), -1);
  Grammar out;
  out.vars = g.vars;
  out.terminals = g.terminals;
  out.declared_unambiguous = g.declared_unambiguous;
  for (std::size_t i = 0; i < g.nonterminals.size(); ++i)
    if (productive[i] && reachable[i]) {
      remap[i] = static_cast<int>(out.nonterminals.size());
      out.nonterminals.push_back(g.nonterminals[i]);
    }
  out.start = remap[g.start];
  for (const auto& p : g.productions) {
    if (remap[p.lhs] < 0) continue;
    bool keep = true;
    for (const auto& s : p.rhs)
      if (s.kind == Symbol::Kind::NonTerminal && remap[s.nt] < 0) keep = false;
    if (!keep) continue;
    Production q;
    q.lhs = remap[p.lhs];
    for (auto s : p.rhs) {
      if (s.kind == Symbol::Kind::NonTerminal) s.nt = remap[s.nt];
      q.rhs.push_back(s);
    }
    out.productions.push_back(std::move(q));
  }
  return out;
}

Grammar to_cnf(const Grammar& gin) {
  Grammar g = remove_useless(gin);
  if (g.empty_language()) return g;

  // Nullable non-terminals (over the extended alphabet: ops count as symbols,
  // so only chains of epsilon-productions are nullable).
  std::vector<bool> nullable(g.nonterminals.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (nullable[p.lhs]) continue;
      bool all_null = true;
      for (const auto& s : p.rhs) {
        if (s.kind != Symbol::Kind::NonTerminal || !nullable[s.nt]) {
          all_null = false;
          break;
        }
      }
      if (all_null) {
        nullable[p.lhs] = true;
        changed = true;
      }
    }
  }

  // Epsilon elimination: every way of dropping nullable occurrences, minus
  // the empty result.
  std::vector<Production> stage;
  std::set<std::vector<long long>> seen;
  for (const auto& p : g.productions) {
    std::vector<int> null_pos;
    for (std::size_t i = 0; i < p.rhs.size(); ++i)
      if (p.rhs[i].kind == Symbol::Kind::NonTerminal && nullable[p.rhs[i].nt])
        null_pos.push_back(static_cast<int>(i));
    const std::size_t combos = std::size_t{1} << null_pos.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      Production q;
      q.lhs = p.lhs;
      std::size_t np = 0;
      for (std::size_t i = 0; i < p.rhs.size(); ++i) {
        bool drop = false;
        if (np < null_pos.size() && null_pos[np] == static_cast<int>(i)) {
          drop = (mask >> np) & 1;
          ++np;
        }
        if (!drop) q.rhs.push_back(p.rhs[i]);
      }
      if (q.rhs.empty()) continue;
      if (seen.insert(prod_key(q)).second) stage.push_back(std::move(q));
    }
  }

  // Unit-production elimination via unit-reachability closure. Original
  // production order is preserved: non-unit rules stay in place, unit rules
  // are replaced in place by the closure targets' non-unit rules.
  auto is_unit = [](const Production& p) {
    return p.rhs.size() == 1 && p.rhs[0].kind == Symbol::Kind::NonTerminal;
  };
  std::vector<std::vector<int>> unit_next(g.nonterminals.size());
  std::vector<std::vector<const Production*>> non_unit_of(
      g.nonterminals.size());
  for (const auto& p : stage) {
    if (is_unit(p))
      unit_next[p.lhs].push_back(p.rhs[0].nt);
    else
      non_unit_of[p.lhs].push_back(&p);
  }
  auto closure_of = [&](int a) {
    std::vector<int> order{a};
    std::set<int> in{a};
    for (std::size_t q = 0; q < order.size(); ++q)
      for (int b : unit_next[order[q]])
        if (in.insert(b).second) order.push_back(b);
    return order;
  };

  std::vector<Production> flat;
  seen.clear();
  for (const auto& p : stage) {
    if (!is_unit(p)) {
      if (seen.insert(prod_key(p)).second) flat.push_back(p);
      continue;
    }
    for (int c : closure_of(p.rhs[0].nt))
      for (const Production* q : non_unit_of[c]) {
        Production r{p.lhs, q->rhs};
        if (seen.insert(prod_key(r)).second) flat.push_back(std::move(r));
      }
  }
  g.productions = std::move(flat);
  g = remove_useless(g);
  if (g.empty_language()) return g;

  // Terminal lifting and binarization.
  std::map<std::pair<int, long long>, int> lifted;  // (kind,value) -> NT id
  std::vector<Production> helpers;
  auto lift = [&](const Symbol& s) {
    std::pair<int, long long> key =
        s.kind == Symbol::Kind::Terminal
            ? std::make_pair(1, static_cast<long long>(s.term))
            : std::make_pair(2, static_cast<long long>(s.op));
    auto it = lifted.find(key);
    if (it != lifted.end()) return it->second;
    int id = g.add_nonterminal(g.fresh_nonterminal("T"));
    lifted[key] = id;
    helpers.push_back({id, {s}});
    return id;
  };

  std::vector<Production> result;
  for (const auto& p : g.productions) {
    if (p.rhs.size() == 1) {
      result.push_back(p);  // A -> sigma (unit rules are gone)
      continue;
    }
    std::vector<Symbol> syms;
    for (const auto& s : p.rhs)
      syms.push_back(s.kind == Symbol::Kind::NonTerminal
                         ? s
                         : Symbol::nonterminal(lift(s)));
    int lhs = p.lhs;
    while (syms.size() > 2) {
      int mid = g.add_nonterminal(g.fresh_nonterminal(g.nonterminals[p.lhs]));
      result.push_back({lhs, {syms[0], Symbol::nonterminal(mid)}});
      syms.erase(syms.begin());
      lhs = mid;
    }
    result.push_back({lhs, {syms[0], syms[1]}});
  }
  for (auto& h : helpers) result.push_back(std::move(h));
  g.productions = std::move(result);
  return g;
}

namespace {

bool cnf_shape(const Grammar& g) {
  for (const auto& p : g.productions) {
    if (p.rhs.size() == 1 && p.rhs[0].kind != Symbol::Kind::NonTerminal)
      continue;
    if (p.rhs.size() == 2 && p.rhs[0].kind == Symbol::Kind::NonTerminal &&
        p.rhs[1].kind == Symbol::Kind::NonTerminal)
      continue;
    return false;
  }
  return true;
}

constexpr OpSet kOddBits = 0x2AAAAAAA;  // close-op bits

// Side condition of the functionalization rule (A,M1) -> (B,M2)(C,M3):
// no variable may close in the left part and open in the right part.
bool split_ok(OpSet m2, OpSet m3) {
  if (m2 & m3) return false;
  return (((m2 & kOddBits) >> 1) & m3) == 0;
}

}  // namespace

FunctionalGrammar functionalize(const Grammar& cnf) {
  if (cnf.empty_language())
    return FunctionalGrammar{make_empty_language_marker(cnf)};
  if (!cnf_shape(cnf))
    throw std::invalid_argument("functionalize: input grammar is not in CNF");

  const int n = static_cast<int>(cnf.nonterminals.size());
  const OpSet full = cnf.all_ops();

  // Productive pairs (A, M): M is the op-set of some derivation from A.
  std::vector<std::set<OpSet>> masks(n);
  std::vector<std::pair<int, OpSet>> work;
  auto add = [&](int a, OpSet m) {
    if (masks[a].insert(m).second) work.emplace_back(a, m);
  };
  // Index binary rules by each child.
  std::vector<std::vector<const Production*>> by_left(n), by_right(n);
  for (const auto& p : cnf.productions) {
    if (p.rhs.size() == 1) {
      const Symbol& s = p.rhs[0];
      add(p.lhs, s.kind == Symbol::Kind::Op ? op_bit(s.op) : 0);
    } else {
      by_left[p.rhs[0].nt].push_back(&p);
      by_right[p.rhs[1].nt].push_back(&p);
    }
  }
  while (!work.empty()) {
    auto [a, m] = work.back();
    work.pop_back();
    for (const Production* p : by_left[a])
      for (OpSet m3 : masks[p->rhs[1].nt])
        if (split_ok(m, m3) && (m | m3) <= full) add(p->lhs, m | m3);
    for (const Production* p : by_right[a])
      for (OpSet m2 : masks[p->rhs[0].nt])
        if (split_ok(m2, m) && (m2 | m) <= full) add(p->lhs, m2 | m);
  }

  if (!masks[cnf.start].count(full))
    return FunctionalGrammar{make_empty_language_marker(cnf)};

  // Reachability from (S, Gamma_X); intern pairs in BFS order.
  Grammar out;
  out.vars = cnf.vars;
  out.terminals = cnf.terminals;
  out.declared_unambiguous = cnf.declared_unambiguous;
  std::map<std::pair<int, OpSet>, int> interned;
  std::vector<std::pair<int, OpSet>> items;
  auto intern = [&](int a, OpSet m) {
    auto key = std::make_pair(a, m);
    auto it = interned.find(key);
    if (it != interned.end()) return it->second;
    int id = out.add_nonterminal(cnf.nonterminals[a] + "%" +
                                 std::to_string(m));
    interned[key] = id;
    items.emplace_back(a, m);
    return id;
  };
  std::vector<std::vector<const Production*>> prods_of(n);
  for (const auto& p : cnf.productions) prods_of[p.lhs].push_back(&p);

  out.start = intern(cnf.start, full);
  for (std::size_t q = 0; q < items.size(); ++q) {
    auto [a, m] = items[q];
    int lhs = interned[{a, m}];
    for (const Production* p : prods_of[a]) {
      if (p->rhs.size() == 1) {
        const Symbol& s = p->rhs[0];
        OpSet need = s.kind == Symbol::Kind::Op ? op_bit(s.op) : 0;
        if (need == m) out.productions.push_back({lhs, {s}});
        continue;
      }
      int b = p->rhs[0].nt, c = p->rhs[1].nt;
      // Enumerate submasks of m ascending.
      std::vector<OpSet> subs;
      OpSet sub = m;
      while (true) {
        subs.push_back(sub);
        if (sub == 0) break;
        sub = (sub - 1) & m;
      }
      std::sort(subs.begin(), subs.end());
      for (OpSet m2 : subs) {
        OpSet m3 = m & ~m2;
        if (!masks[b].count(m2) || !masks[c].count(m3)) continue;
        if (!split_ok(m2, m3)) continue;
        out.productions.push_back(
            {lhs, {Symbol::nonterminal(intern(b, m2)),
                   Symbol::nonterminal(intern(c, m3))}});
      }
    }
  }
  return FunctionalGrammar{out};
}

VarOpSetTable compute_varop_sets(const Grammar& g) {
  VarOpSetTable table(g.nonterminals.size(), 0);
  std::vector<bool> known(g.nonterminals.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      OpSet val = 0;
      bool all_known = true;
      for (const auto& s : p.rhs) {
        if (s.kind == Symbol::Kind::Op) {
          val |= op_bit(s.op);
        } else if (s.kind == Symbol::Kind::NonTerminal) {
          if (!known[s.nt]) {
            all_known = false;
            break;
          }
          val |= table[s.nt];
        }
      }
      if (!all_known) continue;
      if (!known[p.lhs]) {
        known[p.lhs] = true;
        table[p.lhs] = val;
        changed = true;
      } else if (table[p.lhs] != val) {
        throw std::runtime_error("grammar not functional");
      }
    }
  }
  return table;
}

Grammar union_grammars(const Grammar& g1, const Grammar& g2) {
  std::set<std::string> v1(g1.vars.begin(), g1.vars.end());
  std::set<std::string> v2(g2.vars.begin(), g2.vars.end());
  if (v1 != v2)
    throw std::invalid_argument("union: variable sets differ");
  if (g1.empty_language()) {
    Grammar out = g2;
    out.vars = g1.vars;  // keep g1's variable order
    std::vector<int> vmap(g2.vars.size());
    for (std::size_t i = 0; i < g2.vars.size(); ++i)
      vmap[i] = static_cast<int>(
          std::find(g1.vars.begin(), g1.vars.end(), g2.vars[i]) -
          g1.vars.begin());
    for (auto& p : out.productions)
      for (auto& s : p.rhs)
        if (s.kind == Symbol::Kind::Op)
          s.op = op_is_close(s.op) ? close_op(vmap[op_var(s.op)])
                                   : open_op(vmap[op_var(s.op)]);
    return out;
  }
  if (g2.empty_language()) return g1;

  Grammar out;
  out.vars = g1.vars;
  out.terminals = g1.terminals;
  out.terminals.insert(g2.terminals.begin(), g2.terminals.end());
  out.declared_unambiguous = false;  // union may overlap

  for (const auto& name : g1.nonterminals) out.add_nonterminal(name);
  std::vector<int> remap2(g2.nonterminals.size());
  for (std::size_t i = 0; i < g2.nonterminals.size(); ++i) {
    std::string name = g2.nonterminals[i];
    if (out.find_nonterminal(name) >= 0) name = out.fresh_nonterminal(name);
    remap2[i] = out.add_nonterminal(name);
  }
  std::vector<int> vmap(g2.vars.size());
  for (std::size_t i = 0; i < g2.vars.size(); ++i)
    vmap[i] = static_cast<int>(
        std::find(g1.vars.begin(), g1.vars.end(), g2.vars[i]) -
        g1.vars.begin());

  int fresh_start =
      out.add_nonterminal(out.fresh_nonterminal(g1.nonterminals[g1.start]));
  out.productions.push_back(
      {fresh_start, {Symbol::nonterminal(g1.start)}});
  out.productions.push_back(
      {fresh_start, {Symbol::nonterminal(remap2[g2.start])}});
  out.start = fresh_start;
  for (const auto& p : g1.productions) out.productions.push_back(p);
  for (const auto& p : g2.productions) {
    Production q;
    q.lhs = remap2[p.lhs];
    for (auto s : p.rhs) {
      if (s.kind == Symbol::Kind::NonTerminal) s.nt = remap2[s.nt];
      if (s.kind == Symbol::Kind::Op)
        s.op = op_is_close(s.op) ? close_op(vmap[op_var(s.op)])
                                 : open_op(vmap[op_var(s.op)]);
      q.rhs.push_back(s);
    }
    out.productions.push_back(std::move(q));
  }
  return out;
}

Grammar project(const Grammar& g, const std::vector<std::string>& keep) {
  std::vector<int> vmap(g.vars.size(), -1);  // old var id -> new var id
  Grammar out;
  for (const auto& v : g.vars) {
    if (std::find(keep.begin(), keep.end(), v) == keep.end()) continue;
    vmap[g.find_var(v)] = static_cast<int>(out.vars.size());
    out.vars.push_back(v);
  }
  for (const auto& v : keep)
    if (g.find_var(v) < 0)
      throw std::invalid_argument("project: unknown variable " + v);
  out.nonterminals = g.nonterminals;
  out.terminals = g.terminals;
  out.start = g.start;
  out.declared_unambiguous = g.declared_unambiguous;
  for (const auto& p : g.productions) {
    Production q;
    q.lhs = p.lhs;
    for (auto s : p.rhs) {
      if (s.kind == Symbol::Kind::Op) {
        int nv = vmap[op_var(s.op)];
        if (nv < 0) continue;  // erased op
        s.op = op_is_close(s.op) ? close_op(nv) : open_op(nv);
      }
      q.rhs.push_back(s);
    }
    out.productions.push_back(std::move(q));
  }
  return out;
}

std::optional<SpanMapping> empty_doc_mapping(const Grammar& g) {
  // Erase all variable operations, then test whether the start symbol
  // derives epsilon.
  std::vector<bool> nullable(g.nonterminals.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (nullable[p.lhs]) continue;
      bool ok = true;
      for (const auto& s : p.rhs) {
        if (s.kind == Symbol::Kind::Terminal ||
            (s.kind == Symbol::Kind::NonTerminal && !nullable[s.nt])) {
          ok = false;
          break;
        }
      }
      if (ok) {
        nullable[p.lhs] = true;
        changed = true;
      }
    }
  }
  if (g.empty_language() || !nullable[g.start]) return std::nullopt;
  SpanMapping m;
  m.spans.assign(g.num_vars(), Span{1, 1});
  return m;
}

bool is_regular_form(const Grammar& g) {
  for (const auto& p : g.productions) {
    if (p.rhs.size() == 1 && p.rhs[0].kind != Symbol::Kind::NonTerminal)
      continue;
    if (p.rhs.size() == 2 && p.rhs[0].kind != Symbol::Kind::NonTerminal &&
        p.rhs[1].kind == Symbol::Kind::NonTerminal)
      continue;
    return false;
  }
  return true;
}

}  // namespace cfspanner
