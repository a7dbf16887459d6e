#include "cfspanner/decorate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace cfspanner {

namespace {

std::string ops_to_string(OpSet m, const std::vector<std::string>& vars) {
  if (!m) return "0";
  std::string s;
  for (OpId op = 0; op < 2 * static_cast<int>(vars.size()); ++op)
    if (m & op_bit(op))
      s += op_is_close(op) ? vars[op_var(op)] + "}" : "{" + vars[op_var(op)];
  return s;
}

// Step-1 rules before unit elimination.
struct Step1Rule {
  enum class Kind : std::uint8_t { Term, Unit, Binary };
  Kind kind;
  int lhs;
  int pos = 0;              // Term
  int child = -1;           // Unit
  int left = -1, right = -1, split = 0;  // Binary
  OpSet inner_left = 0, inner_right = 0;
};

}  // namespace

std::string DecoratedGrammar::nt_name(int id) const {
  const DecNT& a = nts.at(id);
  return base_names.at(a.base) + "_" + std::to_string(a.i) + "," +
         std::to_string(a.j) + "^" + ops_to_string(a.pre, vars) + "," +
         ops_to_string(a.post, vars);
}

DecoratedGrammar decorate(const AdjustedGrammar& ag, const VarOpSetTable& ops) {
  DecoratedGrammar dg;
  dg.doc = ag.doc;
  dg.vars = ag.vars;
  dg.base_names = ag.base_names;
  if (ag.empty_language()) return dg;

  const int nadj = static_cast<int>(ag.nts.size());
  std::uint64_t work = 0;
  auto eps_ops = [&](int adj) { return ops.at(ag.nts[adj].base); };

  // Phase A: fixpoint of productive superscript pairs per range non-terminal.
  std::vector<std::vector<std::pair<OpSet, OpSet>>> items(nadj);
  std::vector<std::set<std::pair<OpSet, OpSet>>> item_set(nadj);
  std::vector<std::tuple<int, OpSet, OpSet>> worklist;
  auto add_item = [&](int adj, OpSet x, OpSet y) {
    if (item_set[adj].insert({x, y}).second) {
      items[adj].push_back({x, y});
      worklist.emplace_back(adj, x, y);
    }
  };

  std::vector<std::vector<int>> by_left(nadj), by_right(nadj);
  for (std::size_t pi = 0; pi < ag.productions.size(); ++pi) {
    const AdjProd& p = ag.productions[pi];
    if (ag.nts[p.lhs].eps_tagged()) continue;
    if (p.kind == AdjProd::Kind::TermChar) {
      add_item(p.lhs, 0, 0);
    } else if (p.kind == AdjProd::Kind::Binary) {
      by_left[p.left].push_back(static_cast<int>(pi));
      by_right[p.right].push_back(static_cast<int>(pi));
    }
  }
  while (!worklist.empty()) {
    auto [b, x, y] = worklist.back();
    worklist.pop_back();
    for (int pi : by_left[b]) {
      const AdjProd& p = ag.productions[pi];
      if (ag.nts[p.right].eps_tagged()) {
        OpSet c = eps_ops(p.right);
        ++work;
        if (!(x & c) && !(y & c)) add_item(p.lhs, x, y | c);
      } else {
        for (auto [z, w] : items[p.right]) {
          ++work;
          if (((x | y) & (z | w)) == 0) add_item(p.lhs, x, w);
        }
      }
    }
    for (int pi : by_right[b]) {
      const AdjProd& p = ag.productions[pi];
      if (ag.nts[p.left].eps_tagged()) {
        OpSet c = eps_ops(p.left);
        ++work;
        if (!(x & c) && !(y & c)) add_item(p.lhs, x | c, y);
      } else {
        for (auto [xl, yl] : items[p.left]) {
          ++work;
          if (((xl | yl) & (x | y)) == 0) add_item(p.lhs, xl, y);
        }
      }
    }
  }
  for (auto& v : items) std::sort(v.begin(), v.end());

  if (item_set[ag.start].empty()) {
    dg.construction_work = work;
    return dg;
  }

  // Phase B: intern reachable decorated symbols (BFS from the start items)
  // and instantiate the Step-1 rules; the epsilon-child schemata become unit
  // rules directly, since every eps-tagged symbol derives only epsilon once
  // its operations move into the superscript.
  std::map<std::tuple<int, OpSet, OpSet>, int> interned;
  std::vector<std::tuple<int, OpSet, OpSet>> dec_syms;
  auto intern = [&](int adj, OpSet x, OpSet y) {
    auto key = std::make_tuple(adj, x, y);
    auto it = interned.find(key);
    if (it != interned.end()) return it->second;
    int id = static_cast<int>(dec_syms.size());
    interned[key] = id;
    dec_syms.push_back(key);
    return id;
  };

  std::vector<int> seeds;
  for (auto [x, y] : items[ag.start]) seeds.push_back(intern(ag.start, x, y));

  std::vector<Step1Rule> rules1;
  for (std::size_t q = 0; q < dec_syms.size(); ++q) {
    auto [adj, x, y] = dec_syms[q];
    int lhs = static_cast<int>(q);
    for (int pi : ag.prods_of[adj]) {
      const AdjProd& p = ag.productions[pi];
      if (p.kind == AdjProd::Kind::TermChar) {
        ++work;
        if (x == 0 && y == 0) {
          Step1Rule r;
          r.kind = Step1Rule::Kind::Term;
          r.lhs = lhs;
          r.pos = ag.nts[adj].i;
          rules1.push_back(r);
        }
        continue;
      }
      if (p.kind != AdjProd::Kind::Binary) continue;
      bool leps = ag.nts[p.left].eps_tagged();
      bool reps = ag.nts[p.right].eps_tagged();
      if (reps) {
        OpSet c = eps_ops(p.right);
        ++work;
        if (c && (y & c) == c && !(x & c) &&
            item_set[p.left].count({x, y & ~c})) {
          Step1Rule r;
          r.kind = Step1Rule::Kind::Unit;
          r.lhs = lhs;
          r.child = intern(p.left, x, y & ~c);
          rules1.push_back(r);
        }
        continue;
      }
      if (leps) {
        OpSet c = eps_ops(p.left);
        ++work;
        if (c && (x & c) == c && !(y & c) &&
            item_set[p.right].count({x & ~c, y})) {
          Step1Rule r;
          r.kind = Step1Rule::Kind::Unit;
          r.lhs = lhs;
          r.child = intern(p.right, x & ~c, y);
          rules1.push_back(r);
        }
        continue;
      }
      for (auto [xb, yb] : items[p.left]) {
        if (xb != x) continue;
        for (auto [zc, wc] : items[p.right]) {
          if (wc != y) continue;
          ++work;
          if (((x | yb) & (zc | y)) != 0) continue;
          Step1Rule r;
          r.kind = Step1Rule::Kind::Binary;
          r.lhs = lhs;
          r.left = intern(p.left, x, yb);
          r.right = intern(p.right, zc, y);
          r.split = ag.nts[p.left].j;
          r.inner_left = yb;
          r.inner_right = zc;
          rules1.push_back(r);
        }
      }
    }
  }

  // Phase C: unit elimination by unit-reachability closure (unit chains stay
  // within one (i,j) range and strictly grow superscripts, hence acyclic).
  const int nsym = static_cast<int>(dec_syms.size());
  std::vector<std::vector<int>> unit_next(nsym);
  std::vector<std::vector<const Step1Rule*>> non_unit_of(nsym);
  for (const auto& r : rules1) {
    if (r.kind == Step1Rule::Kind::Unit)
      unit_next[r.lhs].push_back(r.child);
    else
      non_unit_of[r.lhs].push_back(&r);
  }
  std::vector<Step1Rule> final_rules;
  std::vector<std::vector<int>> final_of(nsym);
  for (int nt = 0; nt < nsym; ++nt) {
    std::vector<int> order{nt};
    std::set<int> in{nt};
    for (std::size_t q = 0; q < order.size(); ++q)
      for (int m : unit_next[order[q]])
        if (in.insert(m).second) order.push_back(m);
    std::set<std::tuple<int, int, int>> dedup;  // (pos|-1, left, right)
    for (int m : order)
      for (const Step1Rule* r : non_unit_of[m]) {
        ++work;
        auto key = r->kind == Step1Rule::Kind::Term
                       ? std::make_tuple(r->pos, -1, -1)
                       : std::make_tuple(-1, r->left, r->right);
        if (!dedup.insert(key).second) continue;
        Step1Rule f = *r;
        f.lhs = nt;
        final_of[nt].push_back(static_cast<int>(final_rules.size()));
        final_rules.push_back(f);
      }
  }

  // Phase D: prune to symbols reachable from the start alternatives, compact
  // ids, and emit the decorated grammar (terminal rules become (x, i, y)).
  std::vector<int> remap(nsym, -1);
  std::vector<int> bfs;
  auto visit = [&](int nt) {
    if (remap[nt] >= 0) return;
    remap[nt] = static_cast<int>(bfs.size());
    bfs.push_back(nt);
  };
  for (int s : seeds) visit(s);
  for (std::size_t q = 0; q < bfs.size(); ++q)
    for (int ri : final_of[bfs[q]]) {
      const Step1Rule& r = final_rules[ri];
      if (r.kind == Step1Rule::Kind::Binary) {
        visit(r.left);
        visit(r.right);
      }
    }

  for (int old : bfs) {
    auto [adj, x, y] = dec_syms[old];
    DecNT d;
    d.base = ag.nts[adj].base;
    d.i = ag.nts[adj].i;
    d.j = ag.nts[adj].j;
    d.pre = x;
    d.post = y;
    dg.nts.push_back(d);
    dg.nt_varops.push_back(ops.at(d.base));
  }
  dg.prods_of.assign(dg.nts.size(), {});
  for (int old : bfs)
    for (int ri : final_of[old]) {
      const Step1Rule& r = final_rules[ri];
      DecProd p;
      p.lhs = remap[r.lhs];
      if (r.kind == Step1Rule::Kind::Term) {
        p.is_term = true;
        p.pos = r.pos;
      } else {
        p.left = remap[r.left];
        p.right = remap[r.right];
        p.split = r.split;
        p.inner_left = r.inner_left;
        p.inner_right = r.inner_right;
      }
      dg.prods_of[p.lhs].push_back(static_cast<int>(dg.productions.size()));
      dg.productions.push_back(p);
    }
  for (int s : seeds) dg.start_rules.push_back(remap[s]);
  dg.construction_work = work;
  return dg;
}

SpanMapping decorated_to_mapping(const DecWord& w, int num_vars) {
  std::vector<int> open_pos(num_vars, -1), close_pos(num_vars, -1);
  auto place = [&](OpSet m, int pos) {
    for (OpId op = 0; op < 2 * num_vars; ++op) {
      if (!(m & op_bit(op))) continue;
      int& slot = op_is_close(op) ? close_pos[op_var(op)] : open_pos[op_var(op)];
      if (slot >= 0)
        throw std::invalid_argument("decorated word: repeated operation");
      slot = pos;
    }
  };
  for (const auto& t : w) {
    place(t.pre, t.pos);
    place(t.post, t.pos + 1);
  }
  SpanMapping m;
  m.spans.assign(num_vars, Span{});
  for (int v = 0; v < num_vars; ++v) {
    if (open_pos[v] < 0 || close_pos[v] < 0 || open_pos[v] > close_pos[v])
      throw std::invalid_argument("decorated word: invalid operations");
    m.spans[v] = {open_pos[v], close_pos[v]};
  }
  return m;
}

std::vector<char> compute_stable(const DecoratedGrammar& dg) {
  std::vector<char> stable(dg.nts.size(), 0);
  for (std::size_t i = 0; i < dg.nts.size(); ++i)
    stable[i] = dg.nt_varops[i] == (dg.nts[i].pre | dg.nts[i].post);
  return stable;
}

namespace {

struct PartialDeriv {
  DecWord word;
  std::vector<std::pair<OpId, int>> inner;  // pairs from binary splits
};

void derive(const DecoratedGrammar& dg, int nt,
            std::vector<std::optional<std::vector<PartialDeriv>>>& memo,
            std::size_t limit, std::size_t& produced) {
  if (memo[nt]) return;
  memo[nt].emplace();  // ranges shrink strictly, so no cycle guard needed
  std::vector<PartialDeriv> out;
  for (int pi : dg.prods_of[nt]) {
    const DecProd& p = dg.productions[pi];
    if (p.is_term) {
      PartialDeriv d;
      d.word.push_back({dg.nts[nt].pre, p.pos, dg.nts[nt].post});
      out.push_back(std::move(d));
      if (++produced > limit)
        throw ResourceError("enumerate_decorated: derivation limit exceeded");
      continue;
    }
    derive(dg, p.left, memo, limit, produced);
    derive(dg, p.right, memo, limit, produced);
    for (const auto& l : *memo[p.left])
      for (const auto& r : *memo[p.right]) {
        PartialDeriv d;
        d.word = l.word;
        d.word.insert(d.word.end(), r.word.begin(), r.word.end());
        d.inner = l.inner;
        d.inner.insert(d.inner.end(), r.inner.begin(), r.inner.end());
        OpSet m = p.inner_left | p.inner_right;
        for (OpId op = 0; op < 2 * dg.num_vars(); ++op)
          if (m & op_bit(op)) d.inner.emplace_back(op, p.split + 1);
        out.push_back(std::move(d));
        if (++produced > limit)
          throw ResourceError(
              "enumerate_decorated: derivation limit exceeded");
      }
  }
  memo[nt] = std::move(out);
}

}  // namespace

std::vector<DecDerivation> enumerate_decorated(const DecoratedGrammar& dg,
                                               std::size_t limit) {
  std::vector<DecDerivation> out;
  if (dg.empty_language()) return out;
  const int n = static_cast<int>(dg.doc.size());
  std::vector<std::optional<std::vector<PartialDeriv>>> memo(dg.nts.size());
  std::size_t produced = 0;
  for (int s : dg.start_rules) {
    derive(dg, s, memo, limit, produced);
    for (const auto& d : *memo[s]) {
      DecDerivation dd;
      dd.start_nt = s;
      dd.word = d.word;
      std::set<std::pair<OpId, int>> pairs(d.inner.begin(), d.inner.end());
      for (OpId op = 0; op < 2 * dg.num_vars(); ++op) {
        if (dg.nts[s].pre & op_bit(op)) pairs.insert({op, 1});
        if (dg.nts[s].post & op_bit(op)) pairs.insert({op, n + 1});
      }
      for (const auto& t : d.word)
        for (OpId op = 0; op < 2 * dg.num_vars(); ++op) {
          if (t.pre & op_bit(op)) pairs.insert({op, t.pos});
          if (t.post & op_bit(op)) pairs.insert({op, t.pos + 1});
        }
      dd.pairs.assign(pairs.begin(), pairs.end());
      out.push_back(std::move(dd));
    }
  }
  return out;
}

std::string dump_decorated(const DecoratedGrammar& dg) {
  std::ostringstream out;
  out << "# decorated grammar, doc = \"" << utf8_encode(dg.doc) << "\"\n";
  if (dg.empty_language()) {
    out << "# empty language\n";
    return out.str();
  }
  for (int s : dg.start_rules) out << "S% -> " << dg.nt_name(s) << "\n";
  for (const auto& p : dg.productions) {
    out << dg.nt_name(p.lhs) << " -> ";
    if (p.is_term) {
      out << "(" << ops_to_string(dg.nts[p.lhs].pre, dg.vars) << ", " << p.pos
          << ", " << ops_to_string(dg.nts[p.lhs].post, dg.vars) << ")";
    } else {
      out << dg.nt_name(p.left) << " " << dg.nt_name(p.right);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace cfspanner
