#include "cfspanner/adjust.hpp"

#include <map>
#include <sstream>

namespace cfspanner {

std::string AdjustedGrammar::nt_name(int id) const {
  const AdjNT& a = nts.at(id);
  if (a.eps_tagged()) return base_names.at(a.base) + "_eps";
  return base_names.at(a.base) + "_" + std::to_string(a.i) + "," +
         std::to_string(a.j);
}

std::size_t AdjustedGrammar::size() const {
  std::size_t s = 0;
  for (const auto& p : productions)
    s += p.kind == AdjProd::Kind::Binary ? 2 : 1;
  return s;
}

AdjustedGrammar adjust(const FunctionalGrammar& fg, const Doc& d) {
  const Grammar& g = fg.grammar;
  const int n = static_cast<int>(d.size());
  if (n == 0)
    throw std::invalid_argument(
        "adjust: empty document is handled by empty_doc_mapping");

  AdjustedGrammar ag;
  ag.doc = d;
  ag.vars = g.vars;
  ag.base_names = g.nonterminals;
  if (g.empty_language()) return ag;

  const int nb = static_cast<int>(g.nonterminals.size());
  std::uint64_t work = 0;

  // Productivity of the eps-tagged copies.
  std::vector<bool> eps_prod(nb, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (eps_prod[p.lhs]) continue;
      ++work;
      bool ok;
      if (p.rhs.size() == 1)
        ok = p.rhs[0].kind == Symbol::Kind::Op;
      else
        ok = eps_prod[p.rhs[0].nt] && eps_prod[p.rhs[1].nt];
      if (ok) {
        eps_prod[p.lhs] = true;
        changed = true;
      }
    }
  }

  // Productivity of range copies, by range length; same-length rules
  // (B_{i,j} C_eps and B_eps C_{i,j}) need a fixpoint within each cell.
  auto cell = [n](int i, int j) { return (i - 1) * n + (j - 1); };
  std::vector<std::vector<bool>> range_prod(n * n,
                                            std::vector<bool>(nb, false));
  for (int len = 1; len <= n; ++len) {
    for (int i = 1; i + len - 1 <= n; ++i) {
      int j = i + len - 1;
      auto& here = range_prod[cell(i, j)];
      bool local_changed = true;
      while (local_changed) {
        local_changed = false;
        for (const auto& p : g.productions) {
          if (here[p.lhs]) continue;
          bool ok = false;
          if (p.rhs.size() == 1) {
            ++work;
            ok = i == j && p.rhs[0].kind == Symbol::Kind::Terminal &&
                 p.rhs[0].term == d[i - 1];
          } else {
            int b = p.rhs[0].nt, c = p.rhs[1].nt;
            work += 2;
            if (here[b] && eps_prod[c]) ok = true;
            if (!ok && eps_prod[b] && here[c]) ok = true;
            for (int split = i; !ok && split < j; ++split) {
              ++work;
              ok = range_prod[cell(i, split)][b] &&
                   range_prod[cell(split + 1, j)][c];
            }
          }
          if (ok) {
            here[p.lhs] = true;
            local_changed = true;
          }
        }
      }
    }
  }

  if (!range_prod[cell(1, n)][g.start]) {
    ag.construction_work = work;
    return ag;  // empty-language marker
  }

  // Intern reachable useful non-terminals in BFS order and instantiate the
  // production schemata among them.
  std::map<AdjNT, int> interned;
  auto intern = [&](AdjNT a) {
    auto it = interned.find(a);
    if (it != interned.end()) return it->second;
    int id = static_cast<int>(ag.nts.size());
    interned[a] = id;
    ag.nts.push_back(a);
    return id;
  };
  std::vector<std::vector<const Production*>> prods_of_base(nb);
  for (const auto& p : g.productions) prods_of_base[p.lhs].push_back(&p);

  ag.start = intern({g.start, 1, n});
  for (std::size_t q = 0; q < ag.nts.size(); ++q) {
    const AdjNT a = ag.nts[q];
    int lhs = static_cast<int>(q);
    for (const Production* p : prods_of_base[a.base]) {
      if (a.eps_tagged()) {
        if (p->rhs.size() == 1) {
          ++work;
          if (p->rhs[0].kind == Symbol::Kind::Op)
            ag.productions.push_back({lhs, AdjProd::Kind::TermOp, 0,
                                      p->rhs[0].op, 0, 0});
        } else {
          ++work;
          int b = p->rhs[0].nt, c = p->rhs[1].nt;
          if (eps_prod[b] && eps_prod[c])
            ag.productions.push_back({lhs, AdjProd::Kind::Binary, 0, 0,
                                      intern({b, 0, 0}), intern({c, 0, 0})});
        }
        continue;
      }
      if (p->rhs.size() == 1) {
        ++work;
        if (a.i == a.j && p->rhs[0].kind == Symbol::Kind::Terminal &&
            p->rhs[0].term == d[a.i - 1])
          ag.productions.push_back(
              {lhs, AdjProd::Kind::TermChar, p->rhs[0].term, 0, 0, 0});
        continue;
      }
      int b = p->rhs[0].nt, c = p->rhs[1].nt;
      work += 2;
      if (range_prod[cell(a.i, a.j)][b] && eps_prod[c])
        ag.productions.push_back({lhs, AdjProd::Kind::Binary, 0, 0,
                                  intern({b, a.i, a.j}), intern({c, 0, 0})});
      if (eps_prod[b] && range_prod[cell(a.i, a.j)][c])
        ag.productions.push_back({lhs, AdjProd::Kind::Binary, 0, 0,
                                  intern({b, 0, 0}), intern({c, a.i, a.j})});
      for (int split = a.i; split < a.j; ++split) {
        ++work;
        if (range_prod[cell(a.i, split)][b] &&
            range_prod[cell(split + 1, a.j)][c])
          ag.productions.push_back(
              {lhs, AdjProd::Kind::Binary, 0, 0, intern({b, a.i, split}),
               intern({c, split + 1, a.j})});
      }
    }
  }

  ag.prods_of.assign(ag.nts.size(), {});
  for (std::size_t pi = 0; pi < ag.productions.size(); ++pi)
    ag.prods_of[ag.productions[pi].lhs].push_back(static_cast<int>(pi));
  ag.construction_work = work;
  return ag;
}

namespace {

void words_from(const AdjustedGrammar& ag, int nt, int bound,
                std::vector<std::optional<std::set<RefWord>>>& memo,
                std::vector<bool>& on_stack) {
  if (memo[nt]) return;
  if (on_stack[nt])
    throw std::logic_error("language_of: cyclic adjusted grammar");
  on_stack[nt] = true;
  std::set<RefWord> words;
  for (int pi : ag.prods_of[nt]) {
    const AdjProd& p = ag.productions[pi];
    switch (p.kind) {
      case AdjProd::Kind::TermChar:
        words.insert({RefSymbol::terminal(p.term)});
        break;
      case AdjProd::Kind::TermOp:
        words.insert({RefSymbol::operation(p.op)});
        break;
      case AdjProd::Kind::Binary: {
        words_from(ag, p.left, bound, memo, on_stack);
        words_from(ag, p.right, bound, memo, on_stack);
        for (const auto& l : *memo[p.left])
          for (const auto& r : *memo[p.right]) {
            if (static_cast<int>(l.size() + r.size()) > bound)
              throw ResourceError("language_of: length bound exceeded");
            RefWord w = l;
            w.insert(w.end(), r.begin(), r.end());
            words.insert(std::move(w));
          }
        break;
      }
    }
  }
  on_stack[nt] = false;
  memo[nt] = std::move(words);
}

}  // namespace

std::set<RefWord> language_from(const AdjustedGrammar& ag, int nt,
                                int length_bound) {
  std::vector<std::optional<std::set<RefWord>>> memo(ag.nts.size());
  std::vector<bool> on_stack(ag.nts.size(), false);
  words_from(ag, nt, length_bound, memo, on_stack);
  return *memo[nt];
}

std::set<RefWord> language_of(const AdjustedGrammar& ag, int length_bound) {
  if (ag.empty_language()) return {};
  if (length_bound < static_cast<int>(ag.doc.size()) +
                         2 * static_cast<int>(ag.vars.size()))
    throw std::invalid_argument("language_of: bound below |d| + 2k");
  return language_from(ag, ag.start, length_bound);
}

std::string dump_adjusted(const AdjustedGrammar& ag) {
  std::ostringstream out;
  out << "# adjusted grammar, doc = \"" << utf8_encode(ag.doc) << "\"\n";
  if (ag.empty_language()) {
    out << "# empty language\n";
    return out.str();
  }
  out << "# start: " << ag.nt_name(ag.start) << "\n";
  for (const auto& p : ag.productions) {
    out << ag.nt_name(p.lhs) << " -> ";
    switch (p.kind) {
      case AdjProd::Kind::TermChar:
        out << "'" << utf8_encode_char(p.term) << "'";
        break;
      case AdjProd::Kind::TermOp:
        out << (op_is_close(p.op) ? ag.vars[op_var(p.op)] + "}"
                                  : "{" + ag.vars[op_var(p.op)]);
        break;
      case AdjProd::Kind::Binary:
        out << ag.nt_name(p.left) << " " << ag.nt_name(p.right);
        break;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace cfspanner
