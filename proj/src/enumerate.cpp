#include "cfspanner/enumerate.hpp"

#include <algorithm>
#include <chrono>

namespace cfspanner {

SkippableFlags mark_skippable(const DecoratedGrammar& dg,
                              const std::vector<char>& stable) {
  SkippableFlags flags(dg.productions.size(), 0);
  for (std::size_t i = 0; i < dg.productions.size(); ++i) {
    const DecProd& p = dg.productions[i];
    if (p.is_term) continue;
    if (stable[p.lhs]) continue;
    if (p.inner_left || p.inner_right) continue;
    if (stable[p.left] == stable[p.right]) continue;  // need exactly one
    flags[i] = 1;
  }
  return flags;
}

namespace {

std::vector<std::vector<int>> nonskippable_index(const DecoratedGrammar& dg,
                                                 const SkippableFlags& flags) {
  std::vector<std::vector<int>> idx(dg.nts.size());
  for (std::size_t nt = 0; nt < dg.nts.size(); ++nt)
    for (int pi : dg.prods_of[nt])
      if (!flags[pi]) idx[nt].push_back(pi);
  return idx;
}

}  // namespace

JumpTable compute_jump(const DecoratedGrammar& dg, const SkippableFlags& flags,
                       const std::vector<char>& stable) {
  JumpTable jt;
  const int n = static_cast<int>(dg.nts.size());
  auto nonskip = nonskippable_index(dg, flags);
  std::vector<char> removed(n, 0);
  for (int nt = 0; nt < n; ++nt) removed[nt] = nonskip[nt].empty();

  std::vector<std::vector<int>> reachable(n);
  for (int nt = 0; nt < n; ++nt) reachable[nt] = {nt};

  // Reverse topological order: children of a binary rule cover strictly
  // shorter ranges than the head, so ascending range length works.
  std::vector<int> skip_rules;
  for (std::size_t pi = 0; pi < dg.productions.size(); ++pi)
    if (flags[pi]) skip_rules.push_back(static_cast<int>(pi));
  std::sort(skip_rules.begin(), skip_rules.end(), [&](int a, int b) {
    const DecNT& la = dg.nts[dg.productions[a].lhs];
    const DecNT& lb = dg.nts[dg.productions[b].lhs];
    int lena = la.j - la.i, lenb = lb.j - lb.i;
    if (lena != lenb) return lena < lenb;
    if (dg.productions[a].lhs != dg.productions[b].lhs)
      return dg.productions[a].lhs < dg.productions[b].lhs;
    return a < b;
  });

  std::uint64_t work = 0;
  for (int pi : skip_rules) {
    const DecProd& p = dg.productions[pi];
    int child = stable[p.left] ? p.right : p.left;  // the non-stable child
    auto& dst = reachable[p.lhs];
    const auto& src = reachable[child];
    std::vector<int> merged;
    merged.reserve(dst.size() + src.size());
    std::set_union(dst.begin(), dst.end(), src.begin(), src.end(),
                   std::back_inserter(merged));
    work += dst.size() + src.size();
    dst = std::move(merged);
  }

  jt.jump.assign(n, {});
  for (int nt = 0; nt < n; ++nt)
    for (int r : reachable[nt])
      if (!removed[r]) jt.jump[nt].push_back(r);
  jt.construction_work = work;
  return jt;
}

std::vector<ApplyProdYield> apply_prod(const DecoratedGrammar& dg,
                                       const SkippableFlags& flags,
                                       const std::vector<char>& stable,
                                       int A) {
  if (stable[A])
    throw std::logic_error("apply_prod: called on a stable non-terminal");
  std::vector<ApplyProdYield> out;
  for (int pi : dg.prods_of[A]) {
    if (flags[pi]) continue;
    const DecProd& p = dg.productions[pi];
    if (p.is_term)
      throw std::logic_error("apply_prod: non-stable head with terminal rule");
    ApplyProdYield y;
    OpSet m = p.inner_left | p.inner_right;
    for (OpId op = 0; op < 2 * dg.num_vars(); ++op)
      if (m & op_bit(op)) y.map.emplace_back(op, p.split + 1);
    if (!stable[p.left]) y.beta.push_back(p.left);
    if (!stable[p.right]) y.beta.push_back(p.right);
    out.push_back(std::move(y));
  }
  return out;
}

MappingStream::MappingStream(const DecoratedGrammar& dg, const JumpTable& jt,
                             const SkippableFlags& flags,
                             const std::vector<char>& stable)
    : dg_(dg), jt_(jt), flags_(flags), stable_(stable) {
  nonskip_of_ = nonskippable_index(dg, flags);
}

SpanMapping MappingStream::finish(
    const std::vector<std::pair<OpId, int>>& map) {
  const int k = dg_.num_vars();
  std::vector<int> open_pos(k, -1), close_pos(k, -1);
  for (auto [op, pos] : map) {
    int& slot = op_is_close(op) ? close_pos[op_var(op)] : open_pos[op_var(op)];
    if (slot >= 0 && slot != pos)
      throw std::logic_error("enumeration produced a repeated operation");
    slot = pos;
  }
  SpanMapping m;
  m.spans.assign(k, Span{});
  for (int v = 0; v < k; ++v) {
    if (open_pos[v] < 0 || close_pos[v] < 0 || open_pos[v] > close_pos[v])
      throw std::logic_error("enumeration produced an incomplete mapping");
    m.spans[v] = {open_pos[v], close_pos[v]};
  }
  ++stats_.outputs;
  stats_.max_delay = std::max(stats_.max_delay, steps_ - last_output_steps_);
  last_output_steps_ = steps_;
  stats_.total_steps = steps_;
  return m;
}

std::optional<SpanMapping> MappingStream::next() {
  if (exhausted_) return std::nullopt;
  const int n = static_cast<int>(dg_.doc.size());
  while (true) {
    if (stack_.empty()) {
      if (start_idx_ >= dg_.start_rules.size()) {
        exhausted_ = true;
        stats_.max_delay =
            std::max(stats_.max_delay, steps_ - last_output_steps_);
        stats_.total_steps = steps_;
        return std::nullopt;
      }
      int s = dg_.start_rules[start_idx_++];
      step();
      std::vector<std::pair<OpId, int>> map;
      for (OpId op = 0; op < 2 * dg_.num_vars(); ++op) {
        if (dg_.nts[s].pre & op_bit(op)) map.emplace_back(op, 1);
        if (dg_.nts[s].post & op_bit(op)) map.emplace_back(op, n + 1);
      }
      if (stable_[s]) return finish(map);
      Frame f;
      f.alpha = {s};
      f.map = std::move(map);
      stack_.push_back(std::move(f));
      continue;
    }
    Frame& f = stack_.back();
    int A = f.alpha[0];
    const auto& targets = jt_.jump[A];
    if (f.jump_idx >= targets.size()) {
      stack_.pop_back();
      continue;
    }
    int B = targets[f.jump_idx];
    const auto& rules = nonskip_of_[B];
    if (f.prod_idx >= rules.size()) {
      ++f.jump_idx;
      f.prod_idx = 0;
      continue;
    }
    const DecProd& p = dg_.productions[rules[f.prod_idx++]];
    step();  // apply_prod yield
    if (p.is_term)
      throw std::logic_error("enumeration reached a terminal rule");
    std::vector<std::pair<OpId, int>> map = f.map;
    OpSet inner = p.inner_left | p.inner_right;
    for (OpId op = 0; op < 2 * dg_.num_vars(); ++op)
      if (inner & op_bit(op)) map.emplace_back(op, p.split + 1);
    std::vector<int> alpha;
    if (!stable_[p.left]) alpha.push_back(p.left);
    if (!stable_[p.right]) alpha.push_back(p.right);
    alpha.insert(alpha.end(), f.alpha.begin() + 1, f.alpha.end());
    step();  // enumerate recursion
    if (alpha.empty()) return finish(map);
    Frame child;
    child.alpha = std::move(alpha);
    child.map = std::move(map);
    stack_.push_back(std::move(child));  // invalidates f
  }
}

Preprocessed preprocess(const Grammar& g, const Doc& d) {
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };
  Preprocessed pp;
  if (d.empty()) {
    pp.eps_document = true;
    pp.eps_mapping = empty_doc_mapping(g);
    return pp;
  }
  auto t0 = clock::now();
  pp.fg = functionalize(to_cnf(remove_useless(g)));
  pp.varops = compute_varop_sets(pp.fg);
  auto t1 = clock::now();
  pp.ag = adjust(pp.fg, d);
  auto t2 = clock::now();
  pp.dg = decorate(pp.ag, pp.varops);
  auto t3 = clock::now();
  pp.stable = compute_stable(pp.dg);
  auto t4 = clock::now();
  pp.skippable = mark_skippable(pp.dg, pp.stable);
  pp.jump = compute_jump(pp.dg, pp.skippable, pp.stable);
  auto t5 = clock::now();
  pp.t_normalize = secs(t0, t1);
  pp.t_adjust = secs(t1, t2);
  pp.t_decorate = secs(t2, t3);
  pp.t_stable = secs(t3, t4);
  pp.t_jump = secs(t4, t5);
  return pp;
}

std::vector<SpanMapping> spanner_enumerate(const Grammar& g, const Doc& d,
                                           DelayStats* stats) {
  Preprocessed pp = preprocess(g, d);
  std::vector<SpanMapping> out;
  if (pp.eps_document) {
    if (pp.eps_mapping) out.push_back(*pp.eps_mapping);
    if (stats) *stats = DelayStats{out.size(), 0, 0};
    return out;
  }
  MappingStream stream(pp.dg, pp.jump, pp.skippable, pp.stable);
  while (auto m = stream.next()) out.push_back(std::move(*m));
  if (stats) *stats = stream.stats();
  return out;
}

}  // namespace cfspanner
