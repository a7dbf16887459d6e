#pragma once

#include "cfspanner/decorate.hpp"
#include "cfspanner/oracle.hpp"

namespace cfspanner {

using SkippableFlags = std::vector<char>;  // per production

// A production is skippable iff its head is non-stable, both inner
// superscripts are empty, and exactly one child is stable.
SkippableFlags mark_skippable(const DecoratedGrammar& dg,
                              const std::vector<char>& stable);

struct JumpTable {
  // Sorted interned-id arrays per non-terminal.
  std::vector<std::vector<int>> jump;
  std::uint64_t construction_work = 0;  // set-union element operations
};

// computeJump: reachability over skippable rules (descending into the
// non-stable child), filtered to heads of at least one non-skippable rule.
JumpTable compute_jump(const DecoratedGrammar& dg, const SkippableFlags& flags,
                       const std::vector<char>& stable);

struct ApplyProdYield {
  std::vector<int> beta;                    // non-stable children, in order
  std::vector<std::pair<OpId, int>> map;    // inner ops at the split position
};

// One yield per non-skippable binary rule headed by A, in production order.
// A must be non-stable (so all of its rules are binary).
std::vector<ApplyProdYield> apply_prod(const DecoratedGrammar& dg,
                                       const SkippableFlags& flags,
                                       const std::vector<char>& stable, int A);

struct DelayStats {
  std::uint64_t outputs = 0;
  std::uint64_t total_steps = 0;
  std::uint64_t max_delay = 0;  // max steps between consecutive outputs,
                                // including before first and after last
};

// Resumable enumeration over a preprocessed decorated grammar. Owns mutable
// cursor state; do not share one stream across threads.
class MappingStream {
 public:
  MappingStream(const DecoratedGrammar& dg, const JumpTable& jt,
                const SkippableFlags& flags, const std::vector<char>& stable);

  std::optional<SpanMapping> next();
  const DelayStats& stats() const { return stats_; }

 private:
  struct Frame {
    std::vector<int> alpha;                   // pending non-stable symbols
    std::vector<std::pair<OpId, int>> map;    // accumulated pairs
    std::size_t jump_idx = 0;
    std::size_t prod_idx = 0;
  };

  SpanMapping finish(const std::vector<std::pair<OpId, int>>& map);
  void step() { ++steps_; }

  const DecoratedGrammar& dg_;
  const JumpTable& jt_;
  const SkippableFlags& flags_;
  const std::vector<char>& stable_;
  std::vector<std::vector<int>> nonskip_of_;  // per nt: non-skippable rules
  std::vector<Frame> stack_;
  std::size_t start_idx_ = 0;
  std::uint64_t steps_ = 0;
  std::uint64_t last_output_steps_ = 0;
  DelayStats stats_;
  bool exhausted_ = false;
};

// End-to-end pipeline state: preprocessing artifacts plus per-stage timings
// and work counters.
struct Preprocessed {
  bool eps_document = false;
  std::optional<SpanMapping> eps_mapping;  // only when eps_document

  FunctionalGrammar fg;
  VarOpSetTable varops;
  AdjustedGrammar ag;
  DecoratedGrammar dg;
  std::vector<char> stable;
  SkippableFlags skippable;
  JumpTable jump;

  double t_normalize = 0, t_adjust = 0, t_decorate = 0, t_stable = 0,
         t_jump = 0;  // seconds
  bool empty_language() const {
    return !eps_document && dg.empty_language();
  }
};

Preprocessed preprocess(const Grammar& g, const Doc& d);

// Convenience wrapper: full pipeline, all mappings in stream order.
std::vector<SpanMapping> spanner_enumerate(const Grammar& g, const Doc& d,
                                           DelayStats* stats = nullptr);

}  // namespace cfspanner
