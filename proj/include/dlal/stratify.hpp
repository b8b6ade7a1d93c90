#ifndef DLAL_STRATIFY_HPP
#define DLAL_STRATIFY_HPP

#include <memory>
#include <string>
#include <vector>

#include "dlal/derivation.hpp"
#include "dlal/term.hpp"

namespace dlal {

// ---------------------------------------------------------------------------
// Stratified terms: abstractions carry a depth and an optional bang mark.
// ---------------------------------------------------------------------------

struct StratTerm;
using StratPtr = std::shared_ptr<const StratTerm>;

struct StratTerm {
  TermKind kind;
  std::string name;
  std::size_t depth = 0;  // Abs only
  bool banged = false;    // Abs only
  StratPtr a;
  StratPtr b;
};

StratPtr s_var(std::string name);
StratPtr s_abs(std::string binder, std::size_t depth, bool banged, StratPtr body);
StratPtr s_app(StratPtr fun, StratPtr arg);

std::size_t strat_size(const StratPtr& t);
// Max abstraction depth in the term (0 for an abstraction-free term).
std::size_t strat_depth(const StratPtr& t);
TermPtr erase_annotations(const StratPtr& t);
StratPtr shift_depths(const StratPtr& t, std::size_t delta);  // t[+delta]
bool strat_alpha_eq(const StratPtr& s, const StratPtr& t);
std::string print_strat(const StratPtr& t);

StratPtr strat_substitute(const StratPtr& t, const std::string& x, const StratPtr& u);

// Lemma 14 decoration of a checked NDLAL script.
StratPtr decorate(const NdlalCheckedPtr& d);

// Redexes whose main abstraction is at depth d, leftmost-outermost order.
std::vector<RedexPath> redexes_at_depth(const StratPtr& t, std::size_t d);
// Smallest depth of any redex, or nullopt if beta-normal.
std::optional<std::size_t> min_redex_depth(const StratPtr& t);

struct ForbiddenPattern {
  RedexPath where;
  std::size_t outer_depth;
  std::size_t inner_depth;
  bool applied;  // true: (\^d x.t)(\^e y.u); false: \^d x.\^e y.t
};

// Lemma 15 scan: subterm shapes that a typable stratified term cannot contain.
std::vector<ForbiddenPattern> scan_forbidden_patterns(const StratPtr& t);

enum class BoundPolicy { Throw, Warn };

struct LevelRecord {
  std::size_t level;
  std::size_t entry_size;
  std::size_t steps;
  std::size_t exit_size;
};

struct LevelTrace {
  StratPtr initial;
  StratPtr final;
  std::vector<LevelRecord> levels;
  std::size_t total_steps = 0;
  std::vector<std::string> warnings;  // populated under BoundPolicy::Warn
  bool ok = true;
};

struct StratifyOptions {
  BoundPolicy policy = BoundPolicy::Throw;
  bool scan_intermediates = false;  // run scan_forbidden_patterns on every step
  bool shadow_check = false;        // explicit-substitution occurrence check
};

// Reduces every depth-d redex (leftmost-outermost within the level).
// Lemma 16 bounds the number of steps by the entry size.
std::pair<StratPtr, std::size_t> reduce_level(const StratPtr& t, std::size_t d,
                                              const StratifyOptions& opts = {},
                                              LevelTrace* trace = nullptr);

// Theorem 18 level-by-level normalization with bound verification:
//   steps at level d <= |t_d|                  (Lemma 16)
//   |t_{d+1}| <= |t_d| (|t_d| - 1), |t_d| >= 2 (Lemma 17)
//   no redex below d after level d             (Lemma 15)
//   sum |t_d| <= |t_0|^(2^depth)               (Theorem 18)
LevelTrace normalize_levels(const StratPtr& t, const StratifyOptions& opts = {});

// steps <= base^(2^d), computed without overflow (the bound may exceed any
// machine integer; comparison happens in log space with an exact fallback).
bool within_bound(std::size_t steps, std::size_t base, std::size_t depth);

std::string level_trace_to_json(const LevelTrace& tr);
std::string level_trace_to_csv(const LevelTrace& tr);

}  // namespace dlal

#endif
