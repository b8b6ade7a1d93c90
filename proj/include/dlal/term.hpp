#ifndef DLAL_TERM_HPP
#define DLAL_TERM_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlal {

struct parse_error : std::runtime_error {
  std::size_t position;
  parse_error(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
};

struct invariant_violation : std::logic_error {
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Plain lambda terms. Immutable, shared; safe to alias across threads.
// ---------------------------------------------------------------------------

enum class TermKind { Var, Abs, App };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  std::string name;  // Var: the variable; Abs: the binder
  TermPtr a;         // Abs: body; App: function
  TermPtr b;         // App: argument
};

TermPtr mk_var(std::string name);
TermPtr mk_abs(std::string binder, TermPtr body);
TermPtr mk_app(TermPtr fun, TermPtr arg);

// |x| = 1, |\x.t| = |t| + 1, |(t u)| = |t| + |u| + 1
std::size_t term_size(const TermPtr& t);

// Number of free occurrences of x in t.
std::size_t free_occurrences(const std::string& x, const TermPtr& t);

std::set<std::string> free_vars(const TermPtr& t);

bool alpha_eq(const TermPtr& s, const TermPtr& t);

// A name based on `base` that is not in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Capture-avoiding t[u/x].
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& u);

// Parallel capture-avoiding rename of two free variables to one (Cntr).
TermPtr rename_pair(const TermPtr& t, const std::string& x1, const std::string& x2,
                    const std::string& x);

// ---------------------------------------------------------------------------
// Redex addressing and reduction
// ---------------------------------------------------------------------------

enum class PathStep : uint8_t { Fun, Arg, Body };
using RedexPath = std::vector<PathStep>;

std::string path_to_string(const RedexPath& p);
RedexPath path_from_string(const std::string& s);

// Subterm at path, or nullptr if the path does not address one.
TermPtr subterm_at(const TermPtr& t, const RedexPath& p);

// True iff p addresses an App whose function is an Abs.
bool is_redex_at(const TermPtr& t, const RedexPath& p);

// All redex paths in leftmost-outermost (pre-order, fun-before-arg) order.
std::vector<RedexPath> redex_paths(const TermPtr& t);

// Fires the beta redex at p; throws invariant_violation if p is not a redex.
TermPtr beta_step(const TermPtr& t, const RedexPath& p);

bool is_normal_form(const TermPtr& t);

enum class Strategy { LeftmostOutermost, RightmostInnermost, Random };

struct TraceStep {
  RedexPath path;
  std::size_t result_size;
};

struct ReductionTrace {
  TermPtr initial;
  std::vector<TraceStep> steps;
  TermPtr final;
  bool complete = true;  // false: fuel exhausted before normal form
  std::size_t step_count() const { return steps.size(); }
};

// Beta-normalizes t under the strategy, spending at most `fuel` steps.
// Fuel exhaustion is reported through `complete`, not an exception.
ReductionTrace normalize(const TermPtr& t, Strategy strategy, std::size_t fuel,
                         uint64_t seed = 0);

// Replays a trace from its initial term; throws invariant_violation if any
// recorded step or size disagrees.
void replay_trace(const ReductionTrace& tr);

// ---------------------------------------------------------------------------
// Concrete syntax:  \x.body   juxtaposition (left assoc)   parentheses
// ---------------------------------------------------------------------------

TermPtr parse_term(const std::string& text);
std::string print_term(const TermPtr& t);

// Church-decodes a normal form \f.\x.f (f ... (f x)); nullopt if not one.
std::optional<std::size_t> decode_numeral(const TermPtr& t);

std::string trace_to_json(const ReductionTrace& tr);

}  // namespace dlal

#endif
