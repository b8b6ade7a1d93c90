#ifndef DLAL_LLA_HPP
#define DLAL_LLA_HPP

#include <memory>
#include <string>
#include <vector>

#include "dlal/derivation.hpp"
#include "dlal/term.hpp"

namespace dlal {

// ---------------------------------------------------------------------------
// Light affine lambda calculus:
//   t, u ::= x | \x.t | t u | !t | let u be !x in t | $t | let u be $x in t
// \!x.t abbreviates \x.let x be !y in t[y/x].
// ---------------------------------------------------------------------------

enum class LlaKind { Var, Abs, App, Bang, Par, LetBang, LetPar };

struct LlaTerm;
using LlaPtr = std::shared_ptr<const LlaTerm>;

struct LlaTerm {
  LlaKind kind;
  std::string name;  // Var / Abs binder / Let binder
  LlaPtr a;          // Abs body / App fun / Bang,Par operand / Let scrutinee
  LlaPtr b;          // App arg / Let body
};

LlaPtr l_var(std::string name);
LlaPtr l_abs(std::string binder, LlaPtr body);
LlaPtr l_app(LlaPtr fun, LlaPtr arg);
LlaPtr l_bang(LlaPtr t);
LlaPtr l_par(LlaPtr t);
LlaPtr l_let_bang(LlaPtr scrutinee, std::string binder, LlaPtr body);
LlaPtr l_let_par(LlaPtr scrutinee, std::string binder, LlaPtr body);
// \!x.t, stored structurally as the abbreviation.
LlaPtr l_bang_abs(const std::string& binder, const LlaPtr& body);

// Written size: the \! abbreviation counts as one abstraction and the modal
// constructors !t, $t are size-transparent; lets count one.
std::size_t lla_size(const LlaPtr& t);
// Max number of !u / $u constructors in a branch of the term tree.
std::size_t lla_depth(const LlaPtr& t);

bool lla_alpha_eq(const LlaPtr& s, const LlaPtr& t);
std::set<std::string> lla_free_vars(const LlaPtr& t);
LlaPtr lla_substitute(const LlaPtr& t, const std::string& x, const LlaPtr& u);

std::string print_lla(const LlaPtr& t);
LlaPtr parse_lla(const std::string& text);

TermPtr erase(const LlaPtr& t);

// Steps into an LlaTerm (Scrut addresses a let scrutinee or modal operand).
enum class LlaStep : uint8_t { Fun, Arg, Body, Scrut };
using LlaPath = std::vector<LlaStep>;

enum class LlaRule { Beta, Par, Bang, Com1, Com2 };

// Fires one reduction rule at the addressed position.
LlaPtr lla_step(const LlaPtr& t, LlaRule rule, const LlaPath& path);

bool is_scn(const LlaPtr& t);  // ($,!,com)-normal

// Exhaustively applies ($), (!), (com1), (com2), innermost first, in that
// order at each position. Erasure-preserving.
std::pair<LlaPtr, std::size_t> saturate(const LlaPtr& t);

// Lemma 27 (2): the lambda-LA decoration of a checked NDLAL script.
// erase(embed(d)) is alpha-equal to the subject, lla_size <= |D| and
// lla_depth <= the derivation depth.
LlaPtr embed(const NdlalCheckedPtr& d);

// Lemma 30: fires the beta redex of erase(t) addressed by `redex` inside t
// and saturates; the result is ($,!,com)-normal and erases to the reduct.
// Returns the term and the number of lambda-LA steps (>= 1).
std::pair<LlaPtr, std::size_t> simulate_step(const LlaPtr& t, const RedexPath& redex);

// Lemma 29 shape scan on a ($,!,com)-normal typable term: application
// functions are variables, applications or abstractions; let-$ scrutinees are
// variables or applications; let-! scrutinees are variables.
std::vector<std::string> lemma29_violations(const LlaPtr& t);

}  // namespace dlal

#endif
