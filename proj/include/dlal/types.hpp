#ifndef DLAL_TYPES_HPP
#define DLAL_TYPES_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "dlal/term.hpp"

namespace dlal {

// ---------------------------------------------------------------------------
// DLAL types:   A, B ::= a | A -o B | A => B | $A | forall a. A
// LAL types:    A, B ::= a | A -o B | !A | $A | forall a. A
// Simple types: A, B ::= a | A -> B
// ---------------------------------------------------------------------------

enum class TypeKind { TVar, Lin, Bang, Par, OfCourse, Forall, Arrow };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind;
  std::string name;  // TVar: atom; Forall: bound atom
  TypePtr a;         // Lin/Bang/Arrow: left; Par/OfCourse/Forall: operand
  TypePtr b;         // Lin/Bang/Arrow: right
};

TypePtr t_var(std::string a);
TypePtr t_lin(TypePtr a, TypePtr b);      // A -o B
TypePtr t_bang_arrow(TypePtr a, TypePtr b);  // A => B          (DLAL only)
TypePtr t_par(TypePtr a);                 // $A
TypePtr t_ofcourse(TypePtr a);            // !A               (LAL only)
TypePtr t_forall(std::string a, TypePtr body);
TypePtr t_arrow(TypePtr a, TypePtr b);    // A -> B           (simple only)
TypePtr t_par_n(TypePtr a, std::size_t n);

bool type_alpha_eq(const TypePtr& s, const TypePtr& t);
std::set<std::string> free_type_vars(const TypePtr& t);

// Well-formedness per language.
bool is_dlal_type(const TypePtr& t);
bool is_lal_type(const TypePtr& t);
bool is_simple_type(const TypePtr& t);
bool is_quantifier_free(const TypePtr& t);

// Capture-avoiding A[B/a].
TypePtr type_substitute(const TypePtr& a, const std::string& alpha, const TypePtr& b);

// (.)* : DLAL -> LAL.  (A => B)* = !A* -o B*, commutes elsewhere.
TypePtr star_translate(const TypePtr& a);

// The (.)* preimage of a LAL type, when it has one.
std::optional<TypePtr> in_dlal_star(const TypePtr& a);

// Forgetful map to simple types; requires a quantifier-free DLAL type.
TypePtr erase_to_simple(const TypePtr& a);
// Analogous LAL forgetful map (drops ! and $, -o becomes ->).
TypePtr lal_erase_to_simple(const TypePtr& a);

// Syntax: `a -o b`, `a => b`, `$a`, `!a`, `forall a. b`; arrows right-assoc.
TypePtr parse_dlal_type(const std::string& text);
TypePtr parse_lal_type(const std::string& text);
std::string print_type(const TypePtr& t);

// ---------------------------------------------------------------------------
// Typing contexts
// ---------------------------------------------------------------------------

// DLAL dual context Gamma; Delta.  Delta entries may be discharged [A]_$.
struct LinearEntry {
  TypePtr type;
  bool discharged = false;
};

struct DualContext {
  std::map<std::string, TypePtr> nonlinear;       // Gamma
  std::map<std::string, LinearEntry> linear;      // Delta
  bool disjoint() const;
  bool has_discharged() const;
};

// LAL context: every entry proper, !-discharged or $-discharged.
enum class LalMark { Proper, BangDischarged, ParDischarged };

struct LalEntry {
  TypePtr type;
  LalMark mark = LalMark::Proper;
};

struct LalContext {
  std::map<std::string, LalEntry> entries;
  bool has_discharged() const;
};

std::string print_context(const DualContext& ctx);
std::string print_context(const LalContext& ctx);

}  // namespace dlal

#endif
