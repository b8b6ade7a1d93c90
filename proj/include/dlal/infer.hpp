#ifndef DLAL_INFER_HPP
#define DLAL_INFER_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dlal/derivation.hpp"
#include "dlal/term.hpp"
#include "dlal/types.hpp"

namespace dlal {

struct type_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Principal simple types over an occurrence-split derivation: every variable
// occurrence is its own axiom; contraction and weakening sit immediately
// below the abstraction that binds the variable (free variables are
// contracted at the root).
// ---------------------------------------------------------------------------

enum class SKind { Ax, App, Abs, Cntr, Weak };

struct SimpleDeriv;
using SDPtr = std::shared_ptr<const SimpleDeriv>;

struct SimpleDeriv {
  SKind kind;
  std::string name;   // Ax: occurrence; Abs: binder; Cntr: x1; Weak: added var
  std::string name2;  // Cntr: x2
  std::string name3;  // Cntr: merged name
  TypePtr type;       // Ax/Weak: the (principal) simple type of the variable
  SDPtr l, r;         // premises (App has two, others one or none)
  // judgement, filled in by the builder
  std::map<std::string, TypePtr> env;
  TypePtr jtype;
  TermPtr subject;
};

struct PrincipalResult {
  TypePtr type;  // principal simple type, atoms canonically renamed
  SDPtr deriv;
  std::map<std::string, std::string> occ_of;  // occurrence -> source variable
};

// Throws type_error when t has no simple type (occurs check and friends).
PrincipalResult principal_simple_type(const TermPtr& t);

// ---------------------------------------------------------------------------
// Stage 1: abstract types and boolean-disjunction constraints
// ---------------------------------------------------------------------------

struct AType;
using ATypePtr = std::shared_ptr<const AType>;

// a1...an B: a decoration (possibly empty) over an atom or an arrow.
struct AType {
  std::vector<int> params;
  bool atom;
  std::string name;   // atom
  ATypePtr arg, res;  // arrow
};

ATypePtr a_atom(std::string name);
ATypePtr a_arrow(ATypePtr arg, ATypePtr res);
ATypePtr a_decorate(const ATypePtr& t, int param);  // prepend one parameter
std::string print_atype(const ATypePtr& t, const std::vector<std::string>& param_names);

// A disjunction of parameters, or the constant 0 (empty, one=false) or 1.
struct Disj {
  std::vector<int> params;
  bool one = false;
};

struct BoolConstraintSet {
  std::vector<std::pair<Disj, Disj>> equations;
  bool absurd = false;
};

struct ParamSupply {
  int next = 0;
  std::vector<std::string> names;
  int fresh(const std::string& base);
};

// One fresh parameter per arrow argument position.
ATypePtr maximal_decoration(const TypePtr& simple, ParamSupply& supply);

// Figure 9 unification of abstract types.
BoolConstraintSet unify_abstract(const ATypePtr& a1, const ATypePtr& a2);

// m(A1, A2): parameter-union merge of two decorations of one simple type.
ATypePtr merge_types(const ATypePtr& a1, const ATypePtr& a2);

struct AbstractDeriv {
  SDPtr deriv;
  ParamSupply supply;
  BoolConstraintSet constraints;
  std::map<const SimpleDeriv*, std::map<std::string, ATypePtr>> envs;
  std::map<const SimpleDeriv*, ATypePtr> types;
  std::map<const SimpleDeriv*, int> app_param;  // (app a)
  std::map<const SimpleDeriv*, int> abs_param;  // (abstr a)
};

AbstractDeriv abstract_derivation(const SDPtr& d);

// All satisfying {0,1} assignments as bit masks over the parameters,
// fewest-ones first. Throws resource_error beyond param_cap parameters.
std::vector<uint64_t> enumerate_solutions(const BoolConstraintSet& c, int n_params,
                                          int param_cap = 64);

// ---------------------------------------------------------------------------
// !-derivation: applications marked (=> e), boxes = their right premises
// ---------------------------------------------------------------------------

struct BangDeriv {
  SDPtr deriv;
  std::set<const SimpleDeriv*> banged_apps;
  std::set<const SimpleDeriv*> banged_abs;
};

struct BangRejection {
  std::string condition;  // "i" or "ii"
  std::string detail;
};

std::variant<BangDeriv, BangRejection> bang_check(const AbstractDeriv& ad, uint64_t phi);

// ---------------------------------------------------------------------------
// Stage 2: paragraph placement by bounded search over levels
// ---------------------------------------------------------------------------

struct InferResult {
  TypePtr type;
  DerivPtr script;
  std::map<std::string, int> phi;     // parameter name -> bit
  std::map<std::string, int> levels;  // node label -> level
};

struct InferOptions {
  int level_cap = 8;
  int param_cap = 64;
  std::size_t assignment_guard = 1500;  // stage-2 assignments visited per marking
  std::size_t max_results = 24;          // distinct types kept per marking
  std::size_t marking_cap = 2000;        // distinct markings searched per instance
};

std::vector<InferResult> place_paragraphs(const AbstractDeriv& ad, uint64_t phi,
                                          const BangDeriv& marking, const InferOptions& opts);

// The full Appendix G pipeline: every result re-checks under check_ndlal and
// erases to the principal simple type.
std::vector<InferResult> infer(const TermPtr& t, const InferOptions& opts = {});

}  // namespace dlal

#endif
