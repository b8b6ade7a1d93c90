#ifndef DLAL_DERIVATION_HPP
#define DLAL_DERIVATION_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dlal/term.hpp"
#include "dlal/types.hpp"

namespace dlal {

// ---------------------------------------------------------------------------
// Explicit natural-deduction derivation scripts for NDLAL and NLAL.
// A script is a checkable certificate: each node names its rule and carries
// the parameters needed to recompute the judgement bottom-up.
// ---------------------------------------------------------------------------

enum class Rule {
  Id,
  LinI,      // -o i
  LinE,      // -o e
  BangI,     // => i          (NDLAL)
  BangE,     // => e          (NDLAL)
  Weak,
  Cntr,
  ParI,      // $ i
  ParE,      // $ e
  ForallI,
  ForallE,
  LalBangI,  // ! i           (NLAL)
  LalBangE,  // ! e           (NLAL)
};

std::string rule_name(Rule r);
Rule rule_from_name(const std::string& s);

enum class WeakMark { Proper, ParDischarged, BangDischarged };

struct WeakEntry {
  std::string var;
  TypePtr type;
  WeakMark mark = WeakMark::Proper;
};

struct DerivParams {
  std::optional<std::string> binder;       // Id/LinI/BangI: variable; ForallI: atom;
                                           // ParE/LalBangE: substituted variable
  std::optional<TypePtr> inst_type;        // Id: variable type; ForallE: instantiation
  std::optional<std::array<std::string, 3>> merged;  // Cntr: {x1, x2, x}
  std::vector<std::string> promoted;       // ParI: NDLAL to-Gamma / NLAL to-[.]_! names
  std::vector<std::pair<std::string, TypePtr>> weak_nonlinear;  // NDLAL Weak
  std::vector<WeakEntry> weak_linear;      // Weak: NDLAL Delta / NLAL whole context
};

struct DerivNode;
using DerivPtr = std::shared_ptr<const DerivNode>;

struct DerivNode {
  Rule rule;
  DerivParams params;
  std::vector<DerivPtr> premises;
};

DerivPtr mk_deriv(Rule r, DerivParams p, std::vector<DerivPtr> premises);

// |D|: number of judgements (nodes).
std::size_t deriv_size(const DerivPtr& d);

struct check_error : std::runtime_error {
  std::vector<int> node_path;  // premise indices from the root
  check_error(const std::string& msg, std::vector<int> path);
};

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

struct NdlalChecked;
using NdlalCheckedPtr = std::shared_ptr<const NdlalChecked>;

struct NdlalChecked {
  DerivPtr node;
  DualContext ctx;
  TermPtr subject;
  TypePtr type;
  std::vector<NdlalCheckedPtr> premises;
};

struct NlalChecked;
using NlalCheckedPtr = std::shared_ptr<const NlalChecked>;

struct NlalChecked {
  DerivPtr node;
  LalContext ctx;
  TermPtr subject;
  TypePtr type;
  std::vector<NlalCheckedPtr> premises;
};

// Checks a DLAL (Fig. 2) script. With strict_root (the default used for
// certificates) a discharged formula surviving to the root is an error;
// derivation-level substitution results legitimately carry them, so the
// internal machinery passes strict_root=false.
NdlalCheckedPtr check_ndlal(const DerivPtr& d, bool strict_root = true);

// Checks a LAL (Fig. 1) script. Discharged formulas may survive to the root
// (the star-translation of a nonlinear context is [Gamma*]_!).
NlalCheckedPtr check_nlal(const DerivPtr& d);

// Branch-max depth. NDLAL: premises of ($ i) plus right premises of (=> e).
// NLAL: (! i) and ($ i) nodes.
std::size_t deriv_depth_ndlal(const DerivPtr& d);
std::size_t deriv_depth_nlal(const DerivPtr& d);

// The subject term, reconstructed from the script alone (no checking).
TermPtr reconstruct_subject(const DerivPtr& d);

// ---------------------------------------------------------------------------
// Operations on checked scripts
// ---------------------------------------------------------------------------

// Proposition 6: an NDLAL script becomes an NLAL script deriving
// [Gamma*]_!, Delta* |- t : A*.
DerivPtr translate_to_lal(const NdlalCheckedPtr& d);

// Lemma 8 (1): type substitution through a script.
DerivPtr deriv_subst_type(const DerivPtr& d, const std::string& alpha, const TypePtr& b);

// Lemma 8 (2): u (from d1) replaces the linear variable x of d2.
DerivPtr deriv_subst_linear(const NdlalCheckedPtr& d1, const std::string& x,
                            const NdlalCheckedPtr& d2);

// Lemma 8 (3): u (from d1, empty nonlinear zone) replaces the discharged
// variable x of d2; `promote` names the part of d1's context that becomes
// nonlinear, the rest is discharged.
DerivPtr deriv_subst_par(const NdlalCheckedPtr& d1, const std::set<std::string>& promote,
                         const std::string& x, const NdlalCheckedPtr& d2);

// Lemma 8 (4): u (from d1, shape ;z:C |- u:A or closed) replaces the
// nonlinear variables xs of d2.
DerivPtr deriv_subst_nonlinear(const NdlalCheckedPtr& d1, const std::vector<std::string>& xs,
                               const NdlalCheckedPtr& d2);

// Lemma 9: returns an equivalent forall-$-normal script (Definition 1).
DerivPtr vs_normalize(const NdlalCheckedPtr& d);

bool is_vs_normal(const DerivPtr& d);

// Theorem 12 replay: a checked script for the reduct of the subject at the
// given beta-redex, with the same judgement.
DerivPtr subject_reduce(const NdlalCheckedPtr& d, const RedexPath& redex);

// Renames a variable free in the root judgement (params and Id leaves).
// fresh must not occur anywhere in the script.
DerivPtr deriv_rename_free(const NdlalCheckedPtr& d, const std::string& old_name,
                           const std::string& fresh);

std::set<std::string> deriv_names(const DerivPtr& d);

// ---------------------------------------------------------------------------
// JSON certificates: {rule, params:{binder?, inst_type?, merged?, ...}, premises:[...]}
// ---------------------------------------------------------------------------

std::string deriv_to_json(const DerivPtr& d);
DerivPtr deriv_from_json_text(const std::string& text, bool lal_types);

}  // namespace dlal

#endif
