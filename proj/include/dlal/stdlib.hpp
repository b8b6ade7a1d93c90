#ifndef DLAL_STDLIB_HPP
#define DLAL_STDLIB_HPP

#include <string>
#include <vector>

#include "dlal/derivation.hpp"
#include "dlal/term.hpp"
#include "dlal/types.hpp"

namespace dlal {

// Programs from the source calculus: Church numerals, arithmetic, coercions,
// the polynomial encoder and the exponential-blowup family, each with a
// checkable certificate.

enum class CertSystem { Dlal, Lal };

struct NamedProgram {
  std::string name;
  TermPtr term;
  DerivPtr certificate;  // null when the program has no certificate
  TypePtr claimed_type;
  CertSystem system = CertSystem::Dlal;
  std::string notes;
};

// N = forall a. (a -o a) => $(a -o a); W takes two step functions.
TypePtr type_N();
TypePtr type_N_body(const TypePtr& atom);
TypePtr type_W();

NamedProgram church(std::size_t n);
NamedProgram succ_program();

struct Arithmetic {
  NamedProgram add;   // N -o N -o N
  NamedProgram mult;  // N => N -o $N
  NamedProgram square;  // N -o $$$$N, the Figure 3 rule sequence expanded
};
Arithmetic arithmetic();

// C_1[t] = (m (\g.\p.g (succ p))) (\n.t) 0; C_2[t] = (\n.t) (m succ 0).
TermPtr coercion_context(int kind, const TermPtr& t, const std::string& n = "n",
                         const std::string& m = "m");

// Derived coercion rules as primitive-rule expansions.
// coerc1: from n:N; Delta |- t:A to ;m:N, $Delta |- C1[t] : $A.
DerivPtr coerc1_expand(const NdlalCheckedPtr& premise, const std::string& n,
                       const std::string& m);
// coerc2: from Gamma; n:$N, Delta |- t:A to Gamma; m:N, Delta |- C2[t] : A.
DerivPtr coerc2_expand(const NdlalCheckedPtr& premise, const std::string& n,
                       const std::string& m);

// mult_p : $^p N -o $^{p+1} N -o $^{p+2} N; add_q : $^q N -o $^q N -o $^q N.
NamedProgram mult_p(std::size_t p);
NamedProgram add_q(std::size_t q);

// t_P for P[X] = aX^(2^k) + b, certified at N -o $^{4k+1} N (k >= 1).
NamedProgram polynomial(std::size_t a, std::size_t b, std::size_t k);

// t_n = (\x.y x x)^n z with its NLAL certificate; no DLAL certificate exists.
NamedProgram counterexample(std::size_t n);

// Binary word \f0.\f1.\x.f_{b1} (f_{b2} (... x)) at W.
NamedProgram word_program(const std::vector<int>& bits);

// The shipped corpus: certified programs plus the counterexample family.
std::vector<NamedProgram> stdlib_corpus();

// Corpus files: <name>.lam with the term, <name>.cert.json with the rest.
void save_corpus(const std::vector<NamedProgram>& programs, const std::string& dir);
std::vector<NamedProgram> load_corpus(const std::string& dir);

}  // namespace dlal

#endif
