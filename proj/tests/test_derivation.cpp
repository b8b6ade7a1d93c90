#include "dlal/derivation.hpp"

#include <functional>

#include "dlal/stdlib.hpp"
#include "doctest.h"

using namespace dlal;

namespace {
DerivPtr id_script(const std::string& x, const TypePtr& a) {
  DerivParams p;
  p.binder = x;
  p.inst_type = a;
  return mk_deriv(Rule::Id, p, {});
}
}  // namespace

TEST_CASE("identity axiom checks") {
  DerivPtr d = id_script("x", t_var("a"));
  NdlalCheckedPtr c = check_ndlal(d);
  CHECK(c->ctx.nonlinear.empty());
  CHECK(c->ctx.linear.size() == 1);
  CHECK(alpha_eq(c->subject, mk_var("x")));
  CHECK(type_alpha_eq(c->type, t_var("a")));
}

TEST_CASE("church numeral certificates check at N") {
  for (std::size_t n = 0; n <= 5; ++n) {
    NamedProgram p = church(n);
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    CHECK(type_alpha_eq(c->type, type_N()));
    CHECK(alpha_eq(c->subject, p.term));
    CHECK(c->ctx.nonlinear.empty());
    CHECK(c->ctx.linear.empty());
  }
}

TEST_CASE("church-2 script has depth 1") {
  CHECK(deriv_depth_ndlal(church(2).certificate) == 1);
}

TEST_CASE("abstracting a discharged variable is rejected") {
  DerivParams pi;
  DerivPtr boxed = mk_deriv(Rule::ParI, pi, {id_script("x", t_var("a"))});
  DerivParams li;
  li.binder = "x";
  DerivPtr bad = mk_deriv(Rule::LinI, li, {boxed});
  CHECK_THROWS_AS(check_ndlal(bad), check_error);
}

TEST_CASE("contraction works on the nonlinear zone only") {
  DerivPtr app = mk_deriv(Rule::LinE, {},
                          {id_script("f", t_lin(t_var("a"), t_var("a"))), id_script("x", t_var("a"))});
  DerivParams cp;
  cp.merged = std::array<std::string, 3>{"f", "x", "g"};
  CHECK_THROWS_AS(check_ndlal(mk_deriv(Rule::Cntr, cp, {app}), false), check_error);
}

TEST_CASE("eigenvariable condition on forall introduction") {
  DerivParams fi;
  fi.binder = "a";
  DerivPtr bad = mk_deriv(Rule::ForallI, fi, {id_script("x", t_var("a"))});
  CHECK_THROWS_AS(check_ndlal(bad, false), check_error);
}

TEST_CASE("discharged formulas may not reach a strict root") {
  DerivParams pi;
  DerivPtr boxed = mk_deriv(Rule::ParI, pi, {id_script("x", t_var("a"))});
  CHECK_THROWS_AS(check_ndlal(boxed, true), check_error);
  CHECK_NOTHROW(check_ndlal(boxed, false));
}

TEST_CASE("proposition 5: term size bounded by derivation size") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    CHECK(term_size(c->subject) <= deriv_size(p.certificate));
  }
}

TEST_CASE("lemma 4 on checked scripts") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    for (const auto& [x, e] : c->ctx.linear)
      CHECK(free_occurrences(x, c->subject) <= 1);
  }
}

TEST_CASE("NLAL identity and bang-side conditions") {
  DerivPtr d = id_script("x", t_var("a"));
  NlalCheckedPtr c = check_nlal(d);
  CHECK(type_alpha_eq(c->type, t_var("a")));

  DerivPtr app = mk_deriv(Rule::LinE, {},
                          {id_script("f", t_lin(t_var("a"), t_var("a"))), id_script("x", t_var("a"))});
  CHECK_THROWS_AS(check_nlal(mk_deriv(Rule::LalBangI, {}, {app})), check_error);
  CHECK_NOTHROW(check_nlal(mk_deriv(Rule::LalBangI, {}, {d})));
}

TEST_CASE("counterexample certificate checks in NLAL") {
  for (std::size_t n = 1; n <= 3; ++n) {
    NamedProgram p = counterexample(n);
    NlalCheckedPtr c = check_nlal(p.certificate);
    CHECK(type_alpha_eq(c->type, p.claimed_type));
    CHECK(alpha_eq(c->subject, p.term));
    CHECK(c->ctx.entries.size() == 2);
    CHECK(c->ctx.entries.count("y"));
    CHECK(c->ctx.entries.count("z"));
    CHECK(!c->ctx.has_discharged());
  }
}

TEST_CASE("translation to NLAL checks at the star judgement") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    DerivPtr lal = translate_to_lal(c);
    NlalCheckedPtr lc = check_nlal(lal);
    CHECK(type_alpha_eq(lc->type, star_translate(c->type)));
    CHECK(alpha_eq(lc->subject, c->subject));
  }
}

TEST_CASE("translated identity stays an identity") {
  DerivPtr d = id_script("x", t_var("a"));
  DerivPtr lal = translate_to_lal(check_ndlal(d));
  CHECK(lal->rule == Rule::Id);
}

TEST_CASE("type substitution through a derivation") {
  NamedProgram two = church(2);
  DerivPtr same = deriv_subst_type(two.certificate, "zzz", t_var("zzz"));
  NdlalCheckedPtr c1 = check_ndlal(two.certificate);
  NdlalCheckedPtr c2 = check_ndlal(same);
  CHECK(type_alpha_eq(c1->type, c2->type));

  DerivPtr open_id = id_script("x", t_var("a"));
  DerivPtr subd = deriv_subst_type(open_id, "a", parse_dlal_type("b -o b"));
  NdlalCheckedPtr c3 = check_ndlal(subd);
  CHECK(type_alpha_eq(c3->type, parse_dlal_type("b -o b")));
}

TEST_CASE("linear substitution composes identity premises") {
  NdlalCheckedPtr d1 = check_ndlal(id_script("y", t_var("a")));
  NdlalCheckedPtr d2 = check_ndlal(id_script("x", t_var("a")));
  DerivPtr out = deriv_subst_linear(d1, "x", d2);
  NdlalCheckedPtr c = check_ndlal(out);
  CHECK(alpha_eq(c->subject, mk_var("y")));
  CHECK(deriv_size(out) <= deriv_size(d1->node) + deriv_size(d2->node));
}

TEST_CASE("linear substitution respects the size bound") {
  NamedProgram two = church(2);
  TypePtr N = type_N();
  DerivPtr app = mk_deriv(Rule::LinE, {},
                          {id_script("g", t_lin(N, N)), id_script("x", N)});
  NdlalCheckedPtr d2 = check_ndlal(app, false);
  NdlalCheckedPtr d1 = check_ndlal(two.certificate);
  DerivPtr out = deriv_subst_linear(d1, "x", d2);
  NdlalCheckedPtr c = check_ndlal(out, false);
  CHECK(alpha_eq(c->subject, mk_app(mk_var("g"), two.term)));
  CHECK(deriv_size(out) <= deriv_size(d1->node) + deriv_size(d2->node));
}

TEST_CASE("vs-normalization collapses a forall clash") {
  DerivParams fi;
  fi.binder = "a";
  DerivPtr up = mk_deriv(Rule::ForallI, fi, {id_script("x", t_lin(t_var("b"), t_var("b")))});
  DerivParams fe;
  fe.inst_type = t_var("c");
  DerivPtr clash = mk_deriv(Rule::ForallE, fe, {up});
  NdlalCheckedPtr c = check_ndlal(clash, false);
  DerivPtr norm = vs_normalize(c);
  CHECK(is_vs_normal(norm));
  NdlalCheckedPtr cn = check_ndlal(norm, false);
  CHECK(type_alpha_eq(cn->type, c->type));
  CHECK(alpha_eq(cn->subject, c->subject));
  CHECK(deriv_size(norm) < deriv_size(clash));
}

TEST_CASE("vs-normalization collapses a paragraph clash") {
  DerivPtr boxed = mk_deriv(Rule::ParI, {}, {id_script("u", t_var("a"))});
  DerivPtr discharged = mk_deriv(Rule::ParI, {}, {id_script("x", t_var("a"))});
  DerivParams pe;
  pe.binder = "x";
  DerivPtr clash = mk_deriv(Rule::ParE, pe, {boxed, discharged});
  NdlalCheckedPtr c = check_ndlal(clash, false);
  DerivPtr norm = vs_normalize(c);
  CHECK(is_vs_normal(norm));
  NdlalCheckedPtr cn = check_ndlal(norm, false);
  CHECK(type_alpha_eq(cn->type, c->type));
  CHECK(alpha_eq(cn->subject, c->subject));
}

TEST_CASE("vs-normalization is idempotent and judgement preserving on the corpus") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    DerivPtr n1 = vs_normalize(c);
    CHECK(is_vs_normal(n1));
    NdlalCheckedPtr c1 = check_ndlal(n1, false);
    CHECK(type_alpha_eq(c1->type, c->type));
    CHECK(alpha_eq(c1->subject, c->subject));
    CHECK(c1->ctx.nonlinear.size() == c->ctx.nonlinear.size());
    DerivPtr n2 = vs_normalize(c1);
    NdlalCheckedPtr c2 = check_ndlal(n2, false);
    CHECK(type_alpha_eq(c2->type, c1->type));
    CHECK(deriv_size(n2) == deriv_size(n1));
  }
}

TEST_CASE("abstraction property holds on vs-normal scripts") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    DerivPtr n = vs_normalize(c);
    std::function<void(const NdlalCheckedPtr&)> scan = [&](const NdlalCheckedPtr& node) {
      if (node->subject->kind == TermKind::Abs) {
        Rule r = node->node->rule;
        if (r != Rule::Weak && r != Rule::Cntr && r != Rule::ParE) {
          switch (node->type->kind) {
            case TypeKind::Lin: CHECK(r == Rule::LinI); break;
            case TypeKind::Bang: CHECK(r == Rule::BangI); break;
            case TypeKind::Par: CHECK(r == Rule::ParI); break;
            case TypeKind::Forall: CHECK(r == Rule::ForallI); break;
            default: CHECK(false); break;
          }
        }
      }
      for (const auto& q : node->premises) scan(q);
    };
    scan(check_ndlal(n, false));
  }
}

TEST_CASE("subject reduction replays every single step on the corpus") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    auto redexes = redex_paths(c->subject);
    for (const auto& r : redexes) {
      DerivPtr reduced = subject_reduce(c, r);
      NdlalCheckedPtr rc = check_ndlal(reduced, false);
      CHECK(type_alpha_eq(rc->type, c->type));
      CHECK(alpha_eq(rc->subject, beta_step(c->subject, r)));
      CHECK(rc->ctx.nonlinear.size() == c->ctx.nonlinear.size());
      CHECK(rc->ctx.linear.size() == c->ctx.linear.size());
    }
  }
}

TEST_CASE("subject reduction iterates to the normal form") {
  NamedProgram two = church(2), three = church(3);
  Arithmetic ar = arithmetic();
  DerivPtr app = mk_deriv(Rule::LinE, {},
                          {mk_deriv(Rule::LinE, {}, {ar.add.certificate, two.certificate}),
                           three.certificate});
  NdlalCheckedPtr c = check_ndlal(app);
  std::size_t guard = 0;
  while (true) {
    auto rs = redex_paths(c->subject);
    if (rs.empty()) break;
    DerivPtr next = subject_reduce(c, rs.front());
    c = check_ndlal(next, false);
    REQUIRE(++guard < 200);
  }
  CHECK(decode_numeral(c->subject) == 5);
  CHECK(type_alpha_eq(c->type, type_N()));
}

TEST_CASE("certificate JSON round trip") {
  for (const auto& p : {church(2), arithmetic().add}) {
    std::string j = deriv_to_json(p.certificate);
    DerivPtr back = deriv_from_json_text(j, false);
    NdlalCheckedPtr c1 = check_ndlal(p.certificate);
    NdlalCheckedPtr c2 = check_ndlal(back);
    CHECK(type_alpha_eq(c1->type, c2->type));
    CHECK(alpha_eq(c1->subject, c2->subject));
  }
  NamedProgram t2 = counterexample(2);
  DerivPtr back = deriv_from_json_text(deriv_to_json(t2.certificate), true);
  CHECK(type_alpha_eq(check_nlal(back)->type, t2.claimed_type));
}

TEST_CASE("subject is reconstructible without checking") {
  for (const auto& p : stdlib_corpus()) {
    if (!p.certificate) continue;
    CHECK(alpha_eq(reconstruct_subject(p.certificate), p.term));
  }
}
