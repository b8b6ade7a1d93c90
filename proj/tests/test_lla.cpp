#include "dlal/lla.hpp"

#include <random>

#include "dlal/stdlib.hpp"
#include "dlal/stratify.hpp"
#include "doctest.h"

using namespace dlal;

namespace {
NdlalCheckedPtr checked(const NamedProgram& p) { return check_ndlal(p.certificate); }
}  // namespace

TEST_CASE("lla parsing and printing round trip") {
  for (const char* src : {"x", "\\x.x", "!x", "$x", "let u be !x in x",
                          "let $u be $x in x", "\\f.let f be !g in $(\\x.g (g x))",
                          "f !x", "(let u be !x in x) v"}) {
    LlaPtr t = parse_lla(src);
    CHECK(lla_alpha_eq(t, parse_lla(print_lla(t))));
  }
}

TEST_CASE("paragraph let reduces by substitution") {
  LlaPtr t = parse_lla("let $u be $x in x");
  LlaPtr r = lla_step(t, LlaRule::Par, {});
  CHECK(lla_alpha_eq(r, parse_lla("u")));
}

TEST_CASE("com1 pushes an application under a let") {
  LlaPtr t = parse_lla("(let u be !x in t) v");
  LlaPtr r = lla_step(t, LlaRule::Com1, {});
  CHECK(lla_alpha_eq(r, parse_lla("let u be !x in (t v)")));
}

TEST_CASE("com2 flattens nested lets") {
  LlaPtr t = parse_lla("let (let u be !x in t) be $y in v");
  LlaPtr r = lla_step(t, LlaRule::Com2, {});
  CHECK(lla_alpha_eq(r, parse_lla("let u be !x in (let t be $y in v)")));
}

TEST_CASE("beta on lambda-LA terms") {
  LlaPtr t = parse_lla("(\\x.x) y");
  CHECK(lla_alpha_eq(lla_step(t, LlaRule::Beta, {}), parse_lla("y")));
}

TEST_CASE("erasure clauses") {
  CHECK(alpha_eq(erase(parse_lla("!t")), parse_term("t")));
  CHECK(alpha_eq(erase(parse_lla("$x")), parse_term("x")));
  CHECK(alpha_eq(erase(parse_lla("let y be !x in f x x")), parse_term("f y y")));
  CHECK(alpha_eq(erase(parse_lla("let !y be !x in x")), parse_term("y")));
}

TEST_CASE("saturation performs paragraph steps") {
  auto [r, steps] = saturate(parse_lla("let $y be $x in x"));
  CHECK(steps == 1);
  CHECK(lla_alpha_eq(r, parse_lla("y")));

  auto [r2, steps2] = saturate(parse_lla("\\x.x"));
  CHECK(steps2 == 0);
  CHECK(lla_alpha_eq(r2, parse_lla("\\x.x")));

  LlaPtr t3 = parse_lla("(let !u be !x in x) v");
  auto [r3, steps3] = saturate(t3);
  CHECK(is_scn(r3));
  CHECK(alpha_eq(erase(r3), erase(t3)));
}

TEST_CASE("embedding the identity script") {
  DerivParams p;
  p.binder = "x";
  p.inst_type = t_var("a");
  NdlalCheckedPtr c = check_ndlal(mk_deriv(Rule::Id, p, {}), false);
  LlaPtr t = embed(c);
  CHECK(t->kind == LlaKind::Var);
}

TEST_CASE("embedding church 2 produces the bang abstraction with a paragraph body") {
  NamedProgram two = church(2);
  LlaPtr t = embed(checked(two));
  // \!f.$(\x.f (f x))
  REQUIRE(t->kind == LlaKind::Abs);
  REQUIRE(t->a->kind == LlaKind::LetBang);
  CHECK(t->a->a->kind == LlaKind::Var);  // scrutinee is the bound variable
  CHECK(alpha_eq(erase(t), two.term));
  CHECK(lla_size(t) <= deriv_size(two.certificate));
  CHECK(lla_depth(t) <= deriv_depth_ndlal(two.certificate));
}

TEST_CASE("embedding invariants across the corpus") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    LlaPtr t = embed(c);
    CHECK(alpha_eq(erase(t), c->subject));
    CHECK(lla_size(t) <= deriv_size(p.certificate));
    CHECK(lla_depth(t) <= deriv_depth_ndlal(p.certificate));
    CHECK(is_scn(t));
    CHECK(lemma29_violations(t).empty());
    CHECK(term_size(erase(t)) <= lla_size(t));
  }
}

TEST_CASE("single simulation step on a pure redex") {
  DerivParams ip;
  ip.binder = "x";
  ip.inst_type = t_var("a");
  DerivPtr idx = mk_deriv(Rule::Id, ip, {});
  DerivParams lp;
  lp.binder = "x";
  DerivPtr lam = mk_deriv(Rule::LinI, lp, {idx});
  DerivParams yp;
  yp.binder = "y";
  yp.inst_type = t_var("a");
  DerivPtr app = mk_deriv(Rule::LinE, {}, {lam, mk_deriv(Rule::Id, yp, {})});
  NdlalCheckedPtr c = check_ndlal(app, false);
  LlaPtr t = embed(c);
  auto [r, steps] = simulate_step(t, {});
  CHECK(steps == 1);
  CHECK(alpha_eq(erase(r), parse_term("y")));
}

TEST_CASE("simulation commutes with erasure along full normalization") {
  std::vector<std::pair<std::string, std::size_t>> jobs = {
      {"add_2_3", 5}, {"mult_2_3", 6}, {"square_3", 9}};
  auto corpus = stdlib_corpus();
  for (const auto& [name, expect] : jobs) {
    const NamedProgram* p = nullptr;
    for (const auto& q : corpus)
      if (q.name == name) p = &q;
    REQUIRE(p != nullptr);
    NdlalCheckedPtr c = check_ndlal(p->certificate);
    LlaPtr t = embed(c);
    TermPtr cur = erase(t);
    std::size_t beta_steps = 0, lla_steps = 0;
    while (true) {
      auto rs = redex_paths(cur);
      if (rs.empty()) break;
      auto [next, k] = simulate_step(t, rs.front());
      t = next;
      lla_steps += k;
      cur = beta_step(cur, rs.front());
      ++beta_steps;
      REQUIRE(alpha_eq(erase(t), cur));
      CHECK(is_scn(t));
      CHECK(lemma29_violations(t).empty());
      REQUIRE(beta_steps < 100000);
    }
    CHECK(decode_numeral(cur) == expect);
    CHECK(lla_steps >= beta_steps);
    CHECK(within_bound(lla_steps, deriv_size(p->certificate),
                       deriv_depth_ndlal(p->certificate) + 1));
  }
}

TEST_CASE("simulation follows any reduction strategy") {
  auto corpus = stdlib_corpus();
  const NamedProgram* p = nullptr;
  for (const auto& q : corpus)
    if (q.name == "add_2_3") p = &q;
  REQUIRE(p != nullptr);
  NdlalCheckedPtr c = check_ndlal(p->certificate);
  for (uint64_t seed : {3u, 9u}) {
    LlaPtr t = embed(c);
    TermPtr cur = erase(t);
    std::mt19937_64 rng(seed);
    std::size_t lla_steps = 0, beta_steps = 0;
    while (true) {
      auto rs = redex_paths(cur);
      if (rs.empty()) break;
      const RedexPath& pick = rs[rng() % rs.size()];
      auto [next, k] = simulate_step(t, pick);
      t = next;
      lla_steps += k;
      cur = beta_step(cur, pick);
      ++beta_steps;
      REQUIRE(alpha_eq(erase(t), cur));
    }
    CHECK(decode_numeral(cur) == 5);
    CHECK(lla_steps >= beta_steps);
  }
}

TEST_CASE("written size treats the bang abstraction as one constructor") {
  LlaPtr plain = parse_lla("\\x.x");
  CHECK(lla_size(plain) == 2);
  LlaPtr banged = l_bang_abs("x", l_var("x"));
  CHECK(lla_size(banged) == 2);
  CHECK(lla_size(parse_lla("!x")) == 1);
  CHECK(lla_size(parse_lla("$x")) == 1);
}

TEST_CASE("depth counts modal constructors per branch") {
  CHECK(lla_depth(parse_lla("$!x")) == 2);
  CHECK(lla_depth(parse_lla("(f !x) $y")) == 1);
  CHECK(lla_depth(parse_lla("let u be !x in x")) == 0);
}
