#include "dlal/infer.hpp"

#include <functional>
#include <random>

#include "dlal/stdlib.hpp"
#include "doctest.h"

using namespace dlal;

namespace {
bool contains_type(const std::vector<InferResult>& rs, const TypePtr& t) {
  for (const auto& r : rs)
    if (type_alpha_eq(r.type, t)) return true;
  return false;
}
}  // namespace

TEST_CASE("principal type of the identity") {
  auto pr = principal_simple_type(parse_term("\\x.x"));
  CHECK(type_alpha_eq(pr.type, t_arrow(t_var("a"), t_var("a"))));
}

TEST_CASE("principal type of church two") {
  auto pr = principal_simple_type(parse_term("\\f.\\x.f (f x)"));
  TypePtr aa = t_arrow(t_var("a"), t_var("a"));
  CHECK(type_alpha_eq(pr.type, t_arrow(aa, aa)));
  CHECK(alpha_eq(pr.deriv->subject, parse_term("\\f.\\x.f (f x)")));
}

TEST_CASE("self application has no simple type") {
  CHECK_THROWS_AS(principal_simple_type(parse_term("\\x.x x")), type_error);
}

TEST_CASE("maximal decoration places one parameter per arrow argument") {
  ParamSupply supply;
  ATypePtr atom = maximal_decoration(t_var("a"), supply);
  CHECK(atom->atom);
  CHECK(atom->params.empty());
  CHECK(supply.next == 0);

  ATypePtr arrow = maximal_decoration(t_arrow(t_var("a"), t_var("a")), supply);
  CHECK(supply.next == 1);
  CHECK(arrow->arg->params.size() == 1);

  ParamSupply s2;
  ATypePtr nested = maximal_decoration(
      t_arrow(t_arrow(t_var("a"), t_var("a")), t_var("a")), s2);
  CHECK(s2.next == 2);
  CHECK(nested->arg->params.size() == 1);
  CHECK(nested->arg->arg->params.size() == 1);
}

TEST_CASE("figure 9 unification") {
  ParamSupply supply;
  int a = supply.fresh("a");
  int b = supply.fresh("a");
  ATypePtr left = a_decorate(a_atom("x"), a);
  ATypePtr right = a_decorate(a_atom("x"), b);
  BoolConstraintSet c = unify_abstract(left, right);
  REQUIRE(c.equations.size() == 1);
  CHECK(c.equations[0].first.params == std::vector<int>{a});
  CHECK(c.equations[0].second.params == std::vector<int>{b});

  ATypePtr arrow = a_arrow(a_atom("x"), a_atom("x"));
  CHECK(unify_abstract(a_decorate(arrow, a), a_atom("x")).absurd);

  BoolConstraintSet c2 = unify_abstract(arrow, a_decorate(a_arrow(a_atom("x"), a_atom("x")), b));
  bool found = false;
  for (const auto& [l, r] : c2.equations) {
    if (l.params.empty() && !l.one && r.params == std::vector<int>{b}) found = true;
    if (r.params.empty() && !r.one && l.params == std::vector<int>{b}) found = true;
  }
  CHECK(found);
}

TEST_CASE("merge of decorations unions parameters") {
  ParamSupply supply;
  int a = supply.fresh("a");
  int b = supply.fresh("a");
  ATypePtr m = merge_types(a_decorate(a_atom("x"), a), a_decorate(a_atom("x"), b));
  CHECK(m->params == std::vector<int>{a, b});
  ATypePtr plain = merge_types(a_atom("x"), a_atom("x"));
  CHECK(plain->params.empty());
}

TEST_CASE("constraints of the identity are empty, of church two force a = 1") {
  auto pr1 = principal_simple_type(parse_term("\\x.x"));
  AbstractDeriv ad1 = abstract_derivation(pr1.deriv);
  CHECK(ad1.constraints.equations.empty());

  auto pr2 = principal_simple_type(parse_term("\\f.\\x.f (f x)"));
  AbstractDeriv ad2 = abstract_derivation(pr2.deriv);
  const SimpleDeriv* f_abs = nullptr;
  std::function<void(const SDPtr&)> find = [&](const SDPtr& n) {
    if (!n) return;
    find(n->l);
    find(n->r);
    if (n->kind == SKind::Abs && n->name == "f") f_abs = n.get();
  };
  find(pr2.deriv);
  REQUIRE(f_abs != nullptr);
  int fp = ad2.abs_param.at(f_abs);
  auto sols = enumerate_solutions(ad2.constraints, ad2.supply.next);
  CHECK(!sols.empty());
  for (uint64_t phi : sols) CHECK(((phi >> fp) & 1) == 1);
}

TEST_CASE("enumeration basics") {
  BoolConstraintSet empty;
  auto sols = enumerate_solutions(empty, 1);
  REQUIRE(sols.size() == 2);
  CHECK(sols[0] == 0);
  CHECK(sols[1] == 1);

  BoolConstraintSet forced;
  forced.equations.push_back({Disj{{0}, false}, Disj{{}, true}});
  auto sols2 = enumerate_solutions(forced, 1);
  REQUIRE(sols2.size() == 1);
  CHECK(sols2[0] == 1);

  BoolConstraintSet absurd;
  absurd.equations.push_back({Disj{{}, false}, Disj{{}, true}});
  CHECK(enumerate_solutions(absurd, 1).empty());
}

TEST_CASE("all-ones instantiation always satisfies the constraints") {
  for (const char* src :
       {"\\x.x", "\\f.\\x.f (f x)", "\\n.\\m.\\f.\\x.n f (m f x)", "\\x.\\y.x",
        "\\f.\\g.\\x.f (g x)"}) {
    auto pr = principal_simple_type(parse_term(src));
    AbstractDeriv ad = abstract_derivation(pr.deriv);
    auto sols = enumerate_solutions(ad.constraints, ad.supply.next);
    uint64_t ones = ad.supply.next >= 64 ? ~0ull : (1ull << ad.supply.next) - 1;
    CHECK(std::find(sols.begin(), sols.end(), ones) != sols.end());
    for (std::size_t i = 1; i < sols.size(); ++i)
      CHECK(__builtin_popcountll(sols[i - 1]) <= __builtin_popcountll(sols[i]));
  }
}

TEST_CASE("bang check accepts church two and rejects t_2 by condition (i)") {
  auto pr = principal_simple_type(parse_term("\\f.\\x.f (f x)"));
  AbstractDeriv ad = abstract_derivation(pr.deriv);
  auto sols = enumerate_solutions(ad.constraints, ad.supply.next);
  bool accepted = false;
  for (uint64_t phi : sols)
    if (std::holds_alternative<BangDeriv>(bang_check(ad, phi))) accepted = true;
  CHECK(accepted);

  TermPtr t2 = parse_term("(\\x.y x x) ((\\x.y x x) z)");
  auto pr2 = principal_simple_type(t2);
  AbstractDeriv ad2 = abstract_derivation(pr2.deriv);
  auto sols2 = enumerate_solutions(ad2.constraints, ad2.supply.next);
  CHECK(!sols2.empty());
  for (uint64_t phi : sols2) {
    auto r = bang_check(ad2, phi);
    REQUIRE(std::holds_alternative<BangRejection>(r));
  }
}

TEST_CASE("inference on the identity includes both decorations") {
  auto rs = infer(parse_term("\\x.x"));
  CHECK(contains_type(rs, parse_dlal_type("a -o a")));
  CHECK(contains_type(rs, parse_dlal_type("a => $a")));
  for (const auto& r : rs) CHECK_NOTHROW(check_ndlal(r.script));
}

TEST_CASE("inference recovers the numeral type for church two") {
  auto rs = infer(parse_term("\\f.\\x.f (f x)"));
  CHECK(contains_type(rs, parse_dlal_type("(a -o a) => $(a -o a)")));
  for (const auto& r : rs) {
    NdlalCheckedPtr c = check_ndlal(r.script);
    CHECK(type_alpha_eq(c->type, r.type));
    CHECK(alpha_eq(c->subject, parse_term("\\f.\\x.f (f x)")));
  }
}

TEST_CASE("inference on t_2 and t_3 returns nothing") {
  CHECK(infer(parse_term("(\\x.y x x) ((\\x.y x x) z)")).empty());
  CHECK(infer(parse_term("(\\x.y x x) ((\\x.y x x) ((\\x.y x x) z))")).empty());
}

TEST_CASE("inference recovers the additive type") {
  auto rs = infer(parse_term("\\n.\\m.\\f.\\x.n f (m f x)"));
  TypePtr Na = parse_dlal_type("(a -o a) => $(a -o a)");
  CHECK(contains_type(rs, t_lin(Na, t_lin(Na, Na))));
}

TEST_CASE("inference recovers the multiplicative type") {
  auto rs = infer(parse_term("\\n.\\m.(m (\\k.\\f.\\x.n f (k f x))) (\\f.\\x.x)"));
  TypePtr X = parse_dlal_type("(a -o a) => $(a -o a)");
  TypePtr Y = t_bang_arrow(t_lin(X, X), t_par(t_lin(X, X)));
  CHECK(contains_type(rs, t_bang_arrow(X, t_lin(Y, t_par(X)))));
}

TEST_CASE("every inference result erases to the principal simple type") {
  for (const char* src :
       {"\\x.x", "\\f.\\x.f (f x)", "\\x.\\y.x", "\\f.\\g.\\x.f (g x)", "\\f.\\x.f x"}) {
    TermPtr t = parse_term(src);
    auto pr = principal_simple_type(t);
    for (const auto& r : infer(t)) {
      NdlalCheckedPtr c = check_ndlal(r.script);
      CHECK(alpha_eq(c->subject, t));
      CHECK(type_alpha_eq(erase_to_simple(r.type), pr.type));
    }
  }
}

namespace {
TermPtr random_closed_term(std::mt19937_64& rng, std::size_t max_size) {
  std::function<TermPtr(int, std::vector<std::string>&)> gen =
      [&](int budget, std::vector<std::string>& scope) -> TermPtr {
    if (budget <= 1) {
      if (!scope.empty()) return mk_var(scope[rng() % scope.size()]);
      budget = 3;
    }
    int pick = rng() % 10;
    if (!scope.empty() && pick < 3) return mk_var(scope[rng() % scope.size()]);
    if (pick < 7 || budget < 3) {
      std::string v = "v" + std::to_string(rng() % 6);
      scope.push_back(v);
      TermPtr body = gen(budget - 1, scope);
      scope.pop_back();
      return mk_abs(v, body);
    }
    int lhs = 1 + static_cast<int>(rng() % static_cast<unsigned long>(budget - 2));
    TermPtr f = gen(lhs, scope);
    TermPtr a = gen(budget - lhs - 1, scope);
    return mk_app(f, a);
  };
  std::vector<std::string> scope;
  return gen(static_cast<int>(max_size), scope);
}
}  // namespace

TEST_CASE("soundness over random simply typable terms") {
  std::mt19937_64 rng(20260810);
  InferOptions opts;
  opts.level_cap = 2;
  int typable = 0, tried = 0;
  while (typable < 120 && tried < 4000) {
    ++tried;
    TermPtr t = random_closed_term(rng, 4 + rng() % 22);
    if (term_size(t) > 25) continue;
    PrincipalResult pr;
    try {
      pr = principal_simple_type(t);
    } catch (const type_error&) {
      continue;
    }
    ++typable;
    std::vector<InferResult> rs;
    CHECK_NOTHROW(rs = infer(t, opts));
    for (const auto& r : rs) {
      NdlalCheckedPtr c = check_ndlal(r.script);
      CHECK(alpha_eq(c->subject, t));
      CHECK(type_alpha_eq(c->type, r.type));
      CHECK(type_alpha_eq(erase_to_simple(r.type), pr.type));
    }
  }
  CHECK(typable >= 120);
}
