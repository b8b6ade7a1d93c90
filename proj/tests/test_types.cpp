#include "dlal/types.hpp"

#include "doctest.h"

using namespace dlal;

namespace {
TypePtr N_lal() {
  // forall a. !(a -o a) -o $(a -o a)
  TypePtr a = t_var("a");
  TypePtr aa = t_lin(a, a);
  return t_forall("a", t_lin(t_ofcourse(aa), t_par(aa)));
}
TypePtr N_dlal() {
  TypePtr a = t_var("a");
  TypePtr aa = t_lin(a, a);
  return t_forall("a", t_bang_arrow(aa, t_par(aa)));
}
}  // namespace

TEST_CASE("star translation commutes on atoms") {
  CHECK(type_alpha_eq(star_translate(t_var("a")), t_var("a")));
}

TEST_CASE("star translation of N") {
  CHECK(type_alpha_eq(star_translate(N_dlal()), N_lal()));
}

TEST_CASE("star translation leaves paragraph types alone") {
  TypePtr t = t_par(t_lin(t_var("a"), t_var("a")));
  CHECK(type_alpha_eq(star_translate(t), t));
}

TEST_CASE("preimage recovery") {
  // !a -o a has preimage a => a
  TypePtr t = t_lin(t_ofcourse(t_var("a")), t_var("a"));
  auto p = in_dlal_star(t);
  REQUIRE(p.has_value());
  CHECK(type_alpha_eq(*p, t_bang_arrow(t_var("a"), t_var("a"))));
}

TEST_CASE("a -o !a has no preimage") {
  CHECK(!in_dlal_star(t_lin(t_var("a"), t_ofcourse(t_var("a")))).has_value());
}

TEST_CASE("doubled bang has no preimage") {
  CHECK(!in_dlal_star(t_lin(t_ofcourse(t_ofcourse(t_var("a"))), t_var("a"))).has_value());
}

TEST_CASE("star is injective: preimage of image is identity") {
  for (const char* src : {"a", "a -o b", "a => b", "$a -o b", "forall a. (a -o a) => $(a -o a)",
                          "(a => b) -o $(b => a)"}) {
    TypePtr t = parse_dlal_type(src);
    auto p = in_dlal_star(star_translate(t));
    REQUIRE(p.has_value());
    CHECK(type_alpha_eq(*p, t));
  }
}

TEST_CASE("erase to simple") {
  CHECK(type_alpha_eq(erase_to_simple(t_par(t_var("a"))), t_var("a")));
  TypePtr t = parse_dlal_type("(a -o a) => $(a -o a)");
  TypePtr want = t_arrow(t_arrow(t_var("a"), t_var("a")), t_arrow(t_var("a"), t_var("a")));
  CHECK(type_alpha_eq(erase_to_simple(t), want));
  CHECK_THROWS_AS(erase_to_simple(t_forall("a", t_var("a"))), invariant_violation);
}

TEST_CASE("forgetful maps commute with star") {
  for (const char* src : {"a -o b", "a => b", "$(a => b) -o a", "(a -o a) => $(a -o a)"}) {
    TypePtr t = parse_dlal_type(src);
    CHECK(type_alpha_eq(erase_to_simple(t), lal_erase_to_simple(star_translate(t))));
  }
}

TEST_CASE("type substitution") {
  CHECK(type_alpha_eq(type_substitute(t_var("a"), "a", parse_dlal_type("b -o b")),
                      parse_dlal_type("b -o b")));
  CHECK(type_alpha_eq(type_substitute(t_forall("a", t_var("a")), "a", t_var("b")),
                      t_forall("a", t_var("a"))));
  // capture avoidance: (forall b. a -o b)[b/a] keeps the bound b distinct
  TypePtr t = type_substitute(t_forall("b", t_lin(t_var("a"), t_var("b"))), "a", t_var("b"));
  CHECK(type_alpha_eq(t, t_forall("c", t_lin(t_var("b"), t_var("c")))));
}

TEST_CASE("substitution preserves star membership") {
  TypePtr a = parse_dlal_type("a => $a");
  TypePtr b = parse_dlal_type("b -o b");
  TypePtr sub = type_substitute(a, "a", b);
  auto p = in_dlal_star(star_translate(sub));
  REQUIRE(p.has_value());
  CHECK(type_alpha_eq(*p, sub));
}

TEST_CASE("type parser round trip") {
  for (const char* src :
       {"a", "a -o b", "a => $b", "forall a. a -o a", "$$$$a", "(a -o b) -o c",
        "forall a. (a -o a) => $(a -o a)"}) {
    TypePtr t = parse_dlal_type(src);
    CHECK(type_alpha_eq(t, parse_dlal_type(print_type(t))));
  }
  for (const char* src : {"!a", "!(a -o a) -o $(a -o a)", "forall a. !!a -o a"}) {
    TypePtr t = parse_lal_type(src);
    CHECK(type_alpha_eq(t, parse_lal_type(print_type(t))));
  }
}

TEST_CASE("dlal parser rejects bang, lal parser rejects double arrow") {
  CHECK_THROWS_AS(parse_dlal_type("!a"), parse_error);
  CHECK_THROWS_AS(parse_lal_type("a => b"), parse_error);
}
