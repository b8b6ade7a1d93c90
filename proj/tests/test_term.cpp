#include "dlal/term.hpp"

#include <functional>
#include <random>

#include "doctest.h"

using namespace dlal;

TEST_CASE("parsing the identity") {
  TermPtr t = parse_term("\\x.x");
  CHECK(t->kind == TermKind::Abs);
  CHECK(t->a->kind == TermKind::Var);
  CHECK(t->a->name == "x");
}

TEST_CASE("parsing church two") {
  TermPtr t = parse_term("\\f.\\x.f (f x)");
  CHECK(t->kind == TermKind::Abs);
  CHECK(decode_numeral(t) == 2);
}

TEST_CASE("malformed input is a syntax error") {
  CHECK_THROWS_AS(parse_term("\\x."), parse_error);
  CHECK_THROWS_AS(parse_term("(x"), parse_error);
  CHECK_THROWS_AS(parse_term("x)"), parse_error);
}

TEST_CASE("term sizes") {
  CHECK(term_size(parse_term("x")) == 1);
  CHECK(term_size(parse_term("\\x.x")) == 2);
  CHECK(term_size(parse_term("\\f.\\x.f (f x)")) == 7);
}

TEST_CASE("free occurrence counting") {
  CHECK(free_occurrences("x", parse_term("\\y.x x")) == 2);
  CHECK(free_occurrences("x", parse_term("\\x.x")) == 0);
  CHECK(free_occurrences("f", parse_term("f (f x)")) == 2);
}

TEST_CASE("substitution basics") {
  CHECK(alpha_eq(substitute(parse_term("x"), "x", parse_term("y")), parse_term("y")));
  CHECK(alpha_eq(substitute(parse_term("\\x.x"), "x", parse_term("y")), parse_term("\\x.x")));
}

TEST_CASE("substitution avoids capture") {
  // (\y.x)[y/x] must not capture the substituted y
  TermPtr t = substitute(parse_term("\\y.x"), "x", parse_term("y"));
  CHECK(t->kind == TermKind::Abs);
  CHECK(t->name != "y");
  CHECK(t->a->kind == TermKind::Var);
  CHECK(t->a->name == "y");
  CHECK(alpha_eq(t, mk_abs("z", mk_var("y"))));
}

TEST_CASE("round trip print/parse is alpha-stable") {
  for (const char* src : {"\\x.x", "\\f.\\x.f (f x)", "(\\x.x) y",
                          "\\n.\\m.\\f.\\x.n f (m f x)", "f (\\x.x x) (y z)"}) {
    TermPtr t = parse_term(src);
    CHECK(alpha_eq(t, parse_term(print_term(t))));
  }
}

TEST_CASE("identity reduces in one step") {
  ReductionTrace tr = normalize(parse_term("(\\x.x) y"), Strategy::LeftmostOutermost, 10);
  CHECK(tr.complete);
  CHECK(tr.step_count() == 1);
  CHECK(alpha_eq(tr.final, parse_term("y")));
}

TEST_CASE("add on numerals decodes correctly") {
  TermPtr add = parse_term("\\n.\\m.\\f.\\x.n f (m f x)");
  TermPtr two = parse_term("\\f.\\x.f (f x)");
  TermPtr three = parse_term("\\f.\\x.f (f (f x))");
  TermPtr t = mk_app(mk_app(add, two), three);
  for (Strategy st : {Strategy::LeftmostOutermost, Strategy::RightmostInnermost}) {
    ReductionTrace tr = normalize(t, st, 1000);
    CHECK(tr.complete);
    CHECK(decode_numeral(tr.final) == 5);
  }
  ReductionTrace tr = normalize(t, Strategy::Random, 1000, 42);
  CHECK(tr.complete);
  CHECK(decode_numeral(tr.final) == 5);
}

namespace {
dlal::TermPtr iterate_redex(std::size_t n) {
  // t_n = (\x.y x x)^n z
  dlal::TermPtr t = dlal::mk_var("z");
  for (std::size_t i = 0; i < n; ++i)
    t = dlal::mk_app(dlal::parse_term("\\x.y x x"), t);
  return t;
}
}  // namespace

TEST_CASE("counterexample family blows up exponentially") {
  // |u_n| = 2 |u_{n-1}| + 3 starting from |u_0| = 1
  std::size_t expected = 1;
  for (std::size_t n = 1; n <= 6; ++n) {
    expected = 2 * expected + 3;
    ReductionTrace tr = normalize(iterate_redex(n), Strategy::LeftmostOutermost, 1u << 15);
    CHECK(tr.complete);
    CHECK(term_size(tr.final) == expected);
  }
  // n = 3 gives 29 exactly
  ReductionTrace tr = normalize(iterate_redex(3), Strategy::LeftmostOutermost, 1000);
  CHECK(term_size(tr.final) == 29);
}

TEST_CASE("trace replay reproduces sizes and final term") {
  TermPtr t = mk_app(mk_app(parse_term("\\n.\\m.\\f.\\x.n f (m f x)"),
                            parse_term("\\f.\\x.f (f x)")),
                     parse_term("\\f.\\x.f (f (f x))"));
  for (uint64_t seed : {1u, 2u, 3u}) {
    ReductionTrace tr = normalize(t, Strategy::Random, 1000, seed);
    CHECK(tr.complete);
    CHECK_NOTHROW(replay_trace(tr));
  }
}

TEST_CASE("strategies agree on normal forms at desk scale") {
  TermPtr t = mk_app(mk_app(parse_term("\\n.\\m.\\f.\\x.n f (m f x)"),
                            parse_term("\\f.\\x.f x")),
                     parse_term("\\f.\\x.f (f x)"));
  ReductionTrace lo = normalize(t, Strategy::LeftmostOutermost, 1000);
  ReductionTrace ri = normalize(t, Strategy::RightmostInnermost, 1000);
  ReductionTrace rn = normalize(t, Strategy::Random, 1000, 7);
  CHECK(alpha_eq(lo.final, ri.final));
  CHECK(alpha_eq(lo.final, rn.final));
}

TEST_CASE("substitution leaves no occurrences behind") {
  std::mt19937_64 rng(11);
  // random small terms over {x, y}
  std::function<TermPtr(int)> gen = [&](int depth) -> TermPtr {
    int pick = static_cast<int>(rng() % (depth <= 0 ? 2 : 4));
    switch (pick) {
      case 0: return mk_var("x");
      case 1: return mk_var("y");
      case 2: return mk_abs(rng() % 2 ? "x" : "z", gen(depth - 1));
      default: return mk_app(gen(depth - 1), gen(depth - 1));
    }
  };
  for (int i = 0; i < 200; ++i) {
    TermPtr t = gen(4);
    TermPtr u = gen(3);
    if (free_occurrences("x", u) != 0) continue;
    CHECK(free_occurrences("x", substitute(t, "x", u)) == 0);
  }
}

TEST_CASE("trace json carries the documented fields") {
  ReductionTrace tr = normalize(parse_term("(\\x.x) y"), Strategy::LeftmostOutermost, 10);
  std::string j = trace_to_json(tr);
  CHECK(j.find("\"initial\"") != std::string::npos);
  CHECK(j.find("\"steps\"") != std::string::npos);
  CHECK(j.find("\"final\"") != std::string::npos);
  CHECK(j.find("\"count\"") != std::string::npos);
}

TEST_CASE("path round trip") {
  RedexPath p = {PathStep::Fun, PathStep::Arg, PathStep::Body};
  CHECK(path_from_string(path_to_string(p)) == p);
}
