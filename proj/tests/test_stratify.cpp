#include "dlal/stratify.hpp"

#include "dlal/stdlib.hpp"
#include "doctest.h"

using namespace dlal;

namespace {
NdlalCheckedPtr checked(const NamedProgram& p) { return check_ndlal(p.certificate); }

DerivPtr apply2(const NamedProgram& f, const NamedProgram& a, const NamedProgram& b) {
  DerivPtr fa = mk_deriv(Rule::LinE, {}, {f.certificate, a.certificate});
  return mk_deriv(Rule::LinE, {}, {fa, b.certificate});
}
}  // namespace

TEST_CASE("decorating the identity axiom") {
  DerivParams p;
  p.binder = "x";
  p.inst_type = t_var("a");
  NdlalCheckedPtr c = check_ndlal(mk_deriv(Rule::Id, p, {}), false);
  StratPtr t = decorate(c);
  CHECK(t->kind == TermKind::Var);
  CHECK(strat_depth(t) == 0);
}

TEST_CASE("church 2 decorates with a banged outer and level-1 inner abstraction") {
  StratPtr t = decorate(checked(church(2)));
  REQUIRE(t->kind == TermKind::Abs);
  CHECK(t->depth == 0);
  CHECK(t->banged);
  REQUIRE(t->a->kind == TermKind::Abs);
  CHECK(t->a->depth == 1);
  CHECK(!t->a->banged);
  CHECK(strat_depth(t) == 1);
  CHECK(strat_depth(t) == deriv_depth_ndlal(church(2).certificate));
  CHECK(alpha_eq(erase_annotations(t), church(2).term));
}

TEST_CASE("decoration depth equals derivation depth across the corpus") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    StratPtr t = decorate(c);
    CHECK(strat_depth(t) == deriv_depth_ndlal(p.certificate));
    CHECK(alpha_eq(erase_annotations(t), c->subject));
  }
}

TEST_CASE("depth-0 reduction of a depth-0 redex") {
  StratPtr t = s_app(s_abs("x", 0, false, s_var("x")), s_var("y"));
  auto [r, steps] = reduce_level(t, 0);
  CHECK(steps == 1);
  CHECK(r->kind == TermKind::Var);
  CHECK(r->name == "y");
}

TEST_CASE("reduce_level leaves terms without matching redexes alone") {
  StratPtr t = s_app(s_abs("x", 1, false, s_var("x")), s_var("y"));
  auto [r, steps] = reduce_level(t, 0);
  CHECK(steps == 0);
  CHECK(strat_alpha_eq(r, t));
}

TEST_CASE("forbidden pattern scan") {
  StratPtr clean = decorate(checked(church(2)));
  CHECK(scan_forbidden_patterns(clean).empty());

  StratPtr bad = s_app(s_abs("x", 1, false, s_var("x")), s_abs("y", 0, false, s_var("y")));
  auto hits = scan_forbidden_patterns(bad);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].applied);
  CHECK(hits[0].outer_depth == 1);
  CHECK(hits[0].inner_depth == 0);

  StratPtr bad2 = s_abs("x", 1, false, s_abs("y", 0, false, s_var("y")));
  auto hits2 = scan_forbidden_patterns(bad2);
  REQUIRE(hits2.size() == 1);
  CHECK(!hits2[0].applied);
}

TEST_CASE("level normalization of an already normal numeral") {
  StratPtr two = decorate(checked(church(2)));
  LevelTrace tr = normalize_levels(two);
  CHECK(tr.total_steps == 0);
  CHECK(strat_alpha_eq(tr.final, two));
}

TEST_CASE("add 2 3 normalizes level by level to 5") {
  NamedProgram addp = arithmetic().add;
  DerivPtr app = apply2(addp, church(2), church(3));
  NdlalCheckedPtr c = check_ndlal(app);
  StratifyOptions opts;
  opts.scan_intermediates = true;
  opts.shadow_check = true;
  LevelTrace tr = normalize_levels(decorate(c), opts);
  CHECK(tr.ok);
  CHECK(decode_numeral(erase_annotations(tr.final)) == 5);
  for (const auto& lv : tr.levels) {
    CHECK(lv.steps <= lv.entry_size);
    if (lv.entry_size >= 2) CHECK(lv.exit_size <= lv.entry_size * (lv.entry_size - 1));
  }
}

TEST_CASE("square 3 reaches 9 with the bounds holding") {
  Arithmetic ar = arithmetic();
  DerivPtr app = mk_deriv(Rule::LinE, {}, {ar.square.certificate, church(3).certificate});
  NdlalCheckedPtr c = check_ndlal(app);
  StratPtr t = decorate(c);
  std::size_t d = strat_depth(t);
  std::size_t n = strat_size(t);
  LevelTrace tr = normalize_levels(t);
  CHECK(decode_numeral(erase_annotations(tr.final)) == 9);
  std::size_t total_entries = 0;
  for (const auto& lv : tr.levels) total_entries += lv.entry_size;
  CHECK(within_bound(total_entries, n, d));
  ReductionTrace base = normalize(c->subject, Strategy::LeftmostOutermost, 1u << 20);
  CHECK(alpha_eq(erase_annotations(tr.final), base.final));
}

TEST_CASE("no lower-depth redexes survive a level across the corpus") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    StratPtr t = decorate(c);
    for (std::size_t d = 0; d <= strat_depth(t); ++d) {
      auto [next, steps] = reduce_level(t, d);
      auto low = min_redex_depth(next);
      CHECK((!low || *low > d));
      t = next;
    }
    CHECK(!min_redex_depth(t));
  }
}

TEST_CASE("theorem 13 style strategy independence for decorated programs") {
  for (const auto& p : stdlib_corpus()) {
    if (p.system != CertSystem::Dlal || !p.certificate) continue;
    NdlalCheckedPtr c = check_ndlal(p.certificate);
    StratPtr t = decorate(c);
    std::size_t n = strat_size(t);
    std::size_t d = strat_depth(t);
    LevelTrace lt = normalize_levels(t);
    for (uint64_t seed : {11u, 12u}) {
      ReductionTrace tr = normalize(c->subject, Strategy::Random, 1u << 22, seed);
      CHECK(tr.complete);
      CHECK(within_bound(tr.step_count(), n, d));
      CHECK(alpha_eq(tr.final, erase_annotations(lt.final)));
    }
  }
}

TEST_CASE("within_bound handles overflowing exponents") {
  CHECK(within_bound(1000, 2, 10));
  CHECK(within_bound(16, 2, 2));
  CHECK(!within_bound(17, 2, 2));
  CHECK(within_bound(1, 1, 5));
}

TEST_CASE("level trace serialization") {
  StratPtr two = decorate(checked(church(2)));
  LevelTrace tr = normalize_levels(two);
  std::string j = level_trace_to_json(tr);
  CHECK(j.find("\"levels\"") != std::string::npos);
  std::string csv = level_trace_to_csv(tr);
  CHECK(csv.find("level,entry_size,steps,exit_size") == 0);
}
