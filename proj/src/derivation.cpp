#include "dlal/derivation.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace dlal {

DerivPtr mk_deriv(Rule r, DerivParams p, std::vector<DerivPtr> premises) {
  return std::make_shared<DerivNode>(DerivNode{r, std::move(p), std::move(premises)});
}

std::size_t deriv_size(const DerivPtr& d) {
  std::size_t n = 1;
  for (const auto& p : d->premises) n += deriv_size(p);
  return n;
}

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::Id: return "Id";
    case Rule::LinI: return "LinI";
    case Rule::LinE: return "LinE";
    case Rule::BangI: return "BangI";
    case Rule::BangE: return "BangE";
    case Rule::Weak: return "Weak";
    case Rule::Cntr: return "Cntr";
    case Rule::ParI: return "ParI";
    case Rule::ParE: return "ParE";
    case Rule::ForallI: return "ForallI";
    case Rule::ForallE: return "ForallE";
    case Rule::LalBangI: return "LalBangI";
    case Rule::LalBangE: return "LalBangE";
  }
  return "?";
}

Rule rule_from_name(const std::string& s) {
  static const std::map<std::string, Rule> m = {
      {"Id", Rule::Id},           {"LinI", Rule::LinI},
      {"LinE", Rule::LinE},       {"BangI", Rule::BangI},
      {"BangE", Rule::BangE},     {"Weak", Rule::Weak},
      {"Cntr", Rule::Cntr},       {"ParI", Rule::ParI},
      {"ParE", Rule::ParE},       {"ForallI", Rule::ForallI},
      {"ForallE", Rule::ForallE}, {"LalBangI", Rule::LalBangI},
      {"LalBangE", Rule::LalBangE}};
  auto it = m.find(s);
  if (it == m.end()) throw parse_error("unknown rule name: " + s, 0);
  return it->second;
}

check_error::check_error(const std::string& msg, std::vector<int> path)
    : std::runtime_error([&] {
        std::string at = "root";
        for (int i : path) at += "." + std::to_string(i);
        return msg + " [node " + at + "]";
      }()),
      node_path(std::move(path)) {}

namespace {

[[noreturn]] void fail(const std::string& msg, const std::vector<int>& path) {
  throw check_error(msg, path);
}

DualContext merge_contexts(const DualContext& c1, const DualContext& c2,
                           const std::vector<int>& path) {
  DualContext out = c1;
  for (const auto& [x, a] : c2.nonlinear) {
    if (out.nonlinear.count(x) || out.linear.count(x))
      fail("context clash on variable " + x, path);
    out.nonlinear[x] = a;
  }
  for (const auto& [x, e] : c2.linear) {
    if (out.nonlinear.count(x) || out.linear.count(x))
      fail("context clash on variable " + x, path);
    out.linear[x] = e;
  }
  return out;
}

NdlalCheckedPtr make_checked(const DerivPtr& node, DualContext ctx, TermPtr subject,
                             TypePtr type, std::vector<NdlalCheckedPtr> premises) {
  return std::make_shared<NdlalChecked>(
      NdlalChecked{node, std::move(ctx), std::move(subject), std::move(type), std::move(premises)});
}

NdlalCheckedPtr check_ndlal_rec(const DerivPtr& d, std::vector<int>& path) {
  std::vector<NdlalCheckedPtr> prem;
  for (std::size_t i = 0; i < d->premises.size(); ++i) {
    path.push_back(static_cast<int>(i));
    prem.push_back(check_ndlal_rec(d->premises[i], path));
    path.pop_back();
  }
  auto arity = [&](std::size_t n) {
    if (d->premises.size() != n)
      fail(rule_name(d->rule) + ": expected " + std::to_string(n) + " premises", path);
  };
  const DerivParams& ps = d->params;

  switch (d->rule) {
    case Rule::Id: {
      arity(0);
      if (!ps.binder || !ps.inst_type) fail("Id: needs binder and type", path);
      if (!is_dlal_type(*ps.inst_type)) fail("Id: not a DLAL type", path);
      DualContext ctx;
      ctx.linear[*ps.binder] = LinearEntry{*ps.inst_type, false};
      return make_checked(d, ctx, mk_var(*ps.binder), *ps.inst_type, {});
    }
    case Rule::LinI: {
      arity(1);
      if (!ps.binder) fail("LinI: needs binder", path);
      const auto& p = prem[0];
      auto it = p->ctx.linear.find(*ps.binder);
      if (it == p->ctx.linear.end()) {
        if (p->ctx.nonlinear.count(*ps.binder))
          fail("LinI: zone violation, " + *ps.binder + " is nonlinear", path);
        fail("LinI: variable " + *ps.binder + " not in linear context", path);
      }
      if (it->second.discharged)
        fail("LinI: cannot abstract the discharged variable " + *ps.binder, path);
      DualContext ctx = p->ctx;
      TypePtr a = it->second.type;
      ctx.linear.erase(*ps.binder);
      return make_checked(d, ctx, mk_abs(*ps.binder, p->subject), t_lin(a, p->type), {prem});
    }
    case Rule::BangI: {
      arity(1);
      if (!ps.binder) fail("BangI: needs binder", path);
      const auto& p = prem[0];
      auto it = p->ctx.nonlinear.find(*ps.binder);
      if (it == p->ctx.nonlinear.end()) {
        if (p->ctx.linear.count(*ps.binder))
          fail("BangI: zone violation, " + *ps.binder + " is linear", path);
        fail("BangI: variable " + *ps.binder + " not in nonlinear context", path);
      }
      DualContext ctx = p->ctx;
      TypePtr a = it->second;
      ctx.nonlinear.erase(*ps.binder);
      return make_checked(d, ctx, mk_abs(*ps.binder, p->subject), t_bang_arrow(a, p->type), {prem});
    }
    case Rule::LinE: {
      arity(2);
      const auto& f = prem[0];
      const auto& a = prem[1];
      if (f->type->kind != TypeKind::Lin)
        fail("LinE: major premise is not a -o type", path);
      if (!type_alpha_eq(f->type->a, a->type))
        fail("LinE: argument type mismatch", path);
      DualContext ctx = merge_contexts(f->ctx, a->ctx, path);
      return make_checked(d, ctx, mk_app(f->subject, a->subject), f->type->b, {prem});
    }
    case Rule::BangE: {
      arity(2);
      const auto& f = prem[0];
      const auto& a = prem[1];
      if (f->type->kind != TypeKind::Bang)
        fail("BangE: major premise is not a => type", path);
      if (!type_alpha_eq(f->type->a, a->type))
        fail("BangE: argument type mismatch", path);
      if (!a->ctx.nonlinear.empty())
        fail("BangE: argument premise has a nonlinear context", path);
      if (a->ctx.linear.size() > 1)
        fail("BangE: argument premise has more than one variable", path);
      DualContext ctx = f->ctx;
      if (!a->ctx.linear.empty()) {
        const auto& [z, e] = *a->ctx.linear.begin();
        if (e.discharged)
          fail("BangE: argument variable " + z + " is discharged", path);
        if (ctx.nonlinear.count(z) || ctx.linear.count(z))
          fail("context clash on variable " + z, path);
        ctx.nonlinear[z] = e.type;  // z becomes nonlinear
      }
      return make_checked(d, ctx, mk_app(f->subject, a->subject), f->type->b, {prem});
    }
    case Rule::Weak: {
      arity(1);
      const auto& p = prem[0];
      DualContext ctx = p->ctx;
      for (const auto& [x, a] : ps.weak_nonlinear) {
        if (ctx.nonlinear.count(x) || ctx.linear.count(x))
          fail("Weak: context clash on " + x, path);
        if (!is_dlal_type(a)) fail("Weak: not a DLAL type", path);
        ctx.nonlinear[x] = a;
      }
      for (const auto& w : ps.weak_linear) {
        if (ctx.nonlinear.count(w.var) || ctx.linear.count(w.var))
          fail("Weak: context clash on " + w.var, path);
        if (!is_dlal_type(w.type)) fail("Weak: not a DLAL type", path);
        if (w.mark == WeakMark::BangDischarged)
          fail("Weak: !-discharged entries do not exist in NDLAL", path);
        ctx.linear[w.var] = LinearEntry{w.type, w.mark == WeakMark::ParDischarged};
      }
      return make_checked(d, ctx, p->subject, p->type, {prem});
    }
    case Rule::Cntr: {
      arity(1);
      if (!ps.merged) fail("Cntr: needs merged triple", path);
      const auto& [x1, x2, x] = *ps.merged;
      const auto& p = prem[0];
      auto i1 = p->ctx.nonlinear.find(x1);
      auto i2 = p->ctx.nonlinear.find(x2);
      if (i1 == p->ctx.nonlinear.end() || i2 == p->ctx.nonlinear.end()) {
        if (p->ctx.linear.count(x1) || p->ctx.linear.count(x2))
          fail("Cntr: zone violation, contraction works on nonlinear variables only", path);
        fail("Cntr: contracted variables not in nonlinear context", path);
      }
      if (x1 == x2) fail("Cntr: contracted variables must be distinct", path);
      if (!type_alpha_eq(i1->second, i2->second))
        fail("Cntr: contracted variables have different types", path);
      DualContext ctx = p->ctx;
      TypePtr a = i1->second;
      ctx.nonlinear.erase(x1);
      ctx.nonlinear.erase(x2);
      if (ctx.nonlinear.count(x) || ctx.linear.count(x))
        fail("Cntr: context clash on " + x, path);
      ctx.nonlinear[x] = a;
      return make_checked(d, ctx, rename_pair(p->subject, x1, x2, x), p->type, {prem});
    }
    case Rule::ParI: {
      arity(1);
      const auto& p = prem[0];
      if (!p->ctx.nonlinear.empty())
        fail("ParI: premise must have an empty nonlinear zone", path);
      for (const auto& [x, e] : p->ctx.linear)
        if (e.discharged)
          fail("ParI: premise contains the discharged variable " + x, path);
      DualContext ctx;
      std::set<std::string> promoted(ps.promoted.begin(), ps.promoted.end());
      for (const auto& x : promoted)
        if (!p->ctx.linear.count(x))
          fail("ParI: promoted variable " + x + " not in premise", path);
      for (const auto& [x, e] : p->ctx.linear) {
        if (promoted.count(x))
          ctx.nonlinear[x] = e.type;
        else
          ctx.linear[x] = LinearEntry{e.type, true};
      }
      return make_checked(d, ctx, p->subject, t_par(p->type), {prem});
    }
    case Rule::ParE: {
      arity(2);
      if (!ps.binder) fail("ParE: needs the substituted variable", path);
      const auto& u = prem[0];
      const auto& t = prem[1];
      if (u->type->kind != TypeKind::Par)
        fail("ParE: major premise is not a $ type", path);
      auto it = t->ctx.linear.find(*ps.binder);
      if (it == t->ctx.linear.end() || !it->second.discharged)
        fail("ParE: " + *ps.binder + " is not a discharged variable of the premise", path);
      if (!type_alpha_eq(it->second.type, u->type->a))
        fail("ParE: discharged type mismatch", path);
      DualContext rest = t->ctx;
      rest.linear.erase(*ps.binder);
      DualContext ctx = merge_contexts(u->ctx, rest, path);
      return make_checked(d, ctx, substitute(t->subject, *ps.binder, u->subject), t->type,
                          {prem});
    }
    case Rule::ForallI: {
      arity(1);
      if (!ps.binder) fail("ForallI: needs a type variable", path);
      const auto& p = prem[0];
      for (const auto& [x, a] : p->ctx.nonlinear)
        if (free_type_vars(a).count(*ps.binder))
          fail("ForallI: eigenvariable " + *ps.binder + " free in context (" + x + ")", path);
      for (const auto& [x, e] : p->ctx.linear)
        if (free_type_vars(e.type).count(*ps.binder))
          fail("ForallI: eigenvariable " + *ps.binder + " free in context (" + x + ")", path);
      return make_checked(d, p->ctx, p->subject, t_forall(*ps.binder, p->type), {prem});
    }
    case Rule::ForallE: {
      arity(1);
      if (!ps.inst_type) fail("ForallE: needs an instantiation type", path);
      if (!is_dlal_type(*ps.inst_type)) fail("ForallE: not a DLAL type", path);
      const auto& p = prem[0];
      if (p->type->kind != TypeKind::Forall)
        fail("ForallE: premise is not a forall type", path);
      return make_checked(d, p->ctx, p->subject,
                          type_substitute(p->type->a, p->type->name, *ps.inst_type), {prem});
    }
    default:
      fail(rule_name(d->rule) + " is not an NDLAL rule", path);
  }
}

}  // namespace

NdlalCheckedPtr check_ndlal(const DerivPtr& d, bool strict_root) {
  std::vector<int> path;
  NdlalCheckedPtr c = check_ndlal_rec(d, path);
  if (strict_root && c->ctx.has_discharged())
    fail("discharged formula in the final judgement", path);
  // Lemma 4: linear variables occur at most once free in the subject.
  for (const auto& [x, e] : c->ctx.linear)
    if (free_occurrences(x, c->subject) > 1)
      fail("Lemma 4 violated: linear variable " + x + " occurs more than once", path);
  for (const auto& x : free_vars(c->subject))
    if (!c->ctx.linear.count(x) && !c->ctx.nonlinear.count(x))
      fail("free variable " + x + " not covered by the context", path);
  return c;
}

// ---------------------------------------------------------------------------
// NLAL checking
// ---------------------------------------------------------------------------

namespace {

NlalCheckedPtr make_lal(const DerivPtr& node, LalContext ctx, TermPtr subject, TypePtr type,
                        std::vector<NlalCheckedPtr> premises) {
  return std::make_shared<NlalChecked>(
      NlalChecked{node, std::move(ctx), std::move(subject), std::move(type), std::move(premises)});
}

LalContext merge_lal(const LalContext& a, const LalContext& b, const std::vector<int>& path) {
  LalContext out = a;
  for (const auto& [x, e] : b.entries) {
    if (out.entries.count(x)) fail("context clash on variable " + x, path);
    out.entries[x] = e;
  }
  return out;
}

NlalCheckedPtr check_nlal_rec(const DerivPtr& d, std::vector<int>& path) {
  std::vector<NlalCheckedPtr> prem;
  for (std::size_t i = 0; i < d->premises.size(); ++i) {
    path.push_back(static_cast<int>(i));
    prem.push_back(check_nlal_rec(d->premises[i], path));
    path.pop_back();
  }
  auto arity = [&](std::size_t n) {
    if (d->premises.size() != n)
      fail(rule_name(d->rule) + ": expected " + std::to_string(n) + " premises", path);
  };
  const DerivParams& ps = d->params;

  switch (d->rule) {
    case Rule::Id: {
      arity(0);
      if (!ps.binder || !ps.inst_type) fail("Id: needs binder and type", path);
      if (!is_lal_type(*ps.inst_type)) fail("Id: not a LAL type", path);
      LalContext ctx;
      ctx.entries[*ps.binder] = LalEntry{*ps.inst_type, LalMark::Proper};
      return make_lal(d, ctx, mk_var(*ps.binder), *ps.inst_type, {});
    }
    case Rule::LinI: {
      arity(1);
      if (!ps.binder) fail("LinI: needs binder", path);
      const auto& p = prem[0];
      auto it = p->ctx.entries.find(*ps.binder);
      if (it == p->ctx.entries.end())
        fail("LinI: variable " + *ps.binder + " not in context", path);
      if (it->second.mark != LalMark::Proper)
        fail("LinI: cannot abstract the discharged variable " + *ps.binder, path);
      LalContext ctx = p->ctx;
      TypePtr a = it->second.type;
      ctx.entries.erase(*ps.binder);
      return make_lal(d, ctx, mk_abs(*ps.binder, p->subject), t_lin(a, p->type), {prem});
    }
    case Rule::LinE: {
      arity(2);
      const auto& f = prem[0];
      const auto& a = prem[1];
      if (f->type->kind != TypeKind::Lin) fail("LinE: major premise is not a -o type", path);
      if (!type_alpha_eq(f->type->a, a->type)) fail("LinE: argument type mismatch", path);
      LalContext ctx = merge_lal(f->ctx, a->ctx, path);
      return make_lal(d, ctx, mk_app(f->subject, a->subject), f->type->b, {prem});
    }
    case Rule::Weak: {
      arity(1);
      const auto& p = prem[0];
      LalContext ctx = p->ctx;
      for (const auto& w : ps.weak_linear) {
        if (ctx.entries.count(w.var)) fail("Weak: context clash on " + w.var, path);
        if (!is_lal_type(w.type)) fail("Weak: not a LAL type", path);
        LalMark m = w.mark == WeakMark::Proper ? LalMark::Proper
                    : w.mark == WeakMark::BangDischarged ? LalMark::BangDischarged
                                                         : LalMark::ParDischarged;
        ctx.entries[w.var] = LalEntry{w.type, m};
      }
      if (!ps.weak_nonlinear.empty()) fail("Weak: NDLAL parameters in an NLAL script", path);
      return make_lal(d, ctx, p->subject, p->type, {prem});
    }
    case Rule::Cntr: {
      arity(1);
      if (!ps.merged) fail("Cntr: needs merged triple", path);
      const auto& [x1, x2, x] = *ps.merged;
      const auto& p = prem[0];
      auto i1 = p->ctx.entries.find(x1);
      auto i2 = p->ctx.entries.find(x2);
      if (i1 == p->ctx.entries.end() || i2 == p->ctx.entries.end())
        fail("Cntr: contracted variables not in context", path);
      if (x1 == x2) fail("Cntr: contracted variables must be distinct", path);
      if (i1->second.mark != LalMark::BangDischarged ||
          i2->second.mark != LalMark::BangDischarged)
        fail("Cntr: contraction works on !-discharged formulas only", path);
      if (!type_alpha_eq(i1->second.type, i2->second.type))
        fail("Cntr: contracted variables have different types", path);
      LalContext ctx = p->ctx;
      TypePtr a = i1->second.type;
      ctx.entries.erase(x1);
      ctx.entries.erase(x2);
      if (ctx.entries.count(x)) fail("Cntr: context clash on " + x, path);
      ctx.entries[x] = LalEntry{a, LalMark::BangDischarged};
      return make_lal(d, ctx, rename_pair(p->subject, x1, x2, x), p->type, {prem});
    }
    case Rule::ParI: {
      arity(1);
      const auto& p = prem[0];
      for (const auto& [x, e] : p->ctx.entries)
        if (e.mark != LalMark::Proper)
          fail("ParI: premise contains the discharged variable " + x, path);
      std::set<std::string> banged(ps.promoted.begin(), ps.promoted.end());
      for (const auto& x : banged)
        if (!p->ctx.entries.count(x)) fail("ParI: promoted variable " + x + " not in premise", path);
      LalContext ctx;
      for (const auto& [x, e] : p->ctx.entries)
        ctx.entries[x] =
            LalEntry{e.type, banged.count(x) ? LalMark::BangDischarged : LalMark::ParDischarged};
      return make_lal(d, ctx, p->subject, t_par(p->type), {prem});
    }
    case Rule::ParE: {
      arity(2);
      if (!ps.binder) fail("ParE: needs the substituted variable", path);
      const auto& u = prem[0];
      const auto& t = prem[1];
      if (u->type->kind != TypeKind::Par) fail("ParE: major premise is not a $ type", path);
      auto it = t->ctx.entries.find(*ps.binder);
      if (it == t->ctx.entries.end() || it->second.mark != LalMark::ParDischarged)
        fail("ParE: " + *ps.binder + " is not a $-discharged variable of the premise", path);
      if (!type_alpha_eq(it->second.type, u->type->a))
        fail("ParE: discharged type mismatch", path);
      LalContext rest = t->ctx;
      rest.entries.erase(*ps.binder);
      LalContext ctx = merge_lal(u->ctx, rest, path);
      return make_lal(d, ctx, substitute(t->subject, *ps.binder, u->subject), t->type, {prem});
    }
    case Rule::LalBangI: {
      arity(1);
      const auto& p = prem[0];
      if (p->ctx.entries.size() > 1)
        fail("(! i): premise has more than one free variable", path);
      LalContext ctx;
      if (!p->ctx.entries.empty()) {
        const auto& [x, e] = *p->ctx.entries.begin();
        if (e.mark != LalMark::Proper)
          fail("(! i): premise variable is discharged", path);
        ctx.entries[x] = LalEntry{e.type, LalMark::BangDischarged};
      }
      return make_lal(d, ctx, p->subject, t_ofcourse(p->type), {prem});
    }
    case Rule::LalBangE: {
      arity(2);
      if (!ps.binder) fail("(! e): needs the substituted variable", path);
      const auto& u = prem[0];
      const auto& t = prem[1];
      if (u->type->kind != TypeKind::OfCourse)
        fail("(! e): major premise is not a ! type", path);
      auto it = t->ctx.entries.find(*ps.binder);
      if (it == t->ctx.entries.end() || it->second.mark != LalMark::BangDischarged)
        fail("(! e): " + *ps.binder + " is not a !-discharged variable of the premise", path);
      if (!type_alpha_eq(it->second.type, u->type->a))
        fail("(! e): discharged type mismatch", path);
      LalContext rest = t->ctx;
      rest.entries.erase(*ps.binder);
      LalContext ctx = merge_lal(u->ctx, rest, path);
      return make_lal(d, ctx, substitute(t->subject, *ps.binder, u->subject), t->type, {prem});
    }
    case Rule::ForallI: {
      arity(1);
      if (!ps.binder) fail("ForallI: needs a type variable", path);
      const auto& p = prem[0];
      for (const auto& [x, e] : p->ctx.entries)
        if (free_type_vars(e.type).count(*ps.binder))
          fail("ForallI: eigenvariable " + *ps.binder + " free in context (" + x + ")", path);
      return make_lal(d, p->ctx, p->subject, t_forall(*ps.binder, p->type), {prem});
    }
    case Rule::ForallE: {
      arity(1);
      if (!ps.inst_type) fail("ForallE: needs an instantiation type", path);
      if (!is_lal_type(*ps.inst_type)) fail("ForallE: not a LAL type", path);
      const auto& p = prem[0];
      if (p->type->kind != TypeKind::Forall)
        fail("ForallE: premise is not a forall type", path);
      return make_lal(d, p->ctx, p->subject,
                      type_substitute(p->type->a, p->type->name, *ps.inst_type), {prem});
    }
    default:
      fail(rule_name(d->rule) + " is not an NLAL rule", path);
  }
}

}  // namespace

NlalCheckedPtr check_nlal(const DerivPtr& d) {
  std::vector<int> path;
  return check_nlal_rec(d, path);
}

std::size_t deriv_depth_ndlal(const DerivPtr& d) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < d->premises.size(); ++i) {
    std::size_t inc = 0;
    if (d->rule == Rule::ParI) inc = 1;
    if (d->rule == Rule::BangE && i == 1) inc = 1;
    best = std::max(best, deriv_depth_ndlal(d->premises[i]) + inc);
  }
  return best;
}

std::size_t deriv_depth_nlal(const DerivPtr& d) {
  std::size_t best = 0;
  for (const auto& p : d->premises) best = std::max(best, deriv_depth_nlal(p));
  if (d->rule == Rule::ParI || d->rule == Rule::LalBangI) best += 1;
  return best;
}

TermPtr reconstruct_subject(const DerivPtr& d) {
  switch (d->rule) {
    case Rule::Id: return mk_var(*d->params.binder);
    case Rule::LinI:
    case Rule::BangI:
      return mk_abs(*d->params.binder, reconstruct_subject(d->premises[0]));
    case Rule::LinE:
    case Rule::BangE:
      return mk_app(reconstruct_subject(d->premises[0]), reconstruct_subject(d->premises[1]));
    case Rule::Weak:
    case Rule::ParI:
    case Rule::ForallI:
    case Rule::ForallE:
    case Rule::LalBangI:
      return reconstruct_subject(d->premises[0]);
    case Rule::Cntr: {
      const auto& [x1, x2, x] = *d->params.merged;
      return rename_pair(reconstruct_subject(d->premises[0]), x1, x2, x);
    }
    case Rule::ParE:
    case Rule::LalBangE:
      return substitute(reconstruct_subject(d->premises[1]), *d->params.binder,
                        reconstruct_subject(d->premises[0]));
  }
  throw invariant_violation("reconstruct_subject: bad rule");
}

std::set<std::string> deriv_names(const DerivPtr& d) {
  std::set<std::string> out;
  std::vector<DerivPtr> stack{d};
  while (!stack.empty()) {
    DerivPtr n = stack.back();
    stack.pop_back();
    if (n->params.binder) out.insert(*n->params.binder);
    if (n->params.merged)
      for (const auto& x : *n->params.merged) out.insert(x);
    for (const auto& x : n->params.promoted) out.insert(x);
    for (const auto& [x, _] : n->params.weak_nonlinear) out.insert(x);
    for (const auto& w : n->params.weak_linear) out.insert(w.var);
    for (const auto& p : n->premises) stack.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proposition 6 translation
// ---------------------------------------------------------------------------

namespace {

DerivPtr translate_rec(const NdlalCheckedPtr& c, std::set<std::string>& used) {
  const DerivPtr& d = c->node;
  const DerivParams& ps = d->params;
  switch (d->rule) {
    case Rule::Id:
      return mk_deriv(Rule::Id,
                      DerivParams{ps.binder, star_translate(*ps.inst_type), {}, {}, {}, {}}, {});
    case Rule::LinI:
      return mk_deriv(Rule::LinI, DerivParams{ps.binder, {}, {}, {}, {}, {}},
                      {translate_rec(c->premises[0], used)});
    case Rule::BangI: {
      // [Gamma*]_!, x:[A*]_! |- t  becomes  (! e) from a fresh x':!A*, then (-o i).
      const std::string& x = *ps.binder;
      TypePtr a_star = star_translate(c->premises[0]->ctx.nonlinear.at(x));
      std::string xp = fresh_name(x, used);
      used.insert(xp);
      DerivPtr axiom = mk_deriv(
          Rule::Id, DerivParams{xp, t_ofcourse(a_star), {}, {}, {}, {}}, {});
      DerivPtr body = translate_rec(c->premises[0], used);
      DerivPtr bang_e =
          mk_deriv(Rule::LalBangE, DerivParams{x, {}, {}, {}, {}, {}}, {axiom, body});
      return mk_deriv(Rule::LinI, DerivParams{xp, {}, {}, {}, {}, {}}, {bang_e});
    }
    case Rule::LinE:
      return mk_deriv(Rule::LinE, {}, {translate_rec(c->premises[0], used),
                                       translate_rec(c->premises[1], used)});
    case Rule::BangE: {
      DerivPtr arg = translate_rec(c->premises[1], used);
      DerivPtr banged = mk_deriv(Rule::LalBangI, {}, {arg});
      return mk_deriv(Rule::LinE, {}, {translate_rec(c->premises[0], used), banged});
    }
    case Rule::Weak: {
      DerivParams np;
      for (const auto& [x, a] : ps.weak_nonlinear)
        np.weak_linear.push_back(WeakEntry{x, star_translate(a), WeakMark::BangDischarged});
      for (const auto& w : ps.weak_linear)
        np.weak_linear.push_back(WeakEntry{w.var, star_translate(w.type), w.mark});
      return mk_deriv(Rule::Weak, np, {translate_rec(c->premises[0], used)});
    }
    case Rule::Cntr:
      return mk_deriv(Rule::Cntr, DerivParams{{}, {}, ps.merged, {}, {}, {}},
                      {translate_rec(c->premises[0], used)});
    case Rule::ParI:
      return mk_deriv(Rule::ParI, DerivParams{{}, {}, {}, ps.promoted, {}, {}},
                      {translate_rec(c->premises[0], used)});
    case Rule::ParE:
      return mk_deriv(Rule::ParE, DerivParams{ps.binder, {}, {}, {}, {}, {}},
                      {translate_rec(c->premises[0], used), translate_rec(c->premises[1], used)});
    case Rule::ForallI:
      return mk_deriv(Rule::ForallI, DerivParams{ps.binder, {}, {}, {}, {}, {}},
                      {translate_rec(c->premises[0], used)});
    case Rule::ForallE:
      return mk_deriv(Rule::ForallE,
                      DerivParams{{}, star_translate(*ps.inst_type), {}, {}, {}, {}},
                      {translate_rec(c->premises[0], used)});
    default:
      throw invariant_violation("translate_to_lal: not an NDLAL rule");
  }
}

}  // namespace

DerivPtr translate_to_lal(const NdlalCheckedPtr& d) {
  std::set<std::string> used = deriv_names(d->node);
  return translate_rec(d, used);
}

// ---------------------------------------------------------------------------
// Lemma 8 (1): type substitution
// ---------------------------------------------------------------------------

DerivPtr deriv_subst_type(const DerivPtr& d, const std::string& alpha, const TypePtr& b) {
  DerivParams ps = d->params;
  if (d->rule == Rule::ForallI && ps.binder) {
    if (*ps.binder == alpha) return d;  // alpha is rebound above this node
    if (free_type_vars(b).count(*ps.binder)) {
      // rename the eigenvariable to avoid capturing atoms of b
      std::set<std::string> avoid = free_type_vars(b);
      avoid.insert(alpha);
      avoid.insert(*ps.binder);
      std::string beta = fresh_name(*ps.binder, avoid);
      DerivPtr renamed = deriv_subst_type(d->premises[0], *ps.binder, t_var(beta));
      ps.binder = beta;
      return mk_deriv(Rule::ForallI, ps, {deriv_subst_type(renamed, alpha, b)});
    }
  }
  if (ps.inst_type) ps.inst_type = type_substitute(*ps.inst_type, alpha, b);
  for (auto& [x, a] : ps.weak_nonlinear) a = type_substitute(a, alpha, b);
  for (auto& w : ps.weak_linear) w.type = type_substitute(w.type, alpha, b);
  std::vector<DerivPtr> prem;
  prem.reserve(d->premises.size());
  for (const auto& p : d->premises) prem.push_back(deriv_subst_type(p, alpha, b));
  return mk_deriv(d->rule, ps, std::move(prem));
}

// ---------------------------------------------------------------------------
// Free-variable renaming inside a checked script
// ---------------------------------------------------------------------------

namespace {

bool ctx_has(const DualContext& ctx, const std::string& x) {
  return ctx.nonlinear.count(x) || ctx.linear.count(x);
}

DerivPtr rename_rec(const NdlalCheckedPtr& c, const std::string& old_name,
                    const std::string& fresh) {
  if (!ctx_has(c->ctx, old_name)) return c->node;
  const DerivPtr& d = c->node;
  DerivParams ps = d->params;
  switch (d->rule) {
    case Rule::Id:
      if (*ps.binder == old_name) ps.binder = fresh;
      return mk_deriv(d->rule, ps, {});
    case Rule::Weak: {
      bool here = false;
      for (auto& [x, a] : ps.weak_nonlinear)
        if (x == old_name) { x = fresh; here = true; }
      for (auto& w : ps.weak_linear)
        if (w.var == old_name) { w.var = fresh; here = true; }
      if (here) return mk_deriv(d->rule, ps, {d->premises[0]});
      return mk_deriv(d->rule, ps, {rename_rec(c->premises[0], old_name, fresh)});
    }
    case Rule::Cntr: {
      auto& [x1, x2, x] = *ps.merged;
      if (x == old_name) {
        x = fresh;
        return mk_deriv(d->rule, ps, {d->premises[0]});
      }
      return mk_deriv(d->rule, ps, {rename_rec(c->premises[0], old_name, fresh)});
    }
    case Rule::ParI: {
      for (auto& x : ps.promoted)
        if (x == old_name) x = fresh;
      return mk_deriv(d->rule, ps, {rename_rec(c->premises[0], old_name, fresh)});
    }
    case Rule::BangE: {
      // the argument's single variable ends up nonlinear in the conclusion
      std::vector<DerivPtr> prem;
      for (const auto& p : c->premises)
        prem.push_back(ctx_has(p->ctx, old_name) ? rename_rec(p, old_name, fresh) : p->node);
      return mk_deriv(d->rule, ps, std::move(prem));
    }
    default: {
      std::vector<DerivPtr> prem;
      for (const auto& p : c->premises)
        prem.push_back(ctx_has(p->ctx, old_name) ? rename_rec(p, old_name, fresh) : p->node);
      return mk_deriv(d->rule, ps, std::move(prem));
    }
  }
}

}  // namespace

DerivPtr deriv_rename_free(const NdlalCheckedPtr& d, const std::string& old_name,
                           const std::string& fresh) {
  return rename_rec(d, old_name, fresh);
}

// ---------------------------------------------------------------------------
// Lemma 8 (2): linear substitution
// ---------------------------------------------------------------------------

namespace {

struct SubstEnv {
  std::set<std::string> avoid;  // clash criterion: the substituted script's names
  std::set<std::string> pool;   // every name already taken anywhere
};

NdlalCheckedPtr recheck(const DerivPtr& d) { return check_ndlal(d, false); }

// Renames the bound/consumed name `who` of node c's premise when it clashes
// with env.avoid; returns the (possibly renamed) premise and exposes the
// final name.
NdlalCheckedPtr rename_premise_if_clash(const NdlalCheckedPtr& premise, std::string& who,
                                        SubstEnv& env) {
  if (!env.avoid.count(who)) return premise;
  std::set<std::string> all = env.avoid;
  all.insert(env.pool.begin(), env.pool.end());
  auto names = deriv_names(premise->node);
  all.insert(names.begin(), names.end());
  std::string nn = fresh_name(who, all);
  env.pool.insert(nn);
  DerivPtr renamed = deriv_rename_free(premise, who, nn);
  who = nn;
  return recheck(renamed);
}

DerivPtr subst_linear_rec(const NdlalCheckedPtr& d1, const std::string& x,
                          const NdlalCheckedPtr& d2, SubstEnv& env) {
  const DerivPtr& node = d2->node;
  DerivParams ps = node->params;
  switch (node->rule) {
    case Rule::Id:
      if (*ps.binder != x)
        throw invariant_violation("subst_linear: lost track of the variable");
      return d1->node;
    case Rule::Weak: {
      for (std::size_t i = 0; i < ps.weak_linear.size(); ++i) {
        if (ps.weak_linear[i].var == x) {
          // x was weakened in: weaken d1's whole context instead
          ps.weak_linear.erase(ps.weak_linear.begin() + i);
          for (const auto& [y, a] : d1->ctx.nonlinear) ps.weak_nonlinear.push_back({y, a});
          for (const auto& [y, e] : d1->ctx.linear)
            ps.weak_linear.push_back(
                WeakEntry{y, e.type, e.discharged ? WeakMark::ParDischarged : WeakMark::Proper});
          return mk_deriv(Rule::Weak, ps, {node->premises[0]});
        }
      }
      return mk_deriv(Rule::Weak, ps, {subst_linear_rec(d1, x, d2->premises[0], env)});
    }
    case Rule::Cntr: {
      auto& m = *ps.merged;
      NdlalCheckedPtr p = d2->premises[0];
      if (env.avoid.count(m[0])) p = rename_premise_if_clash(p, m[0], env);
      if (env.avoid.count(m[1])) p = rename_premise_if_clash(p, m[1], env);
      return mk_deriv(Rule::Cntr, ps, {subst_linear_rec(d1, x, p, env)});
    }
    case Rule::LinI:
    case Rule::BangI: {
      NdlalCheckedPtr p = d2->premises[0];
      std::string b = *ps.binder;
      p = rename_premise_if_clash(p, b, env);
      ps.binder = b;
      return mk_deriv(node->rule, ps, {subst_linear_rec(d1, x, p, env)});
    }
    case Rule::ForallI: {
      // make sure the eigenvariable stays clear of d1's context types
      std::set<std::string> ctx_atoms;
      for (const auto& [_, a] : d1->ctx.nonlinear) {
        auto f = free_type_vars(a);
        ctx_atoms.insert(f.begin(), f.end());
      }
      for (const auto& [_, e] : d1->ctx.linear) {
        auto f = free_type_vars(e.type);
        ctx_atoms.insert(f.begin(), f.end());
      }
      NdlalCheckedPtr p = d2->premises[0];
      if (ctx_atoms.count(*ps.binder)) {
        std::set<std::string> avoid = ctx_atoms;
        auto names = deriv_names(p->node);
        avoid.insert(names.begin(), names.end());
        std::string beta = fresh_name(*ps.binder, avoid);
        p = recheck(deriv_subst_type(p->node, *ps.binder, t_var(beta)));
        ps.binder = beta;
      }
      return mk_deriv(Rule::ForallI, ps, {subst_linear_rec(d1, x, p, env)});
    }
    case Rule::ParE: {
      NdlalCheckedPtr left = d2->premises[0];
      NdlalCheckedPtr right = d2->premises[1];
      std::string w = *ps.binder;
      if (ctx_has(left->ctx, x)) {
        return mk_deriv(Rule::ParE, ps, {subst_linear_rec(d1, x, left, env), right->node});
      }
      right = rename_premise_if_clash(right, w, env);
      ps.binder = w;
      return mk_deriv(Rule::ParE, ps, {left->node, subst_linear_rec(d1, x, right, env)});
    }
    case Rule::LinE:
    case Rule::BangE: {
      NdlalCheckedPtr left = d2->premises[0];
      NdlalCheckedPtr right = d2->premises[1];
      if (ctx_has(left->ctx, x))
        return mk_deriv(node->rule, ps, {subst_linear_rec(d1, x, left, env), right->node});
      return mk_deriv(node->rule, ps, {left->node, subst_linear_rec(d1, x, right, env)});
    }
    case Rule::ForallE:
      return mk_deriv(node->rule, ps, {subst_linear_rec(d1, x, d2->premises[0], env)});
    case Rule::ParI:
      throw invariant_violation("subst_linear: proper variable cannot survive ($ i)");
    default:
      throw invariant_violation("subst_linear: NLAL rule in NDLAL script");
  }
}

SubstEnv make_env(const NdlalCheckedPtr& d1, const NdlalCheckedPtr& d2) {
  SubstEnv env;
  for (const auto& [y, _] : d1->ctx.nonlinear) env.avoid.insert(y);
  for (const auto& [y, _] : d1->ctx.linear) env.avoid.insert(y);
  auto fv = free_vars(d1->subject);
  env.avoid.insert(fv.begin(), fv.end());
  env.pool = deriv_names(d1->node);
  auto more = deriv_names(d2->node);
  env.pool.insert(more.begin(), more.end());
  return env;
}

}  // namespace

DerivPtr deriv_subst_linear(const NdlalCheckedPtr& d1, const std::string& x,
                            const NdlalCheckedPtr& d2) {
  auto it = d2->ctx.linear.find(x);
  if (it == d2->ctx.linear.end() || it->second.discharged)
    throw invariant_violation("subst_linear: x must be a proper linear variable of d2");
  if (!type_alpha_eq(it->second.type, d1->type))
    throw invariant_violation("subst_linear: type mismatch");
  SubstEnv env = make_env(d1, d2);
  return subst_linear_rec(d1, x, d2, env);
}

// ---------------------------------------------------------------------------
// Lemma 8 (3): substitution for a discharged variable
// ---------------------------------------------------------------------------

namespace {

DerivPtr subst_par_rec(const NdlalCheckedPtr& d1, const std::set<std::string>& promote,
                       const std::string& x, const NdlalCheckedPtr& d2, SubstEnv& env) {
  const DerivPtr& node = d2->node;
  DerivParams ps = node->params;
  switch (node->rule) {
    case Rule::Weak: {
      for (std::size_t i = 0; i < ps.weak_linear.size(); ++i) {
        if (ps.weak_linear[i].var == x) {
          ps.weak_linear.erase(ps.weak_linear.begin() + i);
          for (const auto& [y, e] : d1->ctx.linear) {
            if (promote.count(y))
              ps.weak_nonlinear.push_back({y, e.type});
            else
              ps.weak_linear.push_back(WeakEntry{y, e.type, WeakMark::ParDischarged});
          }
          return mk_deriv(Rule::Weak, ps, {node->premises[0]});
        }
      }
      return mk_deriv(Rule::Weak, ps, {subst_par_rec(d1, promote, x, d2->premises[0], env)});
    }
    case Rule::ParI: {
      std::set<std::string> promoted_here(ps.promoted.begin(), ps.promoted.end());
      if (!promoted_here.count(x)) {
        // x is discharged by this ($ i): splice u into the premise via clause (2)
        DerivPtr inner = deriv_subst_linear(d1, x, d2->premises[0]);
        for (const auto& [y, _] : d1->ctx.linear)
          if (promote.count(y)) ps.promoted.push_back(y);
        return mk_deriv(Rule::ParI, ps, {inner});
      }
      throw invariant_violation("subst_par: variable promoted, not discharged, at ($ i)");
    }
    case Rule::Cntr: {
      auto& m = *ps.merged;
      NdlalCheckedPtr p = d2->premises[0];
      if (env.avoid.count(m[0])) p = rename_premise_if_clash(p, m[0], env);
      if (env.avoid.count(m[1])) p = rename_premise_if_clash(p, m[1], env);
      return mk_deriv(Rule::Cntr, ps, {subst_par_rec(d1, promote, x, p, env)});
    }
    case Rule::LinI:
    case Rule::BangI: {
      NdlalCheckedPtr p = d2->premises[0];
      std::string b = *ps.binder;
      p = rename_premise_if_clash(p, b, env);
      ps.binder = b;
      return mk_deriv(node->rule, ps, {subst_par_rec(d1, promote, x, p, env)});
    }
    case Rule::ForallI: {
      std::set<std::string> ctx_atoms;
      for (const auto& [_, e] : d1->ctx.linear) {
        auto f = free_type_vars(e.type);
        ctx_atoms.insert(f.begin(), f.end());
      }
      NdlalCheckedPtr p = d2->premises[0];
      if (ctx_atoms.count(*ps.binder)) {
        std::set<std::string> avoid = ctx_atoms;
        auto names = deriv_names(p->node);
        avoid.insert(names.begin(), names.end());
        std::string beta = fresh_name(*ps.binder, avoid);
        p = recheck(deriv_subst_type(p->node, *ps.binder, t_var(beta)));
        ps.binder = beta;
      }
      return mk_deriv(Rule::ForallI, ps, {subst_par_rec(d1, promote, x, p, env)});
    }
    case Rule::ParE: {
      NdlalCheckedPtr left = d2->premises[0];
      NdlalCheckedPtr right = d2->premises[1];
      std::string w = *ps.binder;
      if (ctx_has(left->ctx, x))
        return mk_deriv(Rule::ParE, ps, {subst_par_rec(d1, promote, x, left, env), right->node});
      right = rename_premise_if_clash(right, w, env);
      ps.binder = w;
      return mk_deriv(Rule::ParE, ps, {left->node, subst_par_rec(d1, promote, x, right, env)});
    }
    case Rule::LinE:
    case Rule::BangE: {
      NdlalCheckedPtr left = d2->premises[0];
      NdlalCheckedPtr right = d2->premises[1];
      if (ctx_has(left->ctx, x))
        return mk_deriv(node->rule, ps, {subst_par_rec(d1, promote, x, left, env), right->node});
      return mk_deriv(node->rule, ps, {left->node, subst_par_rec(d1, promote, x, right, env)});
    }
    case Rule::ForallE:
      return mk_deriv(node->rule, ps, {subst_par_rec(d1, promote, x, d2->premises[0], env)});
    default:
      throw invariant_violation("subst_par: cannot trace the discharged variable");
  }
}

}  // namespace

DerivPtr deriv_subst_par(const NdlalCheckedPtr& d1, const std::set<std::string>& promote,
                         const std::string& x, const NdlalCheckedPtr& d2) {
  auto it = d2->ctx.linear.find(x);
  if (it == d2->ctx.linear.end() || !it->second.discharged)
    throw invariant_violation("subst_par: x must be a discharged variable of d2");
  if (!d1->ctx.nonlinear.empty())
    throw invariant_violation("subst_par: d1 must have an empty nonlinear zone");
  if (!type_alpha_eq(it->second.type, d1->type))
    throw invariant_violation("subst_par: type mismatch");
  SubstEnv env = make_env(d1, d2);
  return subst_par_rec(d1, promote, x, d2, env);
}

// ---------------------------------------------------------------------------
// Lemma 8 (4): substitution for nonlinear variables
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> d1_zvar(const NdlalCheckedPtr& d1) {
  if (d1->ctx.linear.empty()) return std::nullopt;
  return d1->ctx.linear.begin()->first;
}

DerivPtr subst_nonlin_rec(const NdlalCheckedPtr& d1, std::set<std::string> xs,
                          const NdlalCheckedPtr& d2, SubstEnv& env);

// Recurse into one premise carrying all of xs; other premises untouched.
DerivPtr rebuild_one(const NdlalCheckedPtr& d1, const std::set<std::string>& xs,
                     const NdlalCheckedPtr& d2, std::size_t which, SubstEnv& env,
                     DerivParams ps) {
  std::vector<DerivPtr> prem;
  for (std::size_t i = 0; i < d2->premises.size(); ++i)
    prem.push_back(i == which ? subst_nonlin_rec(d1, xs, d2->premises[i], env)
                              : d2->premises[i]->node);
  return mk_deriv(d2->node->rule, ps, std::move(prem));
}

DerivPtr subst_nonlin_rec(const NdlalCheckedPtr& d1, std::set<std::string> xs,
                          const NdlalCheckedPtr& d2, SubstEnv& env) {
  const DerivPtr& node = d2->node;
  DerivParams ps = node->params;
  auto zopt = d1_zvar(d1);

  if (xs.empty()) {
    // weaken z:C in (closed d1 needs nothing)
    if (!zopt) return node;
    DerivParams wp;
    wp.weak_nonlinear.push_back({*zopt, d1->ctx.linear.begin()->second.type});
    return mk_deriv(Rule::Weak, wp, {node});
  }

  switch (node->rule) {
    case Rule::Weak: {
      std::set<std::string> still = xs;
      std::vector<std::pair<std::string, TypePtr>> keep;
      bool removed = false;
      for (const auto& [y, a] : ps.weak_nonlinear) {
        if (xs.count(y)) {
          still.erase(y);
          removed = true;
        } else {
          keep.push_back({y, a});
        }
      }
      if (removed) {
        ps.weak_nonlinear = keep;
        DerivPtr inner = subst_nonlin_rec(d1, still, d2->premises[0], env);
        if (ps.weak_nonlinear.empty() && ps.weak_linear.empty()) return inner;
        return mk_deriv(Rule::Weak, ps, {inner});
      }
      return rebuild_one(d1, xs, d2, 0, env, ps);
    }
    case Rule::Cntr: {
      auto& m = *ps.merged;
      if (xs.count(m[2])) {
        // split the contracted variable back into its two copies
        xs.erase(m[2]);
        NdlalCheckedPtr p = d2->premises[0];
        if (env.avoid.count(m[0])) p = rename_premise_if_clash(p, m[0], env);
        if (env.avoid.count(m[1])) p = rename_premise_if_clash(p, m[1], env);
        std::set<std::string> inner_xs = xs;
        inner_xs.insert(m[0]);
        inner_xs.insert(m[1]);
        DerivPtr inner = subst_nonlin_rec(d1, inner_xs, p, env);
        // the two copies of u brought two copies of z; they were already
        // contracted inside subst_nonlin_rec's premise handling, so the Cntr
        // on m disappears (its variables were substituted away).
        return inner;
      }
      NdlalCheckedPtr p = d2->premises[0];
      if (env.avoid.count(m[0])) p = rename_premise_if_clash(p, m[0], env);
      if (env.avoid.count(m[1])) p = rename_premise_if_clash(p, m[1], env);
      std::vector<DerivPtr> prem{subst_nonlin_rec(d1, xs, p, env)};
      return mk_deriv(Rule::Cntr, ps, std::move(prem));
    }
    case Rule::LinI:
    case Rule::BangI: {
      NdlalCheckedPtr p = d2->premises[0];
      std::string b = *ps.binder;
      p = rename_premise_if_clash(p, b, env);
      ps.binder = b;
      return mk_deriv(node->rule, ps, {subst_nonlin_rec(d1, xs, p, env)});
    }
    case Rule::ForallI: {
      std::set<std::string> ctx_atoms;
      for (const auto& [_, e] : d1->ctx.linear) {
        auto f = free_type_vars(e.type);
        ctx_atoms.insert(f.begin(), f.end());
      }
      NdlalCheckedPtr p = d2->premises[0];
      if (ctx_atoms.count(*ps.binder)) {
        std::set<std::string> avoid = ctx_atoms;
        auto names = deriv_names(p->node);
        avoid.insert(names.begin(), names.end());
        std::string beta = fresh_name(*ps.binder, avoid);
        p = recheck(deriv_subst_type(p->node, *ps.binder, t_var(beta)));
        ps.binder = beta;
      }
      return mk_deriv(Rule::ForallI, ps, {subst_nonlin_rec(d1, xs, p, env)});
    }
    case Rule::ForallE:
      return rebuild_one(d1, xs, d2, 0, env, ps);
    case Rule::ParI: {
      // promoted variables in xs are proper (linear) in the premise:
      // substitute a copy of u for each via clause (2), promote the z copies
      std::set<std::string> promoted(ps.promoted.begin(), ps.promoted.end());
      for (const auto& x : xs)
        if (!promoted.count(x))
          throw invariant_violation("subst_nonlinear: nonlinear variable not promoted at ($ i)");
      NdlalCheckedPtr p = d2->premises[0];
      std::vector<std::string> zs;
      bool first = true;
      for (const auto& x : xs) {
        NdlalCheckedPtr u_copy = d1;
        if (zopt) {
          std::string zi = *zopt;
          if (!first) {
            zi = fresh_name(*zopt, env.pool);
            env.pool.insert(zi);
            env.avoid.insert(zi);
            u_copy = recheck(deriv_rename_free(d1, *zopt, zi));
          }
          zs.push_back(zi);
        }
        p = recheck(deriv_subst_linear(u_copy, x, p));
        promoted.erase(x);
        first = false;
      }
      ps.promoted.assign(promoted.begin(), promoted.end());
      for (const auto& z : zs) ps.promoted.push_back(z);
      DerivPtr out = mk_deriv(Rule::ParI, ps, {p->node});
      for (std::size_t i = 1; i < zs.size(); ++i) {
        DerivParams cp;
        cp.merged = std::array<std::string, 3>{zs[0], zs[i], zs[0]};
        out = mk_deriv(Rule::Cntr, cp, {out});
      }
      return out;
    }
    case Rule::LinE:
    case Rule::ParE:
    case Rule::BangE: {
      // distribute xs over the premises that carry them
      std::set<std::string> xsl, xsr;
      const auto& left = d2->premises[0];
      const auto& right = d2->premises[1];
      for (const auto& x : xs) {
        if (ctx_has(left->ctx, x))
          xsl.insert(x);
        else
          xsr.insert(x);
      }
      if (node->rule == Rule::BangE && !xsr.empty()) {
        // xs in the right premise appear as its single *linear* variable
        if (xsr.size() != 1)
          throw invariant_violation("subst_nonlinear: (=> e) argument has several variables");
        std::string xr = *xsr.begin();
        NdlalCheckedPtr u_copy = d1;
        std::string z2;
        if (zopt && !xsl.empty()) {
          // both sides need u; rename the right copy's z and contract below
          z2 = fresh_name(*zopt, env.pool);
          env.pool.insert(z2);
          env.avoid.insert(z2);
          u_copy = recheck(deriv_rename_free(d1, *zopt, z2));
        }
        DerivPtr right_sub = deriv_subst_linear(u_copy, xr, right);
        DerivPtr left_sub =
            xsl.empty() ? left->node : subst_nonlin_rec(d1, xsl, left, env);
        DerivPtr combined = mk_deriv(node->rule, ps, {left_sub, right_sub});
        if (!z2.empty()) {
          DerivParams cp;
          cp.merged = std::array<std::string, 3>{*zopt, z2, *zopt};
          combined = mk_deriv(Rule::Cntr, cp, {combined});
        }
        return combined;
      }
      if (!xsl.empty() && !xsr.empty()) {
        std::string z2;
        NdlalCheckedPtr d1r = d1;
        if (zopt) {
          z2 = fresh_name(*zopt, env.pool);
          env.pool.insert(z2);
          env.avoid.insert(z2);
          d1r = recheck(deriv_rename_free(d1, *zopt, z2));
        }
        DerivPtr l = subst_nonlin_rec(d1, xsl, left, env);
        DerivPtr r = subst_nonlin_rec(d1r, xsr, right, env);
        DerivPtr combined = mk_deriv(node->rule, ps, {l, r});
        if (zopt) {
          DerivParams cp;
          cp.merged = std::array<std::string, 3>{*zopt, z2, *zopt};
          combined = mk_deriv(Rule::Cntr, cp, {combined});
        }
        return combined;
      }
      if (!xsl.empty()) return rebuild_one(d1, xsl, d2, 0, env, ps);
      return rebuild_one(d1, xsr, d2, 1, env, ps);
    }
    default:
      throw invariant_violation("subst_nonlinear: cannot trace a nonlinear variable through " +
                                rule_name(node->rule));
  }
}

}  // namespace

DerivPtr deriv_subst_nonlinear(const NdlalCheckedPtr& d1, const std::vector<std::string>& xs,
                               const NdlalCheckedPtr& d2) {
  if (!d1->ctx.nonlinear.empty() || d1->ctx.linear.size() > 1)
    throw invariant_violation("subst_nonlinear: d1 must have shape ;z:C |- u:A");
  for (const auto& x : xs) {
    auto it = d2->ctx.nonlinear.find(x);
    if (it == d2->ctx.nonlinear.end())
      throw invariant_violation("subst_nonlinear: " + x + " is not nonlinear in d2");
    if (!type_alpha_eq(it->second, d1->type))
      throw invariant_violation("subst_nonlinear: type mismatch on " + x);
  }
  SubstEnv env = make_env(d1, d2);
  std::set<std::string> xset(xs.begin(), xs.end());
  return subst_nonlin_rec(d1, xset, d2, env);
}

// ---------------------------------------------------------------------------
// Lemma 9: forall-$-normalization
// ---------------------------------------------------------------------------

namespace {

bool is_elim(Rule r) {
  return r == Rule::LinE || r == Rule::BangE || r == Rule::ParE || r == Rule::ForallE;
}

// Index of the major premise of an elimination rule.
std::size_t major_index(Rule) { return 0; }

DerivPtr vs_norm_rec(const NdlalCheckedPtr& c, std::size_t& fuel);

DerivPtr vs_fix_root(DerivPtr d, std::size_t& fuel) {
  for (;;) {
    if (fuel-- == 0) throw invariant_violation("vs_normalize: fuel exhausted");
    if (!is_elim(d->rule)) return d;
    const DerivPtr& major = d->premises[major_index(d->rule)];

    // (forall i);(forall e) collapse via Lemma 8 (1)
    if (d->rule == Rule::ForallE && major->rule == Rule::ForallI) {
      DerivPtr inner = major->premises[0];
      DerivPtr collapsed =
          deriv_subst_type(inner, *major->params.binder, *d->params.inst_type);
      NdlalCheckedPtr cc = check_ndlal(collapsed, false);
      d = vs_norm_rec(cc, fuel);
      continue;
    }
    // ($ i);($ e) collapse via Lemma 8 (3)
    if (d->rule == Rule::ParE && major->rule == Rule::ParI) {
      NdlalCheckedPtr boxc = check_ndlal(major->premises[0], false);
      NdlalCheckedPtr rightc = check_ndlal(d->premises[1], false);
      std::set<std::string> promote(major->params.promoted.begin(),
                                    major->params.promoted.end());
      DerivPtr collapsed = deriv_subst_par(boxc, promote, *d->params.binder, rightc);
      NdlalCheckedPtr cc = check_ndlal(collapsed, false);
      d = vs_norm_rec(cc, fuel);
      continue;
    }
    // permute Weak/Cntr/($ e) below the elimination
    if (major->rule == Rule::Weak || major->rule == Rule::Cntr || major->rule == Rule::ParE) {
      DerivParams rp = major->params;
      Rule rrule = major->rule;
      std::vector<DerivPtr> eprem = d->premises;
      std::set<std::string> other_names;
      for (std::size_t i = 1; i < eprem.size(); ++i) {
        auto ns = deriv_names(eprem[i]);
        other_names.insert(ns.begin(), ns.end());
      }
      if (rrule == Rule::Weak) {
        eprem[0] = major->premises[0];
        DerivPtr inner = mk_deriv(d->rule, d->params, eprem);
        d = mk_deriv(Rule::Weak, rp, {vs_norm_rec(check_ndlal(inner, false), fuel)});
        return d;  // Weak is not an elimination; the caller sees its conclusion
      }
      if (rrule == Rule::Cntr) {
        NdlalCheckedPtr p = check_ndlal(major->premises[0], false);
        auto& m = *rp.merged;
        for (int k = 0; k < 2; ++k) {
          if (other_names.count(m[k])) {
            std::set<std::string> avoid = other_names;
            auto names = deriv_names(p->node);
            avoid.insert(names.begin(), names.end());
            std::string nn = fresh_name(m[k], avoid);
            p = check_ndlal(deriv_rename_free(p, m[k], nn), false);
            m[k] = nn;
          }
        }
        eprem[0] = p->node;
        DerivPtr inner = mk_deriv(d->rule, d->params, eprem);
        d = mk_deriv(Rule::Cntr, rp, {vs_norm_rec(check_ndlal(inner, false), fuel)});
        return d;
      }
      // ($ e) over an elimination's major premise: Figure 6 style rotation
      {
        DerivPtr da = major->premises[0];
        NdlalCheckedPtr db = check_ndlal(major->premises[1], false);
        std::string w = *rp.binder;
        if (other_names.count(w)) {
          std::set<std::string> avoid = other_names;
          auto names = deriv_names(db->node);
          avoid.insert(names.begin(), names.end());
          std::string nn = fresh_name(w, avoid);
          db = check_ndlal(deriv_rename_free(db, w, nn), false);
          w = nn;
          rp.binder = nn;
        }
        eprem[0] = db->node;
        DerivPtr inner = mk_deriv(d->rule, d->params, eprem);
        DerivPtr inner_norm = vs_norm_rec(check_ndlal(inner, false), fuel);
        d = mk_deriv(Rule::ParE, rp, {da, inner_norm});
        continue;  // the new root is ($ e); its own major premise may clash
      }
    }
    return d;
  }
}

DerivPtr vs_norm_rec(const NdlalCheckedPtr& c, std::size_t& fuel) {
  std::vector<DerivPtr> prem;
  bool changed = false;
  for (const auto& p : c->premises) {
    DerivPtr np = vs_norm_rec(p, fuel);
    changed = changed || np != p->node;
    prem.push_back(np);
  }
  DerivPtr d = changed ? mk_deriv(c->node->rule, c->node->params, prem)
                       : c->node;
  return vs_fix_root(d, fuel);
}

bool vs_normal_rec(const DerivPtr& d) {
  for (const auto& p : d->premises)
    if (!vs_normal_rec(p)) return false;
  if (d->rule == Rule::ForallE && d->premises[0]->rule == Rule::ForallI) return false;
  if (d->rule == Rule::ParE && d->premises[0]->rule == Rule::ParI) return false;
  if (is_elim(d->rule)) {
    Rule m = d->premises[major_index(d->rule)]->rule;
    if (m == Rule::Weak || m == Rule::Cntr || m == Rule::ParE) return false;
  }
  return true;
}

}  // namespace

DerivPtr vs_normalize(const NdlalCheckedPtr& d) {
  std::size_t n = deriv_size(d->node);
  std::size_t fuel = 64 + n * n * 8;
  return vs_norm_rec(d, fuel);
}

bool is_vs_normal(const DerivPtr& d) { return vs_normal_rec(d); }

// ---------------------------------------------------------------------------
// Theorem 12 replay
// ---------------------------------------------------------------------------

namespace {

DerivPtr sr_rec(const NdlalCheckedPtr& c, const RedexPath& p, std::size_t i) {
  const DerivPtr& d = c->node;
  switch (d->rule) {
    case Rule::LinE: {
      if (i == p.size()) {
        // the redex is this application; vs-normality gives an introduction
        const NdlalCheckedPtr& fun = c->premises[0];
        if (fun->node->rule != Rule::LinI)
          throw invariant_violation("subject_reduce: major premise is not (-o i)");
        return deriv_subst_linear(c->premises[1], *fun->node->params.binder,
                                  fun->premises[0]);
      }
      if (p[i] == PathStep::Fun)
        return mk_deriv(d->rule, d->params, {sr_rec(c->premises[0], p, i + 1),
                                             c->premises[1]->node});
      if (p[i] == PathStep::Arg)
        return mk_deriv(d->rule, d->params,
                        {c->premises[0]->node, sr_rec(c->premises[1], p, i + 1)});
      throw invariant_violation("subject_reduce: path walks into an application body");
    }
    case Rule::BangE: {
      if (i == p.size()) {
        const NdlalCheckedPtr& fun = c->premises[0];
        if (fun->node->rule != Rule::BangI)
          throw invariant_violation("subject_reduce: major premise is not (=> i)");
        return deriv_subst_nonlinear(c->premises[1], {*fun->node->params.binder},
                                     fun->premises[0]);
      }
      if (p[i] == PathStep::Fun)
        return mk_deriv(d->rule, d->params, {sr_rec(c->premises[0], p, i + 1),
                                             c->premises[1]->node});
      if (p[i] == PathStep::Arg)
        return mk_deriv(d->rule, d->params,
                        {c->premises[0]->node, sr_rec(c->premises[1], p, i + 1)});
      throw invariant_violation("subject_reduce: path walks into an application body");
    }
    case Rule::LinI:
    case Rule::BangI: {
      if (i == p.size() || p[i] != PathStep::Body)
        throw invariant_violation("subject_reduce: path mismatch at an abstraction");
      return mk_deriv(d->rule, d->params, {sr_rec(c->premises[0], p, i + 1)});
    }
    case Rule::ParE: {
      // subject is t[u/w]; decide which side the path lands in
      const std::string& w = *d->params.binder;
      const TermPtr& t = c->premises[1]->subject;
      // locate w in t (at most one occurrence)
      RedexPath wpos;
      bool found = false;
      std::function<bool(const TermPtr&, RedexPath&)> find =
          [&](const TermPtr& s, RedexPath& cur) -> bool {
        switch (s->kind) {
          case TermKind::Var:
            if (s->name == w) {
              wpos = cur;
              return true;
            }
            return false;
          case TermKind::Abs: {
            if (s->name == w) return false;
            cur.push_back(PathStep::Body);
            bool r = find(s->a, cur);
            cur.pop_back();
            return r;
          }
          case TermKind::App: {
            cur.push_back(PathStep::Fun);
            if (find(s->a, cur)) {
              cur.pop_back();
              return true;
            }
            cur.pop_back();
            cur.push_back(PathStep::Arg);
            bool r = find(s->b, cur);
            cur.pop_back();
            return r;
          }
        }
        return false;
      };
      RedexPath scratch;
      found = find(t, scratch);
      RedexPath rest(p.begin() + i, p.end());
      if (found && wpos.size() <= rest.size() &&
          std::equal(wpos.begin(), wpos.end(), rest.begin())) {
        RedexPath inner(rest.begin() + wpos.size(), rest.end());
        DerivPtr nl = sr_rec(c->premises[0], inner, 0);
        return mk_deriv(d->rule, d->params, {nl, c->premises[1]->node});
      }
      DerivPtr nr = sr_rec(c->premises[1], rest, 0);
      return mk_deriv(d->rule, d->params, {c->premises[0]->node, nr});
    }
    case Rule::Weak:
    case Rule::ParI:
    case Rule::ForallI:
    case Rule::ForallE:
      return mk_deriv(d->rule, d->params, {sr_rec(c->premises[0], p, i)});
    case Rule::Cntr: {
      // renaming preserves structure: reuse the same path in the premise
      return mk_deriv(d->rule, d->params, {sr_rec(c->premises[0], p, i)});
    }
    default:
      throw invariant_violation("subject_reduce: path leads into " + rule_name(d->rule));
  }
}

}  // namespace

DerivPtr subject_reduce(const NdlalCheckedPtr& d, const RedexPath& redex) {
  if (!is_redex_at(d->subject, redex))
    throw invariant_violation("subject_reduce: not a redex");
  DerivPtr vs = vs_normalize(d);
  NdlalCheckedPtr vc = check_ndlal(vs, false);
  if (!alpha_eq(vc->subject, d->subject)) {
    // vs-normalization preserves the subject syntactically in our rules
    throw invariant_violation("subject_reduce: normalization changed the subject");
  }
  return sr_rec(vc, redex, 0);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

nlohmann::json deriv_to_json_rec(const DerivPtr& d) {
  nlohmann::json j;
  j["rule"] = rule_name(d->rule);
  nlohmann::json params = nlohmann::json::object();
  const DerivParams& ps = d->params;
  if (ps.binder) params["binder"] = *ps.binder;
  if (ps.inst_type) params["inst_type"] = print_type(*ps.inst_type);
  if (ps.merged) params["merged"] = *ps.merged;
  if (!ps.promoted.empty()) params["promoted"] = ps.promoted;
  if (!ps.weak_nonlinear.empty() || !ps.weak_linear.empty()) {
    nlohmann::json w = nlohmann::json::object();
    if (!ps.weak_nonlinear.empty()) {
      w["nonlinear"] = nlohmann::json::array();
      for (const auto& [x, a] : ps.weak_nonlinear)
        w["nonlinear"].push_back({{"var", x}, {"type", print_type(a)}});
    }
    if (!ps.weak_linear.empty()) {
      w["linear"] = nlohmann::json::array();
      for (const auto& e : ps.weak_linear)
        w["linear"].push_back({{"var", e.var},
                               {"type", print_type(e.type)},
                               {"mark", e.mark == WeakMark::Proper          ? "proper"
                                        : e.mark == WeakMark::ParDischarged ? "par"
                                                                            : "bang"}});
    }
    params["weak"] = w;
  }
  j["params"] = params;
  j["premises"] = nlohmann::json::array();
  for (const auto& p : d->premises) j["premises"].push_back(deriv_to_json_rec(p));
  return j;
}

DerivPtr deriv_from_json_rec(const nlohmann::json& j, bool lal) {
  DerivParams ps;
  Rule r = rule_from_name(j.at("rule").get<std::string>());
  auto parse_ty = [&](const std::string& s) {
    return lal ? parse_lal_type(s) : parse_dlal_type(s);
  };
  if (j.contains("params")) {
    const auto& pj = j["params"];
    if (pj.contains("binder")) ps.binder = pj["binder"].get<std::string>();
    if (pj.contains("inst_type")) ps.inst_type = parse_ty(pj["inst_type"].get<std::string>());
    if (pj.contains("merged")) {
      auto v = pj["merged"].get<std::vector<std::string>>();
      if (v.size() != 3) throw parse_error("merged must have three entries", 0);
      ps.merged = std::array<std::string, 3>{v[0], v[1], v[2]};
    }
    if (pj.contains("promoted")) ps.promoted = pj["promoted"].get<std::vector<std::string>>();
    if (pj.contains("weak")) {
      const auto& w = pj["weak"];
      if (w.contains("nonlinear"))
        for (const auto& e : w["nonlinear"])
          ps.weak_nonlinear.push_back(
              {e.at("var").get<std::string>(), parse_ty(e.at("type").get<std::string>())});
      if (w.contains("linear"))
        for (const auto& e : w["linear"]) {
          std::string m = e.value("mark", "proper");
          ps.weak_linear.push_back(
              WeakEntry{e.at("var").get<std::string>(), parse_ty(e.at("type").get<std::string>()),
                        m == "proper" ? WeakMark::Proper
                        : m == "par"  ? WeakMark::ParDischarged
                                      : WeakMark::BangDischarged});
        }
    }
  }
  std::vector<DerivPtr> prem;
  if (j.contains("premises"))
    for (const auto& pj : j["premises"]) prem.push_back(deriv_from_json_rec(pj, lal));
  return mk_deriv(r, ps, std::move(prem));
}

}  // namespace

std::string deriv_to_json(const DerivPtr& d) { return deriv_to_json_rec(d).dump(); }

DerivPtr deriv_from_json_text(const std::string& text, bool lal_types) {
  nlohmann::json j = nlohmann::json::parse(text);
  return deriv_from_json_rec(j, lal_types);
}

}  // namespace dlal
