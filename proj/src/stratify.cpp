#include "dlal/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace dlal {

StratPtr s_var(std::string name) {
  return std::make_shared<StratTerm>(StratTerm{TermKind::Var, std::move(name), 0, false, nullptr, nullptr});
}
StratPtr s_abs(std::string binder, std::size_t depth, bool banged, StratPtr body) {
  return std::make_shared<StratTerm>(
      StratTerm{TermKind::Abs, std::move(binder), depth, banged, std::move(body), nullptr});
}
StratPtr s_app(StratPtr fun, StratPtr arg) {
  return std::make_shared<StratTerm>(
      StratTerm{TermKind::App, {}, 0, false, std::move(fun), std::move(arg)});
}

std::size_t strat_size(const StratPtr& t) {
  switch (t->kind) {
    case TermKind::Var: return 1;
    case TermKind::Abs: return strat_size(t->a) + 1;
    case TermKind::App: return strat_size(t->a) + strat_size(t->b) + 1;
  }
  return 0;
}

std::size_t strat_depth(const StratPtr& t) {
  switch (t->kind) {
    case TermKind::Var: return 0;
    case TermKind::Abs: return std::max(t->depth, strat_depth(t->a));
    case TermKind::App: return std::max(strat_depth(t->a), strat_depth(t->b));
  }
  return 0;
}

TermPtr erase_annotations(const StratPtr& t) {
  switch (t->kind) {
    case TermKind::Var: return mk_var(t->name);
    case TermKind::Abs: return mk_abs(t->name, erase_annotations(t->a));
    case TermKind::App: return mk_app(erase_annotations(t->a), erase_annotations(t->b));
  }
  return nullptr;
}

StratPtr shift_depths(const StratPtr& t, std::size_t delta) {
  switch (t->kind) {
    case TermKind::Var: return t;
    case TermKind::Abs:
      return s_abs(t->name, t->depth + delta, t->banged, shift_depths(t->a, delta));
    case TermKind::App:
      return s_app(shift_depths(t->a, delta), shift_depths(t->b, delta));
  }
  return t;
}

namespace {
bool strat_eq_rec(const StratPtr& s, const StratPtr& t, std::map<std::string, int>& ls,
                  std::map<std::string, int>& lt, int depth) {
  if (s->kind != t->kind) return false;
  switch (s->kind) {
    case TermKind::Var: {
      auto is = ls.find(s->name);
      auto it = lt.find(t->name);
      if ((is == ls.end()) != (it == lt.end())) return false;
      if (is == ls.end()) return s->name == t->name;
      return is->second == it->second;
    }
    case TermKind::Abs: {
      if (s->depth != t->depth || s->banged != t->banged) return false;
      auto olds = ls.count(s->name) ? std::optional<int>(ls[s->name]) : std::nullopt;
      auto oldt = lt.count(t->name) ? std::optional<int>(lt[t->name]) : std::nullopt;
      ls[s->name] = depth;
      lt[t->name] = depth;
      bool r = strat_eq_rec(s->a, t->a, ls, lt, depth + 1);
      if (olds) ls[s->name] = *olds; else ls.erase(s->name);
      if (oldt) lt[t->name] = *oldt; else lt.erase(t->name);
      return r;
    }
    case TermKind::App:
      return strat_eq_rec(s->a, t->a, ls, lt, depth) && strat_eq_rec(s->b, t->b, ls, lt, depth);
  }
  return false;
}

std::set<std::string> strat_free_vars(const StratPtr& t) {
  return free_vars(erase_annotations(t));
}
}  // namespace

bool strat_alpha_eq(const StratPtr& s, const StratPtr& t) {
  std::map<std::string, int> ls, lt;
  return strat_eq_rec(s, t, ls, lt, 0);
}

std::string print_strat(const StratPtr& t) {
  std::ostringstream os;
  std::function<void(const StratPtr&, bool, bool)> rec = [&](const StratPtr& s, bool fun_pos,
                                                             bool arg_pos) {
    switch (s->kind) {
      case TermKind::Var: os << s->name; return;
      case TermKind::Abs: {
        bool parens = fun_pos || arg_pos;
        if (parens) os << '(';
        os << '\\' << '^' << s->depth << (s->banged ? "!" : "") << s->name << '.';
        rec(s->a, false, false);
        if (parens) os << ')';
        return;
      }
      case TermKind::App: {
        if (arg_pos) os << '(';
        rec(s->a, true, false);
        os << ' ';
        rec(s->b, false, true);
        if (arg_pos) os << ')';
        return;
      }
    }
  };
  rec(t, false, false);
  return os.str();
}

StratPtr strat_substitute(const StratPtr& t, const std::string& x, const StratPtr& u) {
  switch (t->kind) {
    case TermKind::Var:
      return t->name == x ? u : t;
    case TermKind::Abs: {
      if (t->name == x) return t;
      if (!strat_free_vars(t->a).count(x)) return t;
      if (strat_free_vars(u).count(t->name)) {
        std::set<std::string> avoid = strat_free_vars(u);
        auto fv = strat_free_vars(t->a);
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(x);
        std::string y = fresh_name(t->name, avoid);
        StratPtr body = strat_substitute(t->a, t->name, s_var(y));
        return s_abs(y, t->depth, t->banged, strat_substitute(body, x, u));
      }
      return s_abs(t->name, t->depth, t->banged, strat_substitute(t->a, x, u));
    }
    case TermKind::App:
      return s_app(strat_substitute(t->a, x, u), strat_substitute(t->b, x, u));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Lemma 14 decoration
// ---------------------------------------------------------------------------

namespace {
StratPtr decorate_rec(const NdlalCheckedPtr& c) {
  const DerivPtr& d = c->node;
  switch (d->rule) {
    case Rule::Id:
      return s_var(*d->params.binder);
    case Rule::LinI:
      return s_abs(*d->params.binder, 0, false, decorate_rec(c->premises[0]));
    case Rule::BangI:
      return s_abs(*d->params.binder, 0, true, decorate_rec(c->premises[0]));
    case Rule::LinE:
      return s_app(decorate_rec(c->premises[0]), decorate_rec(c->premises[1]));
    case Rule::BangE:
      return s_app(decorate_rec(c->premises[0]), shift_depths(decorate_rec(c->premises[1]), 1));
    case Rule::Weak:
    case Rule::ForallI:
    case Rule::ForallE:
      return decorate_rec(c->premises[0]);
    case Rule::ParI:
      return shift_depths(decorate_rec(c->premises[0]), 1);
    case Rule::Cntr: {
      const auto& [x1, x2, x] = *d->params.merged;
      StratPtr p = decorate_rec(c->premises[0]);
      return strat_substitute(strat_substitute(p, x1, s_var(x)), x2, s_var(x));
    }
    case Rule::ParE:
      return strat_substitute(decorate_rec(c->premises[1]), *d->params.binder,
                              decorate_rec(c->premises[0]));
    default:
      throw invariant_violation("decorate: not an NDLAL rule");
  }
}
}  // namespace

StratPtr decorate(const NdlalCheckedPtr& d) {
  StratPtr t = decorate_rec(d);
  if (!alpha_eq(erase_annotations(t), d->subject))
    throw invariant_violation("decorate: erasure does not match the subject");
  return t;
}

// ---------------------------------------------------------------------------
// Level-by-level reduction
// ---------------------------------------------------------------------------

namespace {
void collect_redexes_at(const StratPtr& t, std::size_t d, RedexPath& cur,
                        std::vector<RedexPath>& out, bool any_depth) {
  switch (t->kind) {
    case TermKind::Var: return;
    case TermKind::Abs:
      cur.push_back(PathStep::Body);
      collect_redexes_at(t->a, d, cur, out, any_depth);
      cur.pop_back();
      return;
    case TermKind::App:
      if (t->a->kind == TermKind::Abs && (any_depth || t->a->depth == d)) out.push_back(cur);
      cur.push_back(PathStep::Fun);
      collect_redexes_at(t->a, d, cur, out, any_depth);
      cur.pop_back();
      cur.push_back(PathStep::Arg);
      collect_redexes_at(t->b, d, cur, out, any_depth);
      cur.pop_back();
      return;
  }
}

StratPtr strat_subterm(const StratPtr& t, const RedexPath& p, std::size_t i) {
  if (i == p.size()) return t;
  switch (p[i]) {
    case PathStep::Fun: return strat_subterm(t->a, p, i + 1);
    case PathStep::Arg: return strat_subterm(t->b, p, i + 1);
    case PathStep::Body: return strat_subterm(t->a, p, i + 1);
  }
  return t;
}

StratPtr strat_rebuild(const StratPtr& t, const RedexPath& p, std::size_t i, const StratPtr& sub) {
  if (i == p.size()) return sub;
  switch (p[i]) {
    case PathStep::Fun: return s_app(strat_rebuild(t->a, p, i + 1, sub), t->b);
    case PathStep::Arg: return s_app(t->a, strat_rebuild(t->b, p, i + 1, sub));
    case PathStep::Body:
      return s_abs(t->name, t->depth, t->banged, strat_rebuild(t->a, p, i + 1, sub));
  }
  return sub;
}

void scan_rec(const StratPtr& t, RedexPath& cur, std::vector<ForbiddenPattern>& out) {
  switch (t->kind) {
    case TermKind::Var: return;
    case TermKind::Abs:
      if (t->a->kind == TermKind::Abs && t->a->depth < t->depth)
        out.push_back(ForbiddenPattern{cur, t->depth, t->a->depth, false});
      cur.push_back(PathStep::Body);
      scan_rec(t->a, cur, out);
      cur.pop_back();
      return;
    case TermKind::App:
      if (t->a->kind == TermKind::Abs && t->b->kind == TermKind::Abs &&
          t->b->depth < t->a->depth)
        out.push_back(ForbiddenPattern{cur, t->a->depth, t->b->depth, true});
      cur.push_back(PathStep::Fun);
      scan_rec(t->a, cur, out);
      cur.pop_back();
      cur.push_back(PathStep::Arg);
      scan_rec(t->b, cur, out);
      cur.pop_back();
      return;
  }
}

// --- Appendix F explicit-substitution shadow -------------------------------

enum class XKind { Var, Abs, App, Sub };

struct XTerm;
using XPtr = std::shared_ptr<const XTerm>;

struct XTerm {
  XKind kind;
  std::string name;       // Var / Abs binder / Sub variable
  std::size_t depth = 0;  // Abs
  bool banged = false;
  XPtr a;  // Abs body / App fun / Sub body
  XPtr b;  // App arg / Sub substituend
};

XPtr x_of(const StratPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
      return std::make_shared<XTerm>(XTerm{XKind::Var, t->name, 0, false, nullptr, nullptr});
    case TermKind::Abs:
      return std::make_shared<XTerm>(
          XTerm{XKind::Abs, t->name, t->depth, t->banged, x_of(t->a), nullptr});
    case TermKind::App:
      return std::make_shared<XTerm>(
          XTerm{XKind::App, {}, 0, false, x_of(t->a), x_of(t->b)});
  }
  return nullptr;
}

std::size_t x_size(const XPtr& t) {
  switch (t->kind) {
    case XKind::Var: return 1;
    case XKind::Abs: return x_size(t->a) + 1;
    case XKind::App:
    case XKind::Sub: return x_size(t->a) + x_size(t->b) + 1;
  }
  return 0;
}

StratPtr x_erase(const XPtr& t) {
  switch (t->kind) {
    case XKind::Var: return s_var(t->name);
    case XKind::Abs: return s_abs(t->name, t->depth, t->banged, x_erase(t->a));
    case XKind::App: return s_app(x_erase(t->a), x_erase(t->b));
    case XKind::Sub: return strat_substitute(x_erase(t->a), t->name, x_erase(t->b));
  }
  return nullptr;
}

std::set<std::string> x_free_vars(const XPtr& t) {
  return free_vars(erase_annotations(x_erase(t)));
}

// Capture-avoiding structural substitution on x-terms (rule 2 of the
// simulation: performing an explicit substitution for real).
XPtr x_substitute(const XPtr& t, const std::string& x, const XPtr& u) {
  switch (t->kind) {
    case XKind::Var:
      return t->name == x ? u : t;
    case XKind::Abs: {
      if (t->name == x) return t;
      if (!x_free_vars(t->a).count(x)) return t;
      std::string binder = t->name;
      XPtr body = t->a;
      if (x_free_vars(u).count(binder)) {
        std::set<std::string> avoid = x_free_vars(u);
        auto fv = x_free_vars(body);
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(x);
        binder = fresh_name(binder, avoid);
        XPtr vb = std::make_shared<XTerm>(XTerm{XKind::Var, binder, 0, false, nullptr, nullptr});
        body = x_substitute(body, t->name, vb);
      }
      return std::make_shared<XTerm>(
          XTerm{XKind::Abs, binder, t->depth, t->banged, x_substitute(body, x, u), nullptr});
    }
    case XKind::App:
      return std::make_shared<XTerm>(
          XTerm{XKind::App, {}, 0, false, x_substitute(t->a, x, u), x_substitute(t->b, x, u)});
    case XKind::Sub: {
      XPtr arg = x_substitute(t->b, x, u);
      if (t->name == x)
        return std::make_shared<XTerm>(XTerm{XKind::Sub, t->name, 0, false, t->a, arg});
      std::string binder = t->name;
      XPtr body = t->a;
      if (x_free_vars(body).count(x) && x_free_vars(u).count(binder)) {
        std::set<std::string> avoid = x_free_vars(u);
        auto fv = x_free_vars(body);
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(x);
        binder = fresh_name(binder, avoid);
        XPtr vb = std::make_shared<XTerm>(XTerm{XKind::Var, binder, 0, false, nullptr, nullptr});
        body = x_substitute(body, t->name, vb);
      }
      return std::make_shared<XTerm>(
          XTerm{XKind::Sub, binder, 0, false, x_substitute(body, x, u), arg});
    }
  }
  return t;
}

// Fires the beta redex addressed by `p` in the erasure of `t`, keeping the
// substitution explicit: (\x.t)theta u -> (t theta){u/x}.
XPtr x_fire(const XPtr& t, const RedexPath& p, std::size_t i, bool& ok);

XPtr x_fire_app(const XPtr& app, bool& ok) {
  // peel explicit substitutions off the function side
  std::vector<XPtr> subs;
  XPtr f = app->a;
  while (f->kind == XKind::Sub) {
    subs.push_back(f);
    f = f->a;
  }
  if (f->kind != XKind::Abs) {
    ok = false;
    return app;
  }
  XPtr body = f->a;
  for (auto it = subs.rbegin(); it != subs.rend(); ++it)
    body = std::make_shared<XTerm>(XTerm{XKind::Sub, (*it)->name, 0, false, body, (*it)->b});
  return std::make_shared<XTerm>(XTerm{XKind::Sub, f->name, 0, false, body, app->b});
}

XPtr x_fire(const XPtr& t, const RedexPath& p, std::size_t i, bool& ok) {
  if (!ok) return t;
  switch (t->kind) {
    case XKind::Var:
      ok = false;
      return t;
    case XKind::Abs: {
      if (i == p.size() || p[i] != PathStep::Body) {
        ok = false;
        return t;
      }
      XPtr body = x_fire(t->a, p, i + 1, ok);
      return std::make_shared<XTerm>(XTerm{XKind::Abs, t->name, t->depth, t->banged, body, nullptr});
    }
    case XKind::App: {
      if (i == p.size()) return x_fire_app(t, ok);
      if (p[i] == PathStep::Fun) {
        XPtr f = x_fire(t->a, p, i + 1, ok);
        return std::make_shared<XTerm>(XTerm{XKind::App, {}, 0, false, f, t->b});
      }
      if (p[i] == PathStep::Arg) {
        XPtr a = x_fire(t->b, p, i + 1, ok);
        return std::make_shared<XTerm>(XTerm{XKind::App, {}, 0, false, t->a, a});
      }
      ok = false;
      return t;
    }
    case XKind::Sub: {
      // erasure is body^-[arg^-/x]: walk the body's erasure along the path;
      // reaching the free occurrence of x means the path continues inside
      // the substituend
      StratPtr body_erased = x_erase(t->a);
      StratPtr cur = body_erased;
      std::size_t k = i;
      bool shadowed = false;
      bool into_arg = false;
      for (;;) {
        if (!shadowed && cur->kind == TermKind::Var && cur->name == t->name) {
          into_arg = true;
          break;
        }
        if (k == p.size()) {
          // the redex's abstraction may be the substituted variable itself
          if (!shadowed && cur->kind == TermKind::App && cur->a->kind == TermKind::Var &&
              cur->a->name == t->name)
            into_arg = true;
          break;
        }
        if (cur->kind == TermKind::Abs && cur->name == t->name) shadowed = true;
        switch (p[k]) {
          case PathStep::Fun: cur = cur->kind == TermKind::App ? cur->a : nullptr; break;
          case PathStep::Arg: cur = cur->kind == TermKind::App ? cur->b : nullptr; break;
          case PathStep::Body: cur = cur->kind == TermKind::Abs ? cur->a : nullptr; break;
        }
        if (!cur) {
          ok = false;
          return t;
        }
        ++k;
      }
      if (into_arg) {
        if (free_occurrences(t->name, erase_annotations(body_erased)) > 1) {
          // a nonlinear substituend can host no redex at the current level
          // (its contents live one level deeper); reaching one is a bug
          ok = false;
          return t;
        }
        // linear substituend: perform the substitution for real (rule 2) so
        // the redex becomes structurally visible, then retry
        XPtr collapsed = x_substitute(t->a, t->name, t->b);
        return x_fire(collapsed, p, i, ok);
      }
      XPtr na = x_fire(t->a, p, i, ok);
      return std::make_shared<XTerm>(XTerm{XKind::Sub, t->name, 0, false, na, t->b});
    }
  }
  ok = false;
  return t;
}

std::size_t occurrence_count(const TermPtr& t) {
  std::size_t n = 0;
  for (const auto& x : free_vars(t)) n += free_occurrences(x, t);
  return n;
}

void x_check_subs(const XPtr& t, std::vector<std::string>& problems) {
  switch (t->kind) {
    case XKind::Var: return;
    case XKind::Abs:
      x_check_subs(t->a, problems);
      return;
    case XKind::App:
      x_check_subs(t->a, problems);
      x_check_subs(t->b, problems);
      return;
    case XKind::Sub: {
      TermPtr er = erase_annotations(x_erase(t));
      std::size_t no = occurrence_count(er);
      std::size_t u1 = x_size(t->a);
      if (no > u1)
        problems.push_back("occurrence bound violated: no=" + std::to_string(no) +
                           " > |u1|=" + std::to_string(u1));
      x_check_subs(t->a, problems);
      x_check_subs(t->b, problems);
      return;
    }
  }
}

}  // namespace

std::vector<RedexPath> redexes_at_depth(const StratPtr& t, std::size_t d) {
  std::vector<RedexPath> out;
  RedexPath cur;
  collect_redexes_at(t, d, cur, out, false);
  return out;
}

std::optional<std::size_t> min_redex_depth(const StratPtr& t) {
  std::vector<RedexPath> out;
  RedexPath cur;
  collect_redexes_at(t, 0, cur, out, true);
  std::optional<std::size_t> best;
  for (const auto& p : out) {
    StratPtr s = strat_subterm(t, p, 0);
    std::size_t d = s->a->depth;
    if (!best || d < *best) best = d;
  }
  return best;
}

std::vector<ForbiddenPattern> scan_forbidden_patterns(const StratPtr& t) {
  std::vector<ForbiddenPattern> out;
  RedexPath cur;
  scan_rec(t, cur, out);
  return out;
}

bool within_bound(std::size_t steps, std::size_t base, std::size_t depth) {
  if (base <= 1) return steps <= 1;
  // bound = base^(2^depth); if it exceeds 2^63 the comparison is trivially true
  long double lg = std::log2(static_cast<long double>(base)) * std::exp2((long double)depth);
  if (lg >= 63.0L) return true;
  unsigned long long bound = 1;
  unsigned long long e = 1ULL << depth;
  for (unsigned long long i = 0; i < e; ++i) bound *= base;
  return steps <= bound;
}

namespace {
void bound_problem(const std::string& msg, const StratifyOptions& opts, LevelTrace* trace) {
  if (opts.policy == BoundPolicy::Throw) throw invariant_violation(msg);
  if (trace) {
    trace->warnings.push_back(msg);
    trace->ok = false;
  }
}
}  // namespace

std::pair<StratPtr, std::size_t> reduce_level(const StratPtr& t, std::size_t d,
                                              const StratifyOptions& opts, LevelTrace* trace) {
  StratPtr cur = t;
  std::size_t entry = strat_size(t);
  std::size_t steps = 0;
  XPtr shadow = opts.shadow_check ? x_of(t) : nullptr;
  for (;;) {
    auto rs = redexes_at_depth(cur, d);
    if (rs.empty()) break;
    const RedexPath& p = rs.front();
    StratPtr red = strat_subterm(cur, p, 0);
    StratPtr contractum = strat_substitute(red->a->a, red->a->name, red->b);
    cur = strat_rebuild(cur, p, 0, contractum);
    ++steps;
    if (shadow) {
      bool ok = true;
      shadow = x_fire(shadow, p, 0, ok);
      if (!ok) bound_problem("shadow trace lost the redex", opts, trace);
    }
    if (steps > entry) {
      bound_problem("level " + std::to_string(d) + ": step count " + std::to_string(steps) +
                        " exceeds entry size " + std::to_string(entry) + " (Lemma 16)",
                    opts, trace);
      if (opts.policy == BoundPolicy::Warn && steps > entry * 4 + 16)
        throw invariant_violation("level reduction runaway");
    }
    if (opts.scan_intermediates) {
      auto bad = scan_forbidden_patterns(cur);
      if (!bad.empty())
        bound_problem("forbidden depth pattern after a level-" + std::to_string(d) + " step",
                      opts, trace);
    }
  }
  if (shadow) {
    if (!strat_alpha_eq(x_erase(shadow), cur))
      bound_problem("shadow erasure differs from the reduced term", opts, trace);
    if (x_size(shadow) > entry)
      bound_problem("shadow size exceeds the level entry size", opts, trace);
    std::vector<std::string> problems;
    x_check_subs(shadow, problems);
    for (const auto& m : problems) bound_problem(m, opts, trace);
  }
  return {cur, steps};
}

LevelTrace normalize_levels(const StratPtr& t, const StratifyOptions& opts) {
  LevelTrace tr;
  tr.initial = t;
  std::size_t d_max = strat_depth(t);
  std::size_t initial_size = strat_size(t);
  StratPtr cur = t;
  std::size_t sum_entries = 0;
  for (std::size_t d = 0; d <= d_max; ++d) {
    std::size_t entry = strat_size(cur);
    sum_entries += entry;
    auto [next, steps] = reduce_level(cur, d, opts, &tr);
    std::size_t exit = strat_size(next);
    tr.levels.push_back(LevelRecord{d, entry, steps, exit});
    tr.total_steps += steps;
    if (entry >= 2 && exit > entry * (entry - 1))
      bound_problem("level " + std::to_string(d) + ": exit size " + std::to_string(exit) +
                        " exceeds " + std::to_string(entry) + "*" + std::to_string(entry - 1) +
                        " (Lemma 17)",
                    opts, &tr);
    auto low = min_redex_depth(next);
    if (low && *low <= d)
      bound_problem("level " + std::to_string(d) + ": a depth-" + std::to_string(*low) +
                        " redex survived (Lemma 15)",
                    opts, &tr);
    cur = next;
  }
  tr.final = cur;
  if (min_redex_depth(cur))
    bound_problem("term not normal after the last level", opts, &tr);
  if (!within_bound(sum_entries, initial_size, d_max) && initial_size > 1)
    bound_problem("sum of level entry sizes exceeds |t|^(2^d) (Theorem 18)", opts, &tr);
  return tr;
}

std::string level_trace_to_json(const LevelTrace& tr) {
  nlohmann::json j;
  j["initial"] = print_strat(tr.initial);
  j["final"] = print_strat(tr.final);
  j["total_steps"] = tr.total_steps;
  j["ok"] = tr.ok;
  j["levels"] = nlohmann::json::array();
  for (const auto& r : tr.levels)
    j["levels"].push_back({{"level", r.level},
                           {"entry_size", r.entry_size},
                           {"steps", r.steps},
                           {"exit_size", r.exit_size}});
  if (!tr.warnings.empty()) j["warnings"] = tr.warnings;
  return j.dump();
}

std::string level_trace_to_csv(const LevelTrace& tr) {
  std::ostringstream os;
  os << "level,entry_size,steps,exit_size\n";
  for (const auto& r : tr.levels)
    os << r.level << ',' << r.entry_size << ',' << r.steps << ',' << r.exit_size << '\n';
  return os.str();
}

}  // namespace dlal
