#include "dlal/infer.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <cstdlib>
#include <cstdio>
#include <sstream>

namespace dlal {

// ---------------------------------------------------------------------------
// Principal simple types
// ---------------------------------------------------------------------------

namespace {

struct UnifyState {
  std::map<std::string, TypePtr> subst;
  int next_tv = 0;

  TypePtr fresh() { return t_var("T" + std::to_string(next_tv++)); }

  TypePtr resolve(TypePtr t) {
    while (t->kind == TypeKind::TVar) {
      auto it = subst.find(t->name);
      if (it == subst.end()) return t;
      t = it->second;
    }
    return t;
  }

  bool occurs(const std::string& a, TypePtr t) {
    t = resolve(t);
    if (t->kind == TypeKind::TVar) return t->name == a;
    if (t->kind == TypeKind::Arrow) return occurs(a, t->a) || occurs(a, t->b);
    return false;
  }

  void unify(TypePtr a, TypePtr b) {
    a = resolve(a);
    b = resolve(b);
    if (a->kind == TypeKind::TVar) {
      if (b->kind == TypeKind::TVar && a->name == b->name) return;
      if (occurs(a->name, b)) throw type_error("occurs check failed on " + a->name);
      subst[a->name] = b;
      return;
    }
    if (b->kind == TypeKind::TVar) {
      unify(b, a);
      return;
    }
    if (a->kind != TypeKind::Arrow || b->kind != TypeKind::Arrow)
      throw type_error("cannot unify simple types");
    unify(a->a, b->a);
    unify(a->b, b->b);
  }

  TypePtr walk(TypePtr t) {
    t = resolve(t);
    if (t->kind == TypeKind::Arrow) return t_arrow(walk(t->a), walk(t->b));
    return t;
  }
};

struct SplitBuilder {
  UnifyState& u;
  std::set<std::string> used;
  std::vector<std::string> free_order;
  std::map<std::string, std::vector<std::pair<std::string, TypePtr>>> free_occs;
  std::map<std::string, std::string> occ_of;

  struct Scope {
    std::string var;
    std::vector<std::pair<std::string, TypePtr>> occs;
  };

  SDPtr walk(const TermPtr& t, std::vector<Scope>& scopes) {
    switch (t->kind) {
      case TermKind::Var: {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
          if (it->var == t->name) {
            std::string occ = fresh_name(t->name, used);
            used.insert(occ);
            TypePtr tv = u.fresh();
            it->occs.push_back({occ, tv});
            occ_of[occ] = t->name;
            auto n = std::make_shared<SimpleDeriv>();
            n->kind = SKind::Ax;
            n->name = occ;
            n->type = tv;
            return n;
          }
        }
        std::string occ;
        if (!free_occs.count(t->name)) {
          free_order.push_back(t->name);
          occ = t->name;
        } else {
          occ = fresh_name(t->name, used);
        }
        used.insert(occ);
        TypePtr tv = u.fresh();
        free_occs[t->name].push_back({occ, tv});
        occ_of[occ] = t->name;
        auto n = std::make_shared<SimpleDeriv>();
        n->kind = SKind::Ax;
        n->name = occ;
        n->type = tv;
        return n;
      }
      case TermKind::App: {
        SDPtr l = walk(t->a, scopes);
        SDPtr r = walk(t->b, scopes);
        TypePtr beta = u.fresh();
        u.unify(node_type(l), t_arrow(node_type(r), beta));
        auto n = std::make_shared<SimpleDeriv>();
        n->kind = SKind::App;
        n->l = l;
        n->r = r;
        n->type = beta;
        return n;
      }
      case TermKind::Abs: {
        scopes.push_back(Scope{t->name, {}});
        SDPtr body = walk(t->a, scopes);
        Scope sc = scopes.back();
        scopes.pop_back();
        SDPtr cur = body;
        TypePtr dom;
        std::string binder;
        if (sc.occs.empty()) {
          dom = u.fresh();
          binder = fresh_name(t->name, used);
          used.insert(binder);
          auto w = std::make_shared<SimpleDeriv>();
          w->kind = SKind::Weak;
          w->name = binder;
          w->type = dom;
          w->l = cur;
          cur = w;
        } else if (sc.occs.size() == 1) {
          binder = sc.occs[0].first;
          dom = sc.occs[0].second;
        } else {
          std::string acc = sc.occs[0].first;
          TypePtr accty = sc.occs[0].second;
          for (std::size_t i = 1; i < sc.occs.size(); ++i) {
            u.unify(accty, sc.occs[i].second);
            std::string merged = fresh_name(t->name, used);
            used.insert(merged);
            auto c = std::make_shared<SimpleDeriv>();
            c->kind = SKind::Cntr;
            c->name = acc;
            c->name2 = sc.occs[i].first;
            c->name3 = merged;
            c->l = cur;
            cur = c;
            acc = merged;
          }
          binder = acc;
          dom = accty;
        }
        auto n = std::make_shared<SimpleDeriv>();
        n->kind = SKind::Abs;
        n->name = binder;
        n->type = dom;
        n->l = cur;
        return n;
      }
    }
    throw type_error("walk: bad term");
  }

  // judgement type of a freshly built (pre-finalize) node
  TypePtr node_type(const SDPtr& n) {
    switch (n->kind) {
      case SKind::Ax:
      case SKind::App: return n->type;
      case SKind::Abs: return t_arrow(n->type, node_type(n->l));
      default: return node_type(n->l);
    }
  }
};

void finalize(const SDPtr& dc, UnifyState& u, const std::map<std::string, std::string>& rn) {
  SimpleDeriv* d = const_cast<SimpleDeriv*>(dc.get());
  std::function<TypePtr(const TypePtr&)> ren = [&](const TypePtr& s) -> TypePtr {
    if (s->kind == TypeKind::TVar) {
      auto it = rn.find(s->name);
      return t_var(it == rn.end() ? s->name : it->second);
    }
    return t_arrow(ren(s->a), ren(s->b));
  };
  auto fix = [&](TypePtr t) { return ren(u.walk(t)); };
  switch (d->kind) {
    case SKind::Ax:
      d->type = fix(d->type);
      d->env = {{d->name, d->type}};
      d->jtype = d->type;
      d->subject = mk_var(d->name);
      return;
    case SKind::App: {
      finalize(d->l, u, rn);
      finalize(d->r, u, rn);
      d->env = d->l->env;
      for (const auto& [x, ty] : d->r->env) d->env[x] = ty;
      d->type = fix(d->type);
      d->jtype = d->type;
      d->subject = mk_app(d->l->subject, d->r->subject);
      return;
    }
    case SKind::Abs: {
      finalize(d->l, u, rn);
      d->type = fix(d->type);
      d->env = d->l->env;
      d->env.erase(d->name);
      d->jtype = t_arrow(d->type, d->l->jtype);
      d->subject = mk_abs(d->name, d->l->subject);
      return;
    }
    case SKind::Cntr: {
      finalize(d->l, u, rn);
      d->env = d->l->env;
      TypePtr a = d->env.at(d->name);
      d->env.erase(d->name);
      d->env.erase(d->name2);
      d->env[d->name3] = a;
      d->jtype = d->l->jtype;
      d->subject = rename_pair(d->l->subject, d->name, d->name2, d->name3);
      return;
    }
    case SKind::Weak: {
      finalize(d->l, u, rn);
      d->type = fix(d->type);
      d->env = d->l->env;
      d->env[d->name] = d->type;
      d->jtype = d->l->jtype;
      d->subject = d->l->subject;
      return;
    }
  }
}

void collect_atoms(const TypePtr& t, std::vector<std::string>& order,
                   std::set<std::string>& seen) {
  if (t->kind == TypeKind::TVar) {
    if (seen.insert(t->name).second) order.push_back(t->name);
    return;
  }
  if (t->kind == TypeKind::Arrow) {
    collect_atoms(t->a, order, seen);
    collect_atoms(t->b, order, seen);
  }
}

}  // namespace

PrincipalResult principal_simple_type(const TermPtr& t) {
  UnifyState u;
  SplitBuilder sb{u};
  sb.used = free_vars(t);
  std::function<void(const TermPtr&)> names = [&](const TermPtr& s) {
    if (s->kind == TermKind::Abs) sb.used.insert(s->name);
    if (s->a) names(s->a);
    if (s->b) names(s->b);
  };
  names(t);

  std::vector<SplitBuilder::Scope> scopes;
  SDPtr root = sb.walk(t, scopes);

  for (const auto& f : sb.free_order) {
    auto& occs = sb.free_occs[f];
    if (occs.size() < 2) continue;
    std::string acc = occs[0].first;
    for (std::size_t i = 1; i < occs.size(); ++i) {
      u.unify(occs[0].second, occs[i].second);
      std::string merged = i + 1 == occs.size() ? f + "m" : fresh_name(f, sb.used);
      merged = i + 1 == occs.size() ? f : merged;  // final merge restores the source name
      if (merged != f) sb.used.insert(merged);
      auto c = std::make_shared<SimpleDeriv>();
      c->kind = SKind::Cntr;
      c->name = acc;
      c->name2 = occs[i].first;
      c->name3 = merged;
      c->l = root;
      root = c;
      acc = merged;
    }
  }

  TypePtr principal = u.walk(sb.node_type(root->kind == SKind::Cntr ? root : root));
  // node_type sees through Cntr via the default branch
  std::vector<std::string> order;
  std::set<std::string> seen;
  collect_atoms(principal, order, seen);
  std::function<void(const SDPtr&)> more = [&](const SDPtr& n) {
    if (!n) return;
    if (n->type) collect_atoms(u.walk(n->type), order, seen);
    more(n->l);
    more(n->r);
  };
  more(root);
  std::map<std::string, std::string> rename;
  static const char* letters = "abcdefghijklmnopqrstuvwxyz";
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::string nn = i < 26 ? std::string(1, letters[i]) : "a" + std::to_string(i - 25);
    rename[order[i]] = nn;
  }

  finalize(root, u, rename);

  std::function<TypePtr(const TypePtr&)> ren = [&](const TypePtr& s) -> TypePtr {
    if (s->kind == TypeKind::TVar) {
      auto it = rename.find(s->name);
      return t_var(it == rename.end() ? s->name : it->second);
    }
    return t_arrow(ren(s->a), ren(s->b));
  };

  PrincipalResult pr;
  pr.type = ren(principal);
  pr.deriv = root;
  pr.occ_of = sb.occ_of;
  if (!alpha_eq(root->subject, t))
    throw invariant_violation("principal_simple_type: subject mismatch");
  return pr;
}

// ---------------------------------------------------------------------------
// Abstract types
// ---------------------------------------------------------------------------

ATypePtr a_atom(std::string name) {
  return std::make_shared<AType>(AType{{}, true, std::move(name), nullptr, nullptr});
}
ATypePtr a_arrow(ATypePtr arg, ATypePtr res) {
  return std::make_shared<AType>(AType{{}, false, {}, std::move(arg), std::move(res)});
}
ATypePtr a_decorate(const ATypePtr& t, int param) {
  AType copy = *t;
  copy.params.insert(copy.params.begin(), param);
  return std::make_shared<AType>(std::move(copy));
}

int ParamSupply::fresh(const std::string& base) {
  names.push_back(base + std::to_string(next));
  return next++;
}

std::string print_atype(const ATypePtr& t, const std::vector<std::string>& param_names) {
  std::ostringstream os;
  for (int p : t->params) os << param_names[p] << ' ';
  if (t->atom) {
    os << t->name;
  } else {
    os << '(' << print_atype(t->arg, param_names) << " -> "
       << print_atype(t->res, param_names) << ')';
  }
  return os.str();
}

ATypePtr maximal_decoration(const TypePtr& simple, ParamSupply& supply) {
  if (simple->kind == TypeKind::TVar) return a_atom(simple->name);
  if (simple->kind != TypeKind::Arrow)
    throw invariant_violation("maximal_decoration: not a simple type");
  ATypePtr arg = maximal_decoration(simple->a, supply);
  int a = supply.fresh("a");
  return a_arrow(a_decorate(arg, a), maximal_decoration(simple->b, supply));
}

namespace {
void unify_abs_rec(const ATypePtr& a1, const ATypePtr& a2, BoolConstraintSet& out) {
  if (out.absurd) return;
  if (a1->atom != a2->atom || (a1->atom && a1->name != a2->name)) {
    out.absurd = true;
    return;
  }
  out.equations.push_back({Disj{a1->params, false}, Disj{a2->params, false}});
  if (!a1->atom) {
    unify_abs_rec(a1->arg, a2->arg, out);
    unify_abs_rec(a1->res, a2->res, out);
  }
}
}  // namespace

BoolConstraintSet unify_abstract(const ATypePtr& a1, const ATypePtr& a2) {
  BoolConstraintSet out;
  unify_abs_rec(a1, a2, out);
  if (out.absurd) out.equations.clear();
  return out;
}

ATypePtr merge_types(const ATypePtr& a1, const ATypePtr& a2) {
  if (a1->atom != a2->atom || (a1->atom && a1->name != a2->name))
    throw invariant_violation("merge_types: shape mismatch");
  std::vector<int> params = a1->params;
  for (int p : a2->params)
    if (std::find(params.begin(), params.end(), p) == params.end()) params.push_back(p);
  if (a1->atom)
    return std::make_shared<AType>(AType{params, true, a1->name, nullptr, nullptr});
  return std::make_shared<AType>(
      AType{params, false, {}, merge_types(a1->arg, a2->arg), merge_types(a1->res, a2->res)});
}

// ---------------------------------------------------------------------------
// Figure 10
// ---------------------------------------------------------------------------

AbstractDeriv abstract_derivation(const SDPtr& d) {
  AbstractDeriv ad;
  ad.deriv = d;
  std::function<void(const SDPtr&)> rec = [&](const SDPtr& n) {
    switch (n->kind) {
      case SKind::Ax: {
        ATypePtr a = maximal_decoration(n->type, ad.supply);
        ad.envs[n.get()] = {{n->name, a}};
        ad.types[n.get()] = a;
        return;
      }
      case SKind::App: {
        rec(n->l);
        rec(n->r);
        int a = ad.supply.fresh("a");
        ad.app_param[n.get()] = a;
        const ATypePtr& fl = ad.types[n->l.get()];
        if (fl->atom) throw invariant_violation("abstract_derivation: applying an atom");
        ATypePtr arg_dec = a_decorate(ad.types[n->r.get()], a);
        BoolConstraintSet u = unify_abstract(fl->arg, arg_dec);
        if (u.absurd) ad.constraints.absurd = true;
        for (auto& e : u.equations) ad.constraints.equations.push_back(e);
        std::map<std::string, ATypePtr> env = ad.envs[n->l.get()];
        for (const auto& [x, ty] : ad.envs[n->r.get()]) env[x] = a_decorate(ty, a);
        ad.envs[n.get()] = env;
        ad.types[n.get()] = fl->res;
        return;
      }
      case SKind::Abs: {
        rec(n->l);
        int a = ad.supply.fresh("a");
        ad.abs_param[n.get()] = a;
        std::map<std::string, ATypePtr> env = ad.envs[n->l.get()];
        ATypePtr dom = env.count(n->name) ? env.at(n->name) : a_atom("?");
        env.erase(n->name);
        if (free_occurrences(n->name, n->l->subject ? n->l->subject : mk_var("?")) >= 2) {
          ad.constraints.equations.push_back({Disj{{a}, false}, Disj{{}, true}});
        }
        ad.envs[n.get()] = env;
        ad.types[n.get()] = a_arrow(a_decorate(dom, a), ad.types[n->l.get()]);
        return;
      }
      case SKind::Cntr: {
        rec(n->l);
        std::map<std::string, ATypePtr> env = ad.envs[n->l.get()];
        ATypePtr m = merge_types(env.at(n->name), env.at(n->name2));
        env.erase(n->name);
        env.erase(n->name2);
        env[n->name3] = m;
        ad.envs[n.get()] = env;
        ad.types[n.get()] = ad.types[n->l.get()];
        return;
      }
      case SKind::Weak: {
        rec(n->l);
        std::map<std::string, ATypePtr> env = ad.envs[n->l.get()];
        env[n->name] = maximal_decoration(n->type, ad.supply);
        ad.envs[n.get()] = env;
        ad.types[n.get()] = ad.types[n->l.get()];
        return;
      }
    }
  };
  rec(d);
  return ad;
}

// ---------------------------------------------------------------------------
// Solution enumeration
// ---------------------------------------------------------------------------

namespace {
int eval_disj(const Disj& d, const std::vector<int>& asg) {
  if (d.one) return 1;
  bool unknown = false;
  for (int p : d.params) {
    if (asg[p] == 1) return 1;
    if (asg[p] == -1) unknown = true;
  }
  return unknown ? -1 : 0;
}

bool propagate(const BoolConstraintSet& c, std::vector<int>& asg) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [d1, d2] : c.equations) {
      int v1 = eval_disj(d1, asg);
      int v2 = eval_disj(d2, asg);
      if (v1 >= 0 && v2 >= 0) {
        if (v1 != v2) return false;
        continue;
      }
      auto force_zero = [&](const Disj& d) {
        for (int p : d.params)
          if (asg[p] == -1) {
            asg[p] = 0;
            changed = true;
          }
      };
      auto force_single_one = [&](const Disj& d) {
        int unknown = -1, count = 0;
        for (int p : d.params)
          if (asg[p] == -1) {
            unknown = p;
            ++count;
          }
        if (count == 1) {
          asg[unknown] = 1;
          changed = true;
        }
      };
      if (v1 == 0) force_zero(d2);
      else if (v2 == 0) force_zero(d1);
      else if (v1 == 1 && v2 == -1) force_single_one(d2);
      else if (v2 == 1 && v1 == -1) force_single_one(d1);
    }
  }
  return true;
}

void dpll(const BoolConstraintSet& c, std::vector<int> asg, int n,
          std::vector<uint64_t>& out, std::size_t guard) {
  if (!propagate(c, asg)) return;
  int pick = -1;
  for (int i = 0; i < n; ++i)
    if (asg[i] == -1) {
      pick = i;
      break;
    }
  if (pick == -1) {
    uint64_t mask = 0;
    for (int i = 0; i < n; ++i)
      if (asg[i] == 1) mask |= (1ULL << i);
    out.push_back(mask);
    if (out.size() > guard) throw resource_error("too many boolean solutions");
    return;
  }
  for (int v : {0, 1}) {
    std::vector<int> next = asg;
    next[pick] = v;
    dpll(c, std::move(next), n, out, guard);
  }
}

bool disj_value(const std::vector<int>& params, uint64_t phi) {
  for (int p : params)
    if (phi & (1ULL << p)) return true;
  return false;
}
}  // namespace

std::vector<uint64_t> enumerate_solutions(const BoolConstraintSet& c, int n_params,
                                          int param_cap) {
  if (n_params > param_cap)
    throw resource_error("parameter count " + std::to_string(n_params) +
                         " exceeds the cap of " + std::to_string(param_cap));
  if (c.absurd) return {};
  std::vector<uint64_t> out;
  std::vector<int> asg(n_params, -1);
  dpll(c, std::move(asg), n_params, out, 1u << 20);
  std::sort(out.begin(), out.end(), [](uint64_t a, uint64_t b) {
    int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Conditions (i) and (ii)
// ---------------------------------------------------------------------------

std::variant<BangDeriv, BangRejection> bang_check(const AbstractDeriv& ad, uint64_t phi) {
  BangDeriv bd;
  bd.deriv = ad.deriv;
  std::map<std::string, int> box_memberships;
  std::optional<BangRejection> reject;

  std::function<void(const SDPtr&)> rec = [&](const SDPtr& n) {
    if (!n || reject) return;
    rec(n->l);
    rec(n->r);
    if (reject) return;
    if (n->kind == SKind::App) {
      int a = ad.app_param.at(n.get());
      if (phi & (1ULL << a)) {
        bd.banged_apps.insert(n.get());
        const auto& env = ad.envs.at(n->r.get());
        if (env.size() > 1) {
          std::string vars;
          for (const auto& [x, _] : env) vars += (vars.empty() ? "" : ", ") + x;
          reject = BangRejection{"i", "(=> e) argument has environment {" + vars + "}"};
          return;
        }
        for (const auto& [x, _] : env)
          if (++box_memberships[x] > 1) {
            reject = BangRejection{"ii", "variable " + x + " enters two !-boxes"};
            return;
          }
      }
    }
    if (n->kind == SKind::Abs) {
      int a = ad.abs_param.at(n.get());
      bool banged = (phi & (1ULL << a)) != 0;
      if (!banged) {
        const auto& env = ad.envs.at(n->l.get());
        auto it = env.find(n->name);
        if (it != env.end() && disj_value(it->second->params, phi)) banged = true;
      }
      if (banged) bd.banged_abs.insert(n.get());
    }
  };
  rec(ad.deriv);
  if (reject) return *reject;
  return bd;
}

// ---------------------------------------------------------------------------
// Stage 2: the level system
// ---------------------------------------------------------------------------

namespace {

struct Lin {
  std::map<int, long> terms;
  long cst = 0;

  static Lin var(int v) {
    Lin l;
    l.terms[v] = 1;
    return l;
  }
  static Lin constant(long c) {
    Lin l;
    l.cst = c;
    return l;
  }
  Lin plus(const Lin& o, long scale = 1) const {
    Lin r = *this;
    for (const auto& [v, c] : o.terms) {
      r.terms[v] += c * scale;
      if (r.terms[v] == 0) r.terms.erase(v);
    }
    r.cst += o.cst * scale;
    return r;
  }
  Lin plus_const(long c) const {
    Lin r = *this;
    r.cst += c;
    return r;
  }
};

struct VarInfo {
  long lo, hi;
  bool enumerate;
};

struct LinSys {
  std::vector<VarInfo> vars;
  std::vector<Lin> equations;  // == 0
  std::vector<Lin> ineqs;      // >= 0

  int fresh(long lo, long hi, bool enumerate) {
    vars.push_back(VarInfo{lo, hi, enumerate});
    return static_cast<int>(vars.size()) - 1;
  }
};

struct DecTree;
using DecPtr = std::shared_ptr<const DecTree>;
struct DecTree {
  Lin cnt;
  bool atom;
  std::string name;
  DecPtr arg, res;
  bool banged = false;  // the arrow is =>
};

DecPtr dec_atom(Lin c, std::string n) {
  return std::make_shared<DecTree>(
      DecTree{std::move(c), true, std::move(n), nullptr, nullptr, false});
}
DecPtr dec_arrow(Lin c, DecPtr a, DecPtr r, bool banged) {
  return std::make_shared<DecTree>(
      DecTree{std::move(c), false, {}, std::move(a), std::move(r), banged});
}
DecPtr dec_retop(const DecPtr& d, Lin c) {
  DecTree t = *d;
  t.cnt = std::move(c);
  return std::make_shared<DecTree>(std::move(t));
}

struct MarkTree {
  bool banged = false;
  std::shared_ptr<MarkTree> arg, res;
};
using MarkPtr = std::shared_ptr<MarkTree>;

MarkPtr marks_of(const ATypePtr& a, uint64_t phi) {
  auto m = std::make_shared<MarkTree>();
  m->banged = disj_value(a->params, phi);
  if (!a->atom) {
    m->arg = marks_of(a->arg, phi);
    m->res = marks_of(a->res, phi);
  }
  return m;
}

DecPtr build_skel(const TypePtr& simple, const MarkPtr& marks, LinSys& sys, long cap) {
  int v = sys.fresh(0, cap, false);
  if (simple->kind == TypeKind::TVar) return dec_atom(Lin::var(v), simple->name);
  DecPtr arg = build_skel(simple->a, marks ? marks->arg : nullptr, sys, cap);
  DecPtr res = build_skel(simple->b, marks ? marks->res : nullptr, sys, cap);
  bool banged = marks && marks->arg && marks->arg->banged;
  return dec_arrow(Lin::var(v), arg, res, banged);
}

bool unify_dec(const DecPtr& a, const DecPtr& b, LinSys& sys) {
  if (a->atom != b->atom) return false;
  sys.equations.push_back(a->cnt.plus(b->cnt, -1));
  if (a->atom) return a->name == b->name;
  if (a->banged != b->banged) return false;
  return unify_dec(a->arg, b->arg, sys) && unify_dec(a->res, b->res, sys);
}

struct Solved {
  std::vector<std::pair<int, Lin>> elim;
  std::vector<int> free_vars;
  bool contradiction = false;
};

Solved eliminate(const LinSys& sys) {
  Solved s;
  std::vector<Lin> eqs = sys.equations;
  std::set<int> eliminated;
  for (;;) {
    bool progress = false;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      Lin& e = eqs[i];
      if (e.terms.empty()) continue;
      int pick = -1;
      long pcoef = 0;
      for (const auto& [v, c] : e.terms)
        if (c == 1 || c == -1) {
          pick = v;
          pcoef = c;
          break;
        }
      if (pick == -1) continue;
      Lin expr;
      for (const auto& [v, c] : e.terms)
        if (v != pick) expr.terms[v] = -pcoef * c;
      expr.cst = -pcoef * e.cst;
      s.elim.push_back({pick, expr});
      eliminated.insert(pick);
      eqs[i] = Lin{};
      for (auto& o : eqs) {
        auto it = o.terms.find(pick);
        if (it == o.terms.end()) continue;
        long k = it->second;
        o.terms.erase(it);
        o = o.plus(expr, k);
      }
      progress = true;
    }
    if (!progress) break;
  }
  for (const auto& e : eqs) {
    if (e.terms.empty()) {
      if (e.cst != 0) {
        s.contradiction = true;
        return s;
      }
    } else {
      s.contradiction = true;  // no unit pivot left; outside this search
      return s;
    }
  }
  for (int v = 0; v < static_cast<int>(sys.vars.size()); ++v)
    if (!eliminated.count(v)) s.free_vars.push_back(v);
  return s;
}

long eval_lin(const Lin& e, const std::vector<long>& val) {
  long r = e.cst;
  for (const auto& [v, c] : e.terms) r += c * val[v];
  return r;
}

// --- reconstruction ---------------------------------------------------------

struct BuildRes;

struct BEntry {
  TypePtr type;
  bool nonlinear = false;
  long promote_at = -1;
  std::string source;  // occurrence name for binder collection
  std::shared_ptr<BuildRes> plug;
  long plug_level = -1;
};

struct BuildRes {
  DerivPtr script;
  long level = 0;
  TypePtr type;
  std::map<std::string, BEntry> ctx;
};

struct Reconstructor {
  const BangDeriv& marking;
  // set by the driver when DLAL_INFER_DEBUG is present
  static bool debug() {
    static bool d = std::getenv("DLAL_INFER_DEBUG") != nullptr;
    return d;
  }
  std::optional<BuildRes> bail(const char* why) const {
    if (debug()) fprintf(stderr, "[stage2]   build bail: %s\n", why);
    return std::nullopt;
  }
  const std::vector<long>& val;
  const std::map<const SimpleDeriv*, int>& level_var;
  const std::map<std::string, DecPtr>& var_skel;
  const std::map<std::string, const SimpleDeriv*>& binder_node;
  const std::map<std::string, std::string>& occ_src;
  const std::set<std::string>& free_banged;
  std::set<std::string> used;
  bool failed = false;

  std::string src_of(const std::string& occ) const {
    auto it = occ_src.find(occ);
    return it == occ_src.end() ? occ : it->second;
  }

  TypePtr dec_value(const DecPtr& d) {
    long k = eval_lin(d->cnt, val);
    if (k < 0) {
      failed = true;
      k = 0;
    }
    TypePtr inner;
    if (d->atom)
      inner = t_var(d->name);
    else
      inner = d->banged ? t_bang_arrow(dec_value(d->arg), dec_value(d->res))
                        : t_lin(dec_value(d->arg), dec_value(d->res));
    return t_par_n(inner, static_cast<std::size_t>(k));
  }

  static TypePtr strip_par(TypePtr t, long k, bool& ok) {
    for (long i = 0; i < k; ++i) {
      if (t->kind != TypeKind::Par) {
        ok = false;
        return t;
      }
      t = t->a;
    }
    return t;
  }

  long level_of(const SimpleDeriv* n) const { return val[level_var.at(n)]; }

  bool close_to(BuildRes& cur, long target) {
    while (cur.level > target) {
      long exterior = cur.level - 1;
      std::vector<std::string> promoted;
      for (auto& [name, e] : cur.ctx) {
        if (e.nonlinear) return false;
        if (!e.plug && e.promote_at == exterior) promoted.push_back(name);
      }
      DerivParams pi;
      pi.promoted = promoted;
      cur.script = mk_deriv(Rule::ParI, pi, {cur.script});
      std::set<std::string> promoted_set(promoted.begin(), promoted.end());
      std::vector<std::string> names;
      for (auto& [name, _] : cur.ctx) names.push_back(name);
      for (const auto& name : names) {
        BEntry& e = cur.ctx[name];
        if (promoted_set.count(name)) {
          e.nonlinear = true;
          continue;
        }
        DerivParams pe;
        pe.binder = name;
        if (e.plug && e.plug_level == exterior) {
          cur.script = mk_deriv(Rule::ParE, pe, {e.plug->script, cur.script});
          BuildRes plug = *e.plug;
          cur.ctx.erase(name);
          for (auto& [pn, pent] : plug.ctx) {
            if (cur.ctx.count(pn)) return false;
            cur.ctx[pn] = pent;
          }
        } else {
          TypePtr lifted = t_par(e.type);
          DerivParams idp;
          idp.binder = name;
          idp.inst_type = lifted;
          cur.script =
              mk_deriv(Rule::ParE, pe, {mk_deriv(Rule::Id, idp, {}), cur.script});
          e.type = lifted;
        }
      }
      cur.level = exterior;
    }
    return cur.level == target;
  }

  bool bridge_in(BuildRes& host, const BuildRes& sub, long host_level, std::string& name_out,
                 TypePtr& visible) {
    bool ok = true;
    visible = strip_par(sub.type, host_level - sub.level, ok);
    if (!ok) return false;
    name_out = fresh_name("w", used);
    used.insert(name_out);
    BEntry e;
    e.type = visible;
    e.plug = std::make_shared<BuildRes>(sub);
    e.plug_level = sub.level;
    host.ctx[name_out] = e;
    return true;
  }

  std::optional<BuildRes> build(const SDPtr& n) {
    if (failed) return std::nullopt;
    switch (n->kind) {
      case SKind::Cntr:
      case SKind::Weak:
        return build(n->l);
      case SKind::Ax: {
        BuildRes r;
        std::string src = src_of(n->name);
        r.type = dec_value(var_skel.at(src));
        r.level = level_of(n.get());
        DerivParams ps;
        ps.binder = n->name;
        ps.inst_type = r.type;
        r.script = mk_deriv(Rule::Id, ps, {});
        BEntry e;
        e.type = r.type;
        e.source = n->name;
        auto bit = binder_node.find(src);
        const SimpleDeriv* abs = bit == binder_node.end() ? nullptr : bit->second;
        bool banged = abs ? marking.banged_abs.count(abs) > 0 : free_banged.count(src) > 0;
        e.promote_at = banged ? (abs ? level_of(abs) : 0) : -1;
        r.ctx[n->name] = e;
        return r;
      }
      case SKind::App: {
        auto fo = build(n->l);
        auto ao = build(n->r);
        if (!fo || !ao || failed) return bail("subbuild failed");
        long lv = level_of(n.get());
        bool banged = marking.banged_apps.count(n.get()) > 0;
        BuildRes r;
        r.level = lv;

        DerivPtr fun_script;
        bool ok = true;
        TypePtr fun_vis;
        if (fo->level == lv) {
          fun_script = fo->script;
          r.ctx = fo->ctx;
          fun_vis = fo->type;
        } else if (fo->level < lv) {
          std::string w;
          if (!bridge_in(r, *fo, lv, w, fun_vis)) return bail("fun bridge strip");
          DerivParams idp;
          idp.binder = w;
          idp.inst_type = fun_vis;
          fun_script = mk_deriv(Rule::Id, idp, {});
        } else {
          return bail("fun above app level");
        }
        if (fun_vis->kind != TypeKind::Lin && fun_vis->kind != TypeKind::Bang)
          return bail("fun not an arrow");

        DerivPtr arg_script;
        std::map<std::string, BEntry> arg_ctx;
        if (banged) {
          BuildRes a = *ao;
          if (!close_to(a, lv + 1)) return bail("banged arg close");
          if (a.ctx.size() > 1) return bail("banged arg env too big");
          for (auto& [name, e] : a.ctx) {
            if (e.plug || e.nonlinear) return bail("banged arg env shape");
            BEntry moved = e;
            moved.nonlinear = true;
            arg_ctx[name] = moved;
          }
          arg_script = a.script;
        } else {
          BuildRes a = *ao;
          if (a.level > lv) {
            if (!close_to(a, lv)) return bail("arg close");
            arg_script = a.script;
            arg_ctx = a.ctx;
          } else if (a.level == lv) {
            arg_script = a.script;
            arg_ctx = a.ctx;
          } else {
            std::string y;
            TypePtr vis;
            if (!bridge_in(r, a, lv, y, vis)) return bail("arg bridge strip");
            DerivParams idp;
            idp.binder = y;
            idp.inst_type = vis;
            arg_script = mk_deriv(Rule::Id, idp, {});
          }
        }
        for (auto& [name, e] : arg_ctx) {
          if (r.ctx.count(name)) return bail("ctx merge clash");
          r.ctx[name] = e;
        }
        (void)ok;
        r.script = mk_deriv(banged ? Rule::BangE : Rule::LinE, {}, {fun_script, arg_script});
        r.type = fun_vis->b;
        return r;
      }
      case SKind::Abs: {
        auto bo = build(n->l);
        if (!bo || failed) return bail("abs body");
        long lv = level_of(n.get());
        BuildRes b = *bo;
        if (!close_to(b, lv)) {
          if (debug())
            fprintf(stderr, "[stage2]   abs %s: body level %ld vs abs level %ld\n",
                    n->name.c_str(), bo->level, lv);
          return bail("abs body close");
        }
        bool banged = marking.banged_abs.count(n.get()) > 0;

        std::vector<std::string> names;
        for (auto& [name, e] : b.ctx) {
          if (e.plug || e.source.empty()) continue;
          auto bn = binder_node.find(src_of(e.source));
          if (bn != binder_node.end() && bn->second == n.get()) names.push_back(name);
        }
        std::sort(names.begin(), names.end());

        DerivParams absp;
        TypePtr dom;
        if (!banged) {
          std::string bindname;
          if (names.size() > 1) return bail("linear binder with several entries");
          if (names.empty()) {
            bindname = fresh_name(n->name, used);
            used.insert(bindname);
            dom = var_skel.count(n->name) ? dec_value(var_skel.at(n->name)) : t_var("a");
            DerivParams wp;
            wp.weak_linear.push_back(WeakEntry{bindname, dom, WeakMark::Proper});
            b.script = mk_deriv(Rule::Weak, wp, {b.script});
          } else {
            bindname = names[0];
            BEntry& e = b.ctx[bindname];
            if (e.nonlinear) return bail("linear binder went nonlinear");
            dom = e.type;
            b.ctx.erase(bindname);
          }
          absp.binder = bindname;
          b.script = mk_deriv(Rule::LinI, absp, {b.script});
        } else {
          std::string bindname;
          if (names.empty()) {
            bindname = fresh_name(n->name, used);
            used.insert(bindname);
            dom = var_skel.count(n->name) ? dec_value(var_skel.at(n->name)) : t_var("a");
            DerivParams wp;
            wp.weak_nonlinear.push_back({bindname, dom});
            b.script = mk_deriv(Rule::Weak, wp, {b.script});
          } else {
            for (const auto& nm : names)
              if (!b.ctx[nm].nonlinear) return bail("banged binder stayed linear");
            bindname = names[0];
            dom = b.ctx[bindname].type;
            for (std::size_t i = 1; i < names.size(); ++i) {
              DerivParams cp;
              cp.merged = std::array<std::string, 3>{bindname, names[i], bindname};
              b.script = mk_deriv(Rule::Cntr, cp, {b.script});
              b.ctx.erase(names[i]);
            }
            b.ctx.erase(bindname);
          }
          absp.binder = bindname;
          b.script = mk_deriv(Rule::BangI, absp, {b.script});
        }
        BuildRes r;
        r.script = b.script;
        r.level = lv;
        r.ctx = b.ctx;
        r.type = banged ? t_bang_arrow(dom, b.type) : t_lin(dom, b.type);
        return r;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

std::vector<InferResult> place_paragraphs(const AbstractDeriv& ad, uint64_t phi,
                                          const BangDeriv& marking, const InferOptions& opts) {
  const long cap = opts.level_cap;
  LinSys sys;

  std::map<std::string, DecPtr> var_skel;
  std::map<std::string, const SimpleDeriv*> binder_node;
  std::map<std::string, std::string> occ_src;
  std::map<const SimpleDeriv*, int> level_var;
  std::set<std::string> free_banged;

  // occurrence -> source wiring from the Cntr/Weak chains
  std::function<void(const SDPtr&)> wire = [&](const SDPtr& n) {
    if (!n) return;
    wire(n->l);
    wire(n->r);
    if (n->kind == SKind::Abs) {
      std::set<std::string> pending{n->name};
      SDPtr cur = n->l;
      while (cur && (cur->kind == SKind::Cntr || cur->kind == SKind::Weak)) {
        if (cur->kind == SKind::Cntr && pending.count(cur->name3)) {
          pending.erase(cur->name3);
          pending.insert(cur->name);
          pending.insert(cur->name2);
        }
        if (cur->kind == SKind::Weak && pending.count(cur->name)) pending.erase(cur->name);
        cur = cur->l;
      }
      for (const auto& o : pending) occ_src[o] = n->name;
      binder_node[n->name] = n.get();
    }
  };
  wire(ad.deriv);
  {
    // root contractions of free variables
    SDPtr cur = ad.deriv;
    while (cur && cur->kind == SKind::Cntr) {
      occ_src[cur->name] = cur->name3;
      occ_src[cur->name2] = cur->name3;
      cur = cur->l;
    }
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto& [o, s] : occ_src) {
        auto it = occ_src.find(s);
        if (it != occ_src.end() && it->second != s && it->second != o) {
          s = it->second;
          moved = true;
        }
      }
    }
  }

  std::map<std::string, std::vector<const SimpleDeriv*>> occurrences_of;
  std::function<void(const SDPtr&)> ax_scan = [&](const SDPtr& n) {
    if (!n) return;
    ax_scan(n->l);
    ax_scan(n->r);
    if (n->kind == SKind::Ax) {
      std::string src = occ_src.count(n->name) ? occ_src.at(n->name) : n->name;
      occurrences_of[src].push_back(n.get());
    }
  };
  ax_scan(ad.deriv);

  for (const auto& [src, occs] : occurrences_of) {
    if (binder_node.count(src)) continue;
    const auto& root_env = ad.envs.at(ad.deriv.get());
    auto it = root_env.find(src);
    bool banged = occs.size() >= 2;
    if (it != root_env.end() && disj_value(it->second->params, phi)) banged = true;
    if (banged) free_banged.insert(src);
  }

  for (const auto& [src, occs] : occurrences_of) {
    ATypePtr entry;
    if (binder_node.count(src)) {
      const SimpleDeriv* abs = binder_node.at(src);
      const auto& env = ad.envs.at(abs->l.get());
      if (env.count(abs->name)) entry = env.at(abs->name);
    } else {
      const auto& root_env = ad.envs.at(ad.deriv.get());
      if (root_env.count(src)) entry = root_env.at(src);
    }
    var_skel[src] = build_skel(occs[0]->type, entry ? marks_of(entry, phi) : nullptr, sys, cap);
  }
  for (const auto& [src, absn] : binder_node) {
    if (var_skel.count(src)) continue;
    ATypePtr entry;
    const auto& env = ad.envs.at(absn->l.get());
    if (env.count(absn->name)) entry = env.at(absn->name);
    TypePtr st;
    std::function<void(const SDPtr&)> findw = [&](const SDPtr& n) {
      if (!n || st) return;
      if (n->kind == SKind::Weak && n->name == absn->name) {
        st = n->type;
        return;
      }
      findw(n->l);
      findw(n->r);
    };
    findw(ad.deriv);
    if (!st) st = t_var("a");
    var_skel[src] = build_skel(st, entry ? marks_of(entry, phi) : nullptr, sys, cap);
  }

  std::map<const SimpleDeriv*, DecPtr> node_type;
  bool dead = false;
  std::function<void(const SDPtr&)> emit = [&](const SDPtr& n) {
    if (!n || dead) return;
    switch (n->kind) {
      case SKind::Ax: {
        int L = sys.fresh(0, cap, true);
        level_var[n.get()] = L;
        std::string src = occ_src.count(n->name) ? occ_src.at(n->name) : n->name;
        node_type[n.get()] = var_skel.at(src);
        return;
      }
      case SKind::Cntr:
      case SKind::Weak: {
        emit(n->l);
        if (dead) return;
        level_var[n.get()] = level_var.at(n->l.get());
        node_type[n.get()] = node_type.at(n->l.get());
        return;
      }
      case SKind::App: {
        emit(n->l);
        emit(n->r);
        if (dead) return;
        int L = sys.fresh(0, cap, true);
        level_var[n.get()] = L;
        const DecPtr& tf = node_type.at(n->l.get());
        if (tf->atom) {
          dead = true;
          return;
        }
        bool banged = marking.banged_apps.count(n.get()) > 0;
        if (tf->banged != banged) {
          dead = true;
          return;
        }
        int Lf = level_var.at(n->l.get());
        int La = level_var.at(n->r.get());
        sys.equations.push_back(tf->cnt.plus(Lin::var(Lf)).plus(Lin::var(L), -1));
        const DecPtr& ta = node_type.at(n->r.get());
        long shift = banged ? -1 : 0;
        Lin used_top = ta->cnt.plus(Lin::var(La)).plus(Lin::var(L), -1).plus_const(shift);
        sys.equations.push_back(tf->arg->cnt.plus(used_top, -1));
        sys.ineqs.push_back(used_top);
        if (banged)
          sys.ineqs.push_back(Lin::var(La).plus(Lin::var(L), -1).plus_const(-1));
        if (tf->arg->atom != ta->atom) {
          dead = true;
          return;
        }
        if (tf->arg->atom) {
          if (tf->arg->name != ta->name) {
            dead = true;
            return;
          }
        } else {
          if (tf->arg->banged != ta->banged ||
              !unify_dec(tf->arg->arg, ta->arg, sys) ||
              !unify_dec(tf->arg->res, ta->res, sys)) {
            dead = true;
            return;
          }
        }
        node_type[n.get()] = tf->res;
        return;
      }
      case SKind::Abs: {
        emit(n->l);
        if (dead) return;
        int L = sys.fresh(0, cap, true);
        level_var[n.get()] = L;
        bool banged = marking.banged_abs.count(n.get()) > 0;
        DecPtr skel = var_skel.at(n->name);
        Lin dom_top;
        auto oit = occurrences_of.find(n->name);
        if (oit != occurrences_of.end() && !oit->second.empty()) {
          const auto& occs = oit->second;
          int first = level_var.at(occs[0]);
          for (std::size_t i = 1; i < occs.size(); ++i)
            sys.equations.push_back(
                Lin::var(level_var.at(occs[i])).plus(Lin::var(first), -1));
          Lin crossing = Lin::var(first).plus(Lin::var(L), -1);
          sys.ineqs.push_back(crossing.plus_const(banged ? -1 : 0));
          dom_top = skel->cnt.plus(crossing).plus_const(banged ? -1 : 0);
        } else {
          dom_top = skel->cnt;
        }
        sys.ineqs.push_back(dom_top);
        DecPtr dom = dec_retop(skel, dom_top);
        const DecPtr& tb = node_type.at(n->l.get());
        int Lb = level_var.at(n->l.get());
        Lin cod_top = tb->cnt.plus(Lin::var(Lb)).plus(Lin::var(L), -1);
        sys.ineqs.push_back(cod_top);
        sys.ineqs.push_back(Lin::var(Lb).plus(Lin::var(L), -1));
        DecPtr cod = dec_retop(tb, cod_top);
        node_type[n.get()] = dec_arrow(Lin::constant(0), dom, cod, banged);
        return;
      }
    }
  };
  emit(ad.deriv);
  if (dead) return {};

  sys.equations.push_back(Lin::var(level_var.at(ad.deriv.get())));
  for (const auto& [src, occs] : occurrences_of) {
    if (binder_node.count(src)) continue;
    int first = level_var.at(occs[0]);
    for (std::size_t i = 1; i < occs.size(); ++i)
      sys.equations.push_back(Lin::var(level_var.at(occs[i])).plus(Lin::var(first), -1));
    sys.ineqs.push_back(Lin::var(first).plus_const(free_banged.count(src) ? -1 : 0));
  }

  const bool dbg = std::getenv("DLAL_INFER_DEBUG") != nullptr;
  Solved sol = eliminate(sys);
  if (sol.contradiction) {
    if (dbg) fprintf(stderr, "[stage2] contradiction in the linear system\n");
    return {};
  }

  std::vector<int> enum_vars;
  for (int v : sol.free_vars)
    if (sys.vars[v].enumerate) enum_vars.push_back(v);

  std::set<std::string> name_seed;
  {
    std::function<void(const SDPtr&)> rec = [&](const SDPtr& n) {
      if (!n) return;
      if (!n->name.empty()) name_seed.insert(n->name);
      if (!n->name2.empty()) name_seed.insert(n->name2);
      if (!n->name3.empty()) name_seed.insert(n->name3);
      rec(n->l);
      rec(n->r);
    };
    rec(ad.deriv);
  }

  std::vector<InferResult> results;
  std::set<std::string> seen;
  std::vector<long> val(sys.vars.size(), 0);
  for (int v : sol.free_vars)
    if (!sys.vars[v].enumerate) val[v] = sys.vars[v].lo;

  // assignments are visited in increasing total-sum order so that the small
  // decorations come out first; the budget keeps wide searches responsive
  std::size_t budget = opts.assignment_guard;
  bool out_of_results = false;

  auto attempt = [&]() {
      for (auto it = sol.elim.rbegin(); it != sol.elim.rend(); ++it)
        val[it->first] = eval_lin(it->second, val);
      for (std::size_t v = 0; v < sys.vars.size(); ++v)
        if (val[v] < sys.vars[v].lo || val[v] > sys.vars[v].hi) return;
      for (const auto& q : sys.ineqs)
        if (eval_lin(q, val) < 0) return;

      Reconstructor rc{marking, val,     level_var, var_skel, binder_node,
                       occ_src, free_banged, name_seed, false};
      auto built = rc.build(ad.deriv);
      if (!built || rc.failed) {
        if (dbg) fprintf(stderr, "[stage2] reconstruction failed\n");
        return;
      }
      BuildRes b = *built;
      if (!rc.close_to(b, 0)) {
        if (dbg) fprintf(stderr, "[stage2] final close failed\n");
        return;
      }
      for (const auto& [src, occs] : occurrences_of) {
        if (binder_node.count(src) || occs.size() < 2) continue;
        std::vector<std::string> names;
        for (auto& [name, e] : b.ctx) {
          if (e.plug || e.source.empty()) continue;
          auto it = occ_src.find(e.source);
          std::string s = it == occ_src.end() ? e.source : it->second;
          if (s == src) names.push_back(name);
        }
        std::sort(names.begin(), names.end());
        if (names.size() >= 2) {
          std::string acc = names[0];
          for (std::size_t k = 1; k < names.size(); ++k) {
            DerivParams cp;
            cp.merged =
                std::array<std::string, 3>{acc, names[k], k + 1 == names.size() ? src : acc};
            b.script = mk_deriv(Rule::Cntr, cp, {b.script});
            acc = (*cp.merged)[2];
          }
        }
      }
      try {
        NdlalCheckedPtr checked = check_ndlal(b.script, true);
        InferResult ir;
        ir.type = checked->type;
        ir.script = b.script;
        int bi = 0;
        for (const auto* app : marking.banged_apps) {
          long ni = val[level_var.at(app->r.get())] - val[level_var.at(app)];
          ir.levels["b" + std::to_string(bi++)] = static_cast<int>(ni);
        }
        if (seen.insert(print_type(ir.type)).second) results.push_back(std::move(ir));
      } catch (const check_error& e) {
        if (dbg) fprintf(stderr, "[stage2] check failed: %s\n", e.what());
      }
      return;
  };

  std::function<void(std::size_t, long)> spread = [&](std::size_t i, long left) {
    if (budget == 0 || out_of_results) return;
    if (i == enum_vars.size()) {
      if (left != 0) return;
      --budget;
      attempt();
      if (results.size() >= opts.max_results) out_of_results = true;
      return;
    }
    int v = enum_vars[i];
    long hi = std::min(sys.vars[v].hi, left);
    for (long x = sys.vars[v].lo; x <= hi; ++x) {
      val[v] = x;
      spread(i + 1, left - x);
    }
  };
  long max_sum = 0;
  for (int v : enum_vars) max_sum += sys.vars[v].hi;
  if (enum_vars.empty()) {
    attempt();
  } else {
    for (long total = 0; total <= max_sum && budget > 0 && !out_of_results; ++total)
      spread(0, total);
  }

  for (auto& r : results)
    for (int p = 0; p < ad.supply.next; ++p) r.phi[ad.supply.names[p]] = (phi >> p) & 1;
  return results;
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

namespace {

// Rebuilds the derivation with a simple-type substitution applied everywhere.
SDPtr specialize_deriv(const SDPtr& d, const std::map<std::string, TypePtr>& sigma) {
  std::function<TypePtr(const TypePtr&)> apply = [&](const TypePtr& t) -> TypePtr {
    if (t->kind == TypeKind::TVar) {
      auto it = sigma.find(t->name);
      return it == sigma.end() ? t : it->second;
    }
    return t_arrow(apply(t->a), apply(t->b));
  };
  std::function<SDPtr(const SDPtr&)> rec = [&](const SDPtr& n) -> SDPtr {
    if (!n) return nullptr;
    auto m = std::make_shared<SimpleDeriv>(*n);
    m->l = rec(n->l);
    m->r = rec(n->r);
    if (m->type) m->type = apply(m->type);
    if (m->jtype) m->jtype = apply(m->jtype);
    for (auto& [x, ty] : m->env) ty = apply(ty);
    return m;
  };
  return rec(d);
}

// Bounded instance search: every variable typed A -> B -> C suggests the
// iterator-shaped refinement A = B -> C, B = C. Subsets of these candidate
// unifications generate the simple-type instances the decoration stage also
// explores (the identity instance comes first).
std::vector<std::map<std::string, TypePtr>> instance_candidates(const SDPtr& deriv) {
  std::vector<TypePtr> shapes;
  std::function<void(const SDPtr&)> collect = [&](const SDPtr& n) {
    if (!n) return;
    collect(n->l);
    collect(n->r);
    if (n->kind == SKind::Ax && n->type->kind == TypeKind::Arrow &&
        n->type->b->kind == TypeKind::Arrow) {
      for (const auto& s : shapes)
        if (type_alpha_eq(s, n->type)) return;
      shapes.push_back(n->type);
    }
  };
  collect(deriv);
  if (shapes.size() > 8) shapes.resize(8);

  std::vector<std::map<std::string, TypePtr>> out;
  out.push_back({});  // the identity instance always runs
  // fold every candidate in greedily; skip the ones that break unifiability
  UnifyState u;
  for (const auto& T : shapes) {
    UnifyState save = u;
    try {
      u.unify(T->a, T->b);        // A = B -> C
      u.unify(T->b->a, T->b->b);  // B = C
    } catch (const type_error&) {
      u = save;
    }
  }
  std::map<std::string, TypePtr> sigma;
  std::function<void(const TypePtr&)> atoms = [&](const TypePtr& ty) {
    if (ty->kind == TypeKind::TVar) {
      TypePtr w = u.walk(ty);
      if (!type_alpha_eq(w, ty)) sigma[ty->name] = w;
      return;
    }
    atoms(ty->a);
    atoms(ty->b);
  };
  for (const auto& s : shapes) atoms(s);
  if (!sigma.empty()) out.push_back(std::move(sigma));
  return out;
}

std::vector<InferResult> infer_one_instance(const SDPtr& deriv, const InferOptions& opts);

}  // namespace

std::vector<InferResult> infer(const TermPtr& t, const InferOptions& opts) {
  PrincipalResult pr = principal_simple_type(t);
  std::vector<InferResult> out;
  for (const auto& sigma : instance_candidates(pr.deriv)) {
    SDPtr deriv = sigma.empty() ? pr.deriv : specialize_deriv(pr.deriv, sigma);
    std::vector<InferResult> found;
    if (sigma.empty()) {
      found = infer_one_instance(deriv, opts);
    } else {
      try {
        found = infer_one_instance(deriv, opts);
      } catch (const resource_error&) {
        continue;  // a refined instance beyond the caps is skipped
      }
    }
    for (auto& r : found) {
      bool fresh = true;
      for (const auto& prev : out)
        if (type_alpha_eq(prev.type, r.type)) {
          fresh = false;
          break;
        }
      if (fresh) out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {
std::vector<InferResult> infer_one_instance(const SDPtr& deriv, const InferOptions& opts) {
  AbstractDeriv ad = abstract_derivation(deriv);
  std::vector<uint64_t> sols =
      enumerate_solutions(ad.constraints, ad.supply.next, opts.param_cap);

  // group solutions by their stage-2 fingerprint (the banged applications and
  // abstractions plus every variable's decoration values); run the search
  // once per fingerprint, fewest marks first
  auto signature = [&](uint64_t phi, const BangDeriv& bd, int& marks) {
    std::ostringstream sig;
    std::function<void(const SDPtr&)> rec = [&](const SDPtr& n) {
      if (!n) return;
      rec(n->l);
      rec(n->r);
      if (n->kind == SKind::App) {
        bool b = bd.banged_apps.count(n.get()) > 0;
        if (b) ++marks;
        sig << (b ? 'A' : '.');
      }
      if (n->kind == SKind::Abs) {
        bool b = bd.banged_abs.count(n.get()) > 0;
        if (b) ++marks;
        sig << (b ? 'B' : '.');
        const auto& env = ad.envs.at(n->l.get());
        auto it = env.find(n->name);
        if (it != env.end()) {
          std::function<void(const ATypePtr&)> ms = [&](const ATypePtr& a) {
            sig << (disj_value(a->params, phi) ? '1' : '0');
            if (!a->atom) {
              ms(a->arg);
              ms(a->res);
            }
          };
          ms(it->second);
        }
      }
    };
    rec(ad.deriv);
    const auto& root_env = ad.envs.at(ad.deriv.get());
    for (const auto& [x, ty] : root_env) {
      std::function<void(const ATypePtr&)> ms = [&](const ATypePtr& a) {
        sig << (disj_value(a->params, phi) ? '1' : '0');
        if (!a->atom) {
          ms(a->arg);
          ms(a->res);
        }
      };
      sig << x << ':';
      ms(ty);
    }
    return sig.str();
  };

  struct Marking {
    uint64_t phi;
    int marks;
    std::string sig;
  };
  std::vector<Marking> markings;
  std::set<std::string> seen;
  for (uint64_t phi : sols) {
    auto checked = bang_check(ad, phi);
    if (std::holds_alternative<BangRejection>(checked)) continue;
    int marks = 0;
    std::string sig = signature(phi, std::get<BangDeriv>(checked), marks);
    if (seen.insert(sig).second) markings.push_back(Marking{phi, marks, std::move(sig)});
  }
  std::stable_sort(markings.begin(), markings.end(), [](const Marking& a, const Marking& b) {
    if (a.marks != b.marks) return a.marks < b.marks;
    return a.sig < b.sig;
  });
  if (markings.size() > opts.marking_cap) markings.resize(opts.marking_cap);

  std::vector<InferResult> out;
  for (const auto& m : markings) {
    auto checked = bang_check(ad, m.phi);
    std::vector<InferResult> found =
        place_paragraphs(ad, m.phi, std::get<BangDeriv>(checked), opts);
    for (auto& r : found) {
      bool fresh = true;
      for (const auto& prev : out)
        if (type_alpha_eq(prev.type, r.type)) {
          fresh = false;
          break;
        }
      if (fresh) out.push_back(std::move(r));
    }
  }
  return out;
}
}  // namespace

}  // namespace dlal
