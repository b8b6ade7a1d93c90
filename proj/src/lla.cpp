#include "dlal/lla.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace dlal {

LlaPtr l_var(std::string name) {
  return std::make_shared<LlaTerm>(LlaTerm{LlaKind::Var, std::move(name), nullptr, nullptr});
}
LlaPtr l_abs(std::string binder, LlaPtr body) {
  return std::make_shared<LlaTerm>(LlaTerm{LlaKind::Abs, std::move(binder), std::move(body), nullptr});
}
LlaPtr l_app(LlaPtr fun, LlaPtr arg) {
  return std::make_shared<LlaTerm>(LlaTerm{LlaKind::App, {}, std::move(fun), std::move(arg)});
}
LlaPtr l_bang(LlaPtr t) {
  return std::make_shared<LlaTerm>(LlaTerm{LlaKind::Bang, {}, std::move(t), nullptr});
}
LlaPtr l_par(LlaPtr t) {
  return std::make_shared<LlaTerm>(LlaTerm{LlaKind::Par, {}, std::move(t), nullptr});
}
LlaPtr l_let_bang(LlaPtr scrutinee, std::string binder, LlaPtr body) {
  return std::make_shared<LlaTerm>(
      LlaTerm{LlaKind::LetBang, std::move(binder), std::move(scrutinee), std::move(body)});
}
LlaPtr l_let_par(LlaPtr scrutinee, std::string binder, LlaPtr body) {
  return std::make_shared<LlaTerm>(
      LlaTerm{LlaKind::LetPar, std::move(binder), std::move(scrutinee), std::move(body)});
}

LlaPtr l_bang_abs(const std::string& binder, const LlaPtr& body) {
  std::set<std::string> avoid = lla_free_vars(body);
  avoid.insert(binder);
  std::string y = fresh_name(binder, avoid);
  return l_abs(binder, l_let_bang(l_var(binder), y, lla_substitute(body, binder, l_var(y))));
}

namespace {
// \x.let x be !y in t with x not free in t
bool is_bang_abs(const LlaPtr& t) {
  return t->kind == LlaKind::Abs && t->a->kind == LlaKind::LetBang &&
         t->a->a->kind == LlaKind::Var && t->a->a->name == t->name &&
         !lla_free_vars(t->a->b).count(t->name);
}
}  // namespace

std::size_t lla_size(const LlaPtr& t) {
  switch (t->kind) {
    case LlaKind::Var: return 1;
    case LlaKind::Abs:
      if (is_bang_abs(t)) return lla_size(t->a->b) + 1;
      return lla_size(t->a) + 1;
    case LlaKind::App: return lla_size(t->a) + lla_size(t->b) + 1;
    case LlaKind::Bang:
    case LlaKind::Par: return lla_size(t->a);
    case LlaKind::LetBang:
    case LlaKind::LetPar: return lla_size(t->a) + lla_size(t->b) + 1;
  }
  return 0;
}

std::size_t lla_depth(const LlaPtr& t) {
  switch (t->kind) {
    case LlaKind::Var: return 0;
    case LlaKind::Abs: return lla_depth(t->a);
    case LlaKind::App:
    case LlaKind::LetBang:
    case LlaKind::LetPar:
      return std::max(lla_depth(t->a), lla_depth(t->b));
    case LlaKind::Bang:
    case LlaKind::Par: return lla_depth(t->a) + 1;
  }
  return 0;
}

std::set<std::string> lla_free_vars(const LlaPtr& t) {
  std::set<std::string> out;
  std::function<void(const LlaPtr&, std::set<std::string>&)> rec =
      [&](const LlaPtr& s, std::set<std::string>& bound) {
        switch (s->kind) {
          case LlaKind::Var:
            if (!bound.count(s->name)) out.insert(s->name);
            return;
          case LlaKind::Abs: {
            bool fresh = bound.insert(s->name).second;
            rec(s->a, bound);
            if (fresh) bound.erase(s->name);
            return;
          }
          case LlaKind::App:
            rec(s->a, bound);
            rec(s->b, bound);
            return;
          case LlaKind::Bang:
          case LlaKind::Par:
            rec(s->a, bound);
            return;
          case LlaKind::LetBang:
          case LlaKind::LetPar: {
            rec(s->a, bound);
            bool fresh = bound.insert(s->name).second;
            rec(s->b, bound);
            if (fresh) bound.erase(s->name);
            return;
          }
        }
      };
  std::set<std::string> bound;
  rec(t, bound);
  return out;
}

LlaPtr lla_substitute(const LlaPtr& t, const std::string& x, const LlaPtr& u) {
  switch (t->kind) {
    case LlaKind::Var:
      return t->name == x ? u : t;
    case LlaKind::Abs: {
      if (t->name == x) return t;
      if (!lla_free_vars(t->a).count(x)) return t;
      if (lla_free_vars(u).count(t->name)) {
        std::set<std::string> avoid = lla_free_vars(u);
        auto fv = lla_free_vars(t->a);
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(x);
        std::string y = fresh_name(t->name, avoid);
        LlaPtr body = lla_substitute(t->a, t->name, l_var(y));
        return l_abs(y, lla_substitute(body, x, u));
      }
      return l_abs(t->name, lla_substitute(t->a, x, u));
    }
    case LlaKind::App:
      return l_app(lla_substitute(t->a, x, u), lla_substitute(t->b, x, u));
    case LlaKind::Bang:
      return l_bang(lla_substitute(t->a, x, u));
    case LlaKind::Par:
      return l_par(lla_substitute(t->a, x, u));
    case LlaKind::LetBang:
    case LlaKind::LetPar: {
      LlaPtr scrut = lla_substitute(t->a, x, u);
      if (t->name == x) {
        return t->kind == LlaKind::LetBang ? l_let_bang(scrut, t->name, t->b)
                                           : l_let_par(scrut, t->name, t->b);
      }
      LlaPtr body = t->b;
      std::string binder = t->name;
      if (lla_free_vars(body).count(x) && lla_free_vars(u).count(binder)) {
        std::set<std::string> avoid = lla_free_vars(u);
        auto fv = lla_free_vars(body);
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(x);
        binder = fresh_name(binder, avoid);
        body = lla_substitute(body, t->name, l_var(binder));
      }
      body = lla_substitute(body, x, u);
      return t->kind == LlaKind::LetBang ? l_let_bang(scrut, binder, body)
                                         : l_let_par(scrut, binder, body);
    }
  }
  return t;
}

namespace {
bool lla_eq_rec(const LlaPtr& s, const LlaPtr& t, std::map<std::string, int>& ls,
                std::map<std::string, int>& lt, int depth) {
  if (s->kind != t->kind) return false;
  auto bind = [&](const std::string& ns, const std::string& nt, const LlaPtr& bs,
                  const LlaPtr& bt) {
    auto olds = ls.count(ns) ? std::optional<int>(ls[ns]) : std::nullopt;
    auto oldt = lt.count(nt) ? std::optional<int>(lt[nt]) : std::nullopt;
    ls[ns] = depth;
    lt[nt] = depth;
    bool r = lla_eq_rec(bs, bt, ls, lt, depth + 1);
    if (olds) ls[ns] = *olds; else ls.erase(ns);
    if (oldt) lt[nt] = *oldt; else lt.erase(nt);
    return r;
  };
  switch (s->kind) {
    case LlaKind::Var: {
      auto is = ls.find(s->name);
      auto it = lt.find(t->name);
      if ((is == ls.end()) != (it == lt.end())) return false;
      if (is == ls.end()) return s->name == t->name;
      return is->second == it->second;
    }
    case LlaKind::Abs:
      return bind(s->name, t->name, s->a, t->a);
    case LlaKind::App:
      return lla_eq_rec(s->a, t->a, ls, lt, depth) && lla_eq_rec(s->b, t->b, ls, lt, depth);
    case LlaKind::Bang:
    case LlaKind::Par:
      return lla_eq_rec(s->a, t->a, ls, lt, depth);
    case LlaKind::LetBang:
    case LlaKind::LetPar:
      return lla_eq_rec(s->a, t->a, ls, lt, depth) && bind(s->name, t->name, s->b, t->b);
  }
  return false;
}
}  // namespace

bool lla_alpha_eq(const LlaPtr& s, const LlaPtr& t) {
  std::map<std::string, int> ls, lt;
  return lla_eq_rec(s, t, ls, lt, 0);
}

TermPtr erase(const LlaPtr& t) {
  switch (t->kind) {
    case LlaKind::Var: return mk_var(t->name);
    case LlaKind::Abs: return mk_abs(t->name, erase(t->a));
    case LlaKind::App: return mk_app(erase(t->a), erase(t->b));
    case LlaKind::Bang:
    case LlaKind::Par: return erase(t->a);
    case LlaKind::LetBang:
    case LlaKind::LetPar:
      return substitute(erase(t->b), t->name, erase(t->a));
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Printing / parsing
// ---------------------------------------------------------------------------

namespace {
void print_lla_rec(const LlaPtr& t, std::ostream& os, bool fun_pos, bool arg_pos) {
  switch (t->kind) {
    case LlaKind::Var: os << t->name; return;
    case LlaKind::Abs: {
      bool parens = fun_pos || arg_pos;
      if (parens) os << '(';
      os << '\\' << t->name << '.';
      print_lla_rec(t->a, os, false, false);
      if (parens) os << ')';
      return;
    }
    case LlaKind::App: {
      if (arg_pos) os << '(';
      print_lla_rec(t->a, os, true, false);
      os << ' ';
      print_lla_rec(t->b, os, false, true);
      if (arg_pos) os << ')';
      return;
    }
    case LlaKind::Bang:
    case LlaKind::Par:
      os << (t->kind == LlaKind::Bang ? '!' : '$');
      print_lla_rec(t->a, os, true, true);
      return;
    case LlaKind::LetBang:
    case LlaKind::LetPar: {
      bool parens = fun_pos || arg_pos;
      if (parens) os << '(';
      os << "let ";
      print_lla_rec(t->a, os, false, false);
      os << " be " << (t->kind == LlaKind::LetBang ? '!' : '$') << t->name << " in ";
      print_lla_rec(t->b, os, false, false);
      if (parens) os << ')';
      return;
    }
  }
}

struct LlaParser {
  const std::string& s;
  std::size_t pos = 0;
  explicit LlaParser(const std::string& src) : s(src) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  bool peek_keyword(const std::string& kw) {
    skip_ws();
    if (s.compare(pos, kw.size(), kw) != 0) return false;
    std::size_t end = pos + kw.size();
    return end >= s.size() || !ident_char(s[end]);
  }
  bool try_keyword(const std::string& kw) {
    if (!peek_keyword(kw)) return false;
    pos += kw.size();
    return true;
  }
  std::string ident() {
    skip_ws();
    if (pos >= s.size() || !ident_start(s[pos]))
      throw parse_error("expected identifier", pos);
    std::size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    std::string name = s.substr(start, pos - start);
    if (name == "let" || name == "be" || name == "in")
      throw parse_error("reserved word used as identifier", start);
    return name;
  }

  LlaPtr atom() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("unexpected end of input", pos);
    char c = s[pos];
    if (c == '(') {
      ++pos;
      LlaPtr t = term();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') throw parse_error("expected ')'", pos);
      ++pos;
      return t;
    }
    if (c == '!') {
      ++pos;
      return l_bang(atom());
    }
    if (c == '$') {
      ++pos;
      return l_par(atom());
    }
    if (c == '\\') return abstraction();
    if (peek_keyword("let")) return let_term();
    if (ident_start(c)) return l_var(ident());
    throw parse_error(std::string("unexpected character '") + c + "'", pos);
  }

  LlaPtr abstraction() {
    ++pos;  // backslash
    std::string x = ident();
    skip_ws();
    if (pos >= s.size() || s[pos] != '.') throw parse_error("expected '.'", pos);
    ++pos;
    return l_abs(x, term());
  }

  LlaPtr let_term() {
    try_keyword("let");
    LlaPtr scrut = term_until_be();
    if (!try_keyword("be")) throw parse_error("expected 'be'", pos);
    skip_ws();
    if (pos >= s.size() || (s[pos] != '!' && s[pos] != '$'))
      throw parse_error("expected '!' or '$' after 'be'", pos);
    char kind = s[pos];
    ++pos;
    std::string x = ident();
    if (!try_keyword("in")) throw parse_error("expected 'in'", pos);
    LlaPtr body = term();
    return kind == '!' ? l_let_bang(scrut, x, body) : l_let_par(scrut, x, body);
  }

  LlaPtr term_until_be() {
    LlaPtr t = atom();
    for (;;) {
      skip_ws();
      if (pos >= s.size() || peek_keyword("be")) break;
      char c = s[pos];
      if (c == '(' || c == '!' || c == '$' || c == '\\' || ident_start(c)) {
        t = l_app(t, atom());
        continue;
      }
      break;
    }
    return t;
  }

  LlaPtr term() {
    skip_ws();
    if (pos < s.size() && s[pos] == '\\') return abstraction();
    if (peek_keyword("let")) return let_term();
    LlaPtr t = atom();
    for (;;) {
      skip_ws();
      if (pos >= s.size()) break;
      char c = s[pos];
      if (c == '\\') {
        t = l_app(t, abstraction());
        break;
      }
      if (peek_keyword("let")) {
        t = l_app(t, let_term());
        break;
      }
      if (peek_keyword("be") || peek_keyword("in")) break;
      if (c == '(' || c == '!' || c == '$' || ident_start(c)) {
        t = l_app(t, atom());
        continue;
      }
      break;
    }
    return t;
  }
};
}  // namespace

std::string print_lla(const LlaPtr& t) {
  std::ostringstream os;
  print_lla_rec(t, os, false, false);
  return os.str();
}

LlaPtr parse_lla(const std::string& text) {
  LlaParser p(text);
  LlaPtr t = p.term();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input", p.pos);
  return t;
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

namespace {
LlaPtr lla_subterm(const LlaPtr& t, const LlaPath& p, std::size_t i) {
  if (i == p.size()) return t;
  if (!t) return nullptr;
  switch (p[i]) {
    case LlaStep::Fun:
      return t->kind == LlaKind::App ? lla_subterm(t->a, p, i + 1) : nullptr;
    case LlaStep::Arg:
      return t->kind == LlaKind::App ? lla_subterm(t->b, p, i + 1) : nullptr;
    case LlaStep::Body:
      if (t->kind == LlaKind::Abs) return lla_subterm(t->a, p, i + 1);
      if (t->kind == LlaKind::LetBang || t->kind == LlaKind::LetPar)
        return lla_subterm(t->b, p, i + 1);
      return nullptr;
    case LlaStep::Scrut:
      if (t->kind == LlaKind::Bang || t->kind == LlaKind::Par ||
          t->kind == LlaKind::LetBang || t->kind == LlaKind::LetPar)
        return lla_subterm(t->a, p, i + 1);
      return nullptr;
  }
  return nullptr;
}

LlaPtr lla_rebuild(const LlaPtr& t, const LlaPath& p, std::size_t i, const LlaPtr& sub) {
  if (i == p.size()) return sub;
  switch (p[i]) {
    case LlaStep::Fun: return l_app(lla_rebuild(t->a, p, i + 1, sub), t->b);
    case LlaStep::Arg: return l_app(t->a, lla_rebuild(t->b, p, i + 1, sub));
    case LlaStep::Body:
      if (t->kind == LlaKind::Abs) return l_abs(t->name, lla_rebuild(t->a, p, i + 1, sub));
      if (t->kind == LlaKind::LetBang)
        return l_let_bang(t->a, t->name, lla_rebuild(t->b, p, i + 1, sub));
      return l_let_par(t->a, t->name, lla_rebuild(t->b, p, i + 1, sub));
    case LlaStep::Scrut:
      if (t->kind == LlaKind::Bang) return l_bang(lla_rebuild(t->a, p, i + 1, sub));
      if (t->kind == LlaKind::Par) return l_par(lla_rebuild(t->a, p, i + 1, sub));
      if (t->kind == LlaKind::LetBang)
        return l_let_bang(lla_rebuild(t->a, p, i + 1, sub), t->name, t->b);
      return l_let_par(lla_rebuild(t->a, p, i + 1, sub), t->name, t->b);
  }
  return sub;
}

LlaPtr fire_rule(const LlaPtr& s, LlaRule rule) {
  switch (rule) {
    case LlaRule::Beta:
      if (s->kind == LlaKind::App && s->a->kind == LlaKind::Abs)
        return lla_substitute(s->a->a, s->a->name, s->b);
      break;
    case LlaRule::Par:
      if (s->kind == LlaKind::LetPar && s->a->kind == LlaKind::Par)
        return lla_substitute(s->b, s->name, s->a->a);
      break;
    case LlaRule::Bang:
      if (s->kind == LlaKind::LetBang && s->a->kind == LlaKind::Bang)
        return lla_substitute(s->b, s->name, s->a->a);
      break;
    case LlaRule::Com1:
      if (s->kind == LlaKind::App &&
          (s->a->kind == LlaKind::LetBang || s->a->kind == LlaKind::LetPar)) {
        const LlaPtr& let = s->a;
        LlaPtr inner = l_app(let->b, s->b);
        return let->kind == LlaKind::LetBang ? l_let_bang(let->a, let->name, inner)
                                             : l_let_par(let->a, let->name, inner);
      }
      break;
    case LlaRule::Com2:
      if ((s->kind == LlaKind::LetBang || s->kind == LlaKind::LetPar) &&
          (s->a->kind == LlaKind::LetBang || s->a->kind == LlaKind::LetPar)) {
        const LlaPtr& inner_let = s->a;
        LlaPtr new_inner = s->kind == LlaKind::LetBang
                               ? l_let_bang(inner_let->b, s->name, s->b)
                               : l_let_par(inner_let->b, s->name, s->b);
        return inner_let->kind == LlaKind::LetBang
                   ? l_let_bang(inner_let->a, inner_let->name, new_inner)
                   : l_let_par(inner_let->a, inner_let->name, new_inner);
      }
      break;
  }
  return nullptr;
}
}  // namespace

LlaPtr lla_step(const LlaPtr& t, LlaRule rule, const LlaPath& path) {
  LlaPtr s = lla_subterm(t, path, 0);
  if (!s) throw invariant_violation("lla_step: bad path");
  LlaPtr r = fire_rule(s, rule);
  if (!r) throw invariant_violation("lla_step: rule does not apply at the path");
  return lla_rebuild(t, path, 0, r);
}

namespace {
// (com2) moves v under x's binder: rename x first if v mentions it
LlaPtr com2_safe(const LlaPtr& s) {
  // s = let (let u be #x in t) be #y in v
  LlaPtr inner = s->a;
  std::string x = inner->name;
  // x must not capture in v
  if (lla_free_vars(s->b).count(x)) {
    std::set<std::string> avoid = lla_free_vars(s->b);
    auto fv = lla_free_vars(inner->b);
    avoid.insert(fv.begin(), fv.end());
    std::string nx = fresh_name(x, avoid);
    LlaPtr nt = lla_substitute(inner->b, x, l_var(nx));
    LlaPtr ninner = inner->kind == LlaKind::LetBang ? l_let_bang(inner->a, nx, nt)
                                                    : l_let_par(inner->a, nx, nt);
    return s->kind == LlaKind::LetBang ? l_let_bang(ninner, s->name, s->b)
                                       : l_let_par(ninner, s->name, s->b);
  }
  return s;
}

LlaPtr com1_safe(const LlaPtr& s) {
  // s = (let u be #x in t) v : x must not capture in v
  LlaPtr let = s->a;
  if (lla_free_vars(s->b).count(let->name)) {
    std::set<std::string> avoid = lla_free_vars(s->b);
    auto fv = lla_free_vars(let->b);
    avoid.insert(fv.begin(), fv.end());
    std::string nx = fresh_name(let->name, avoid);
    LlaPtr nt = lla_substitute(let->b, let->name, l_var(nx));
    LlaPtr nlet = let->kind == LlaKind::LetBang ? l_let_bang(let->a, nx, nt)
                                                : l_let_par(let->a, nx, nt);
    return l_app(nlet, s->b);
  }
  return s;
}

LlaPtr saturate_rec(const LlaPtr& t, std::size_t& steps) {
  LlaPtr cur = t;
  switch (cur->kind) {
    case LlaKind::Var: return cur;
    case LlaKind::Abs: {
      LlaPtr b = saturate_rec(cur->a, steps);
      cur = b == cur->a ? cur : l_abs(cur->name, b);
      return cur;
    }
    case LlaKind::Bang: {
      LlaPtr b = saturate_rec(cur->a, steps);
      return b == cur->a ? cur : l_bang(b);
    }
    case LlaKind::Par: {
      LlaPtr b = saturate_rec(cur->a, steps);
      return b == cur->a ? cur : l_par(b);
    }
    case LlaKind::App: {
      LlaPtr f = saturate_rec(cur->a, steps);
      LlaPtr a = saturate_rec(cur->b, steps);
      cur = (f == cur->a && a == cur->b) ? cur : l_app(f, a);
      if (cur->a->kind == LlaKind::LetBang || cur->a->kind == LlaKind::LetPar) {
        LlaPtr safe = com1_safe(cur);
        LlaPtr r = fire_rule(safe, LlaRule::Com1);
        ++steps;
        return saturate_rec(r, steps);
      }
      return cur;
    }
    case LlaKind::LetBang:
    case LlaKind::LetPar: {
      LlaPtr scrut = saturate_rec(cur->a, steps);
      LlaPtr body = saturate_rec(cur->b, steps);
      cur = (scrut == cur->a && body == cur->b)
                ? cur
                : (cur->kind == LlaKind::LetBang ? l_let_bang(scrut, cur->name, body)
                                                 : l_let_par(scrut, cur->name, body));
      if (cur->kind == LlaKind::LetPar && cur->a->kind == LlaKind::Par) {
        LlaPtr r = fire_rule(cur, LlaRule::Par);
        ++steps;
        return saturate_rec(r, steps);
      }
      if (cur->kind == LlaKind::LetBang && cur->a->kind == LlaKind::Bang) {
        LlaPtr r = fire_rule(cur, LlaRule::Bang);
        ++steps;
        return saturate_rec(r, steps);
      }
      if (cur->a->kind == LlaKind::LetBang || cur->a->kind == LlaKind::LetPar) {
        LlaPtr safe = com2_safe(cur);
        LlaPtr r = fire_rule(safe, LlaRule::Com2);
        ++steps;
        return saturate_rec(r, steps);
      }
      return cur;
    }
  }
  return cur;
}
}  // namespace

bool is_scn(const LlaPtr& t) {
  switch (t->kind) {
    case LlaKind::Var: return true;
    case LlaKind::Abs:
    case LlaKind::Bang:
    case LlaKind::Par: return is_scn(t->a);
    case LlaKind::App:
      if (t->a->kind == LlaKind::LetBang || t->a->kind == LlaKind::LetPar) return false;
      return is_scn(t->a) && is_scn(t->b);
    case LlaKind::LetBang:
      if (t->a->kind == LlaKind::Bang || t->a->kind == LlaKind::LetBang ||
          t->a->kind == LlaKind::LetPar)
        return false;
      return is_scn(t->a) && is_scn(t->b);
    case LlaKind::LetPar:
      if (t->a->kind == LlaKind::Par || t->a->kind == LlaKind::LetBang ||
          t->a->kind == LlaKind::LetPar)
        return false;
      return is_scn(t->a) && is_scn(t->b);
  }
  return true;
}

std::pair<LlaPtr, std::size_t> saturate(const LlaPtr& t) {
  std::size_t steps = 0;
  LlaPtr r = saturate_rec(t, steps);
  return {r, steps};
}

// ---------------------------------------------------------------------------
// Embedding (Figure 7)
// ---------------------------------------------------------------------------

namespace {
LlaPtr embed_rec(const NdlalCheckedPtr& c, std::set<std::string>& used) {
  const DerivPtr& d = c->node;
  switch (d->rule) {
    case Rule::Id:
      return l_var(*d->params.binder);
    case Rule::LinI:
      return l_abs(*d->params.binder, embed_rec(c->premises[0], used));
    case Rule::BangI: {
      LlaPtr body = embed_rec(c->premises[0], used);
      const std::string& x = *d->params.binder;
      std::string y = fresh_name(x, used);
      used.insert(y);
      return l_abs(x, l_let_bang(l_var(x), y, lla_substitute(body, x, l_var(y))));
    }
    case Rule::LinE:
      return l_app(embed_rec(c->premises[0], used), embed_rec(c->premises[1], used));
    case Rule::BangE:
      return l_app(embed_rec(c->premises[0], used), l_bang(embed_rec(c->premises[1], used)));
    case Rule::Weak:
    case Rule::ForallI:
    case Rule::ForallE:
      return embed_rec(c->premises[0], used);
    case Rule::Cntr: {
      const auto& [x1, x2, x] = *d->params.merged;
      LlaPtr p = embed_rec(c->premises[0], used);
      return lla_substitute(lla_substitute(p, x1, l_var(x)), x2, l_var(x));
    }
    case Rule::ParI:
      return l_par(embed_rec(c->premises[0], used));
    case Rule::ParE:
      return l_let_par(embed_rec(c->premises[0], used), *d->params.binder,
                       embed_rec(c->premises[1], used));
    default:
      throw invariant_violation("embed: not an NDLAL rule");
  }
}
}  // namespace

LlaPtr embed(const NdlalCheckedPtr& d) {
  std::set<std::string> used = deriv_names(d->node);
  LlaPtr t = embed_rec(d, used);
  if (!alpha_eq(erase(t), d->subject))
    throw invariant_violation("embed: erasure does not match the subject");
  return t;
}

// ---------------------------------------------------------------------------
// Lemma 30 simulation
// ---------------------------------------------------------------------------

namespace {

// Mirrors a beta-redex path of erase(t) into t and fires (beta) there.
// The term must be ($,!,com)-normal.
LlaPtr mirror_fire(const LlaPtr& t, const RedexPath& p, std::size_t i, bool& ok) {
  if (!ok) return t;
  switch (t->kind) {
    case LlaKind::Var:
      ok = false;
      return t;
    case LlaKind::Abs: {
      if (i == p.size() || p[i] != PathStep::Body) {
        ok = false;
        return t;
      }
      LlaPtr b = mirror_fire(t->a, p, i + 1, ok);
      return l_abs(t->name, b);
    }
    case LlaKind::Bang: {
      LlaPtr b = mirror_fire(t->a, p, i, ok);
      return l_bang(b);
    }
    case LlaKind::Par: {
      LlaPtr b = mirror_fire(t->a, p, i, ok);
      return l_par(b);
    }
    case LlaKind::App: {
      if (i == p.size()) {
        // the redex: the function must be a structural abstraction
        if (t->a->kind != LlaKind::Abs) {
          ok = false;
          return t;
        }
        return lla_substitute(t->a->a, t->a->name, t->b);
      }
      if (p[i] == PathStep::Fun) {
        LlaPtr f = mirror_fire(t->a, p, i + 1, ok);
        return l_app(f, t->b);
      }
      if (p[i] == PathStep::Arg) {
        LlaPtr a = mirror_fire(t->b, p, i + 1, ok);
        return l_app(t->a, a);
      }
      ok = false;
      return t;
    }
    case LlaKind::LetBang:
    case LlaKind::LetPar: {
      // erase(t) = erase(body)[erase(scrut)/x]; walk the body erasure
      TermPtr be = erase(t->b);
      TermPtr cur = be;
      std::size_t k = i;
      bool shadowed = false;
      bool into_scrut = false;
      for (;;) {
        if (!shadowed && cur->kind == TermKind::Var && cur->name == t->name) {
          into_scrut = true;
          break;
        }
        if (k == p.size()) break;
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
      if (into_scrut) {
        if (free_occurrences(t->name, be) > 1) {
          // a shared scrutinee cannot host a beta redex in a typable term
          ok = false;
          return t;
        }
        LlaPtr ns = mirror_fire(t->a, p, k, ok);
        return t->kind == LlaKind::LetBang ? l_let_bang(ns, t->name, t->b)
                                           : l_let_par(ns, t->name, t->b);
      }
      LlaPtr nb = mirror_fire(t->b, p, i, ok);
      return t->kind == LlaKind::LetBang ? l_let_bang(t->a, t->name, nb)
                                         : l_let_par(t->a, t->name, nb);
    }
  }
  ok = false;
  return t;
}

void lemma29_rec(const LlaPtr& t, std::vector<std::string>& out) {
  switch (t->kind) {
    case LlaKind::Var: return;
    case LlaKind::Abs:
    case LlaKind::Bang:
    case LlaKind::Par:
      lemma29_rec(t->a, out);
      return;
    case LlaKind::App:
      if (t->a->kind != LlaKind::Var && t->a->kind != LlaKind::App &&
          t->a->kind != LlaKind::Abs)
        out.push_back("application head is " + print_lla(t->a));
      lemma29_rec(t->a, out);
      lemma29_rec(t->b, out);
      return;
    case LlaKind::LetPar:
      if (t->a->kind != LlaKind::Var && t->a->kind != LlaKind::App)
        out.push_back("let-$ scrutinee is " + print_lla(t->a));
      lemma29_rec(t->a, out);
      lemma29_rec(t->b, out);
      return;
    case LlaKind::LetBang:
      if (t->a->kind != LlaKind::Var)
        out.push_back("let-! scrutinee is " + print_lla(t->a));
      lemma29_rec(t->a, out);
      lemma29_rec(t->b, out);
      return;
  }
}

}  // namespace

std::pair<LlaPtr, std::size_t> simulate_step(const LlaPtr& t, const RedexPath& redex) {
  if (!is_scn(t)) throw invariant_violation("simulate_step: term is not ($,!,com)-normal");
  if (!is_redex_at(erase(t), redex))
    throw invariant_violation("simulate_step: path is not a redex of the erasure");
  bool ok = true;
  LlaPtr fired = mirror_fire(t, redex, 0, ok);
  if (!ok) throw invariant_violation("simulate_step: redex not locatable in the lambda-LA term");
  auto [sat, steps] = saturate(fired);
  return {sat, steps + 1};
}

std::vector<std::string> lemma29_violations(const LlaPtr& t) {
  std::vector<std::string> out;
  lemma29_rec(t, out);
  return out;
}

}  // namespace dlal
