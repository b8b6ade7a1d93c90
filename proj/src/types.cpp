#include "dlal/types.hpp"

#include <cctype>
#include <sstream>

namespace dlal {

TypePtr t_var(std::string a) {
  return std::make_shared<Type>(Type{TypeKind::TVar, std::move(a), nullptr, nullptr});
}
TypePtr t_lin(TypePtr a, TypePtr b) {
  return std::make_shared<Type>(Type{TypeKind::Lin, {}, std::move(a), std::move(b)});
}
TypePtr t_bang_arrow(TypePtr a, TypePtr b) {
  return std::make_shared<Type>(Type{TypeKind::Bang, {}, std::move(a), std::move(b)});
}
TypePtr t_par(TypePtr a) {
  return std::make_shared<Type>(Type{TypeKind::Par, {}, std::move(a), nullptr});
}
TypePtr t_ofcourse(TypePtr a) {
  return std::make_shared<Type>(Type{TypeKind::OfCourse, {}, std::move(a), nullptr});
}
TypePtr t_forall(std::string a, TypePtr body) {
  return std::make_shared<Type>(Type{TypeKind::Forall, std::move(a), std::move(body), nullptr});
}
TypePtr t_arrow(TypePtr a, TypePtr b) {
  return std::make_shared<Type>(Type{TypeKind::Arrow, {}, std::move(a), std::move(b)});
}
TypePtr t_par_n(TypePtr a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a = t_par(a);
  return a;
}

namespace {
bool type_eq_rec(const TypePtr& s, const TypePtr& t, std::map<std::string, int>& ls,
                 std::map<std::string, int>& lt, int depth) {
  if (s->kind != t->kind) return false;
  switch (s->kind) {
    case TypeKind::TVar: {
      auto is = ls.find(s->name);
      auto it = lt.find(t->name);
      if ((is == ls.end()) != (it == lt.end())) return false;
      if (is == ls.end()) return s->name == t->name;
      return is->second == it->second;
    }
    case TypeKind::Forall: {
      auto olds = ls.count(s->name) ? std::optional<int>(ls[s->name]) : std::nullopt;
      auto oldt = lt.count(t->name) ? std::optional<int>(lt[t->name]) : std::nullopt;
      ls[s->name] = depth;
      lt[t->name] = depth;
      bool r = type_eq_rec(s->a, t->a, ls, lt, depth + 1);
      if (olds) ls[s->name] = *olds; else ls.erase(s->name);
      if (oldt) lt[t->name] = *oldt; else lt.erase(t->name);
      return r;
    }
    case TypeKind::Par:
    case TypeKind::OfCourse:
      return type_eq_rec(s->a, t->a, ls, lt, depth);
    default:
      return type_eq_rec(s->a, t->a, ls, lt, depth) &&
             type_eq_rec(s->b, t->b, ls, lt, depth);
  }
}

void collect_ftv(const TypePtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case TypeKind::TVar:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case TypeKind::Forall: {
      bool fresh = bound.insert(t->name).second;
      collect_ftv(t->a, bound, out);
      if (fresh) bound.erase(t->name);
      return;
    }
    case TypeKind::Par:
    case TypeKind::OfCourse:
      collect_ftv(t->a, bound, out);
      return;
    default:
      collect_ftv(t->a, bound, out);
      collect_ftv(t->b, bound, out);
      return;
  }
}
}  // namespace

bool type_alpha_eq(const TypePtr& s, const TypePtr& t) {
  std::map<std::string, int> ls, lt;
  return type_eq_rec(s, t, ls, lt, 0);
}

std::set<std::string> free_type_vars(const TypePtr& t) {
  std::set<std::string> bound, out;
  collect_ftv(t, bound, out);
  return out;
}

bool is_dlal_type(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::TVar: return true;
    case TypeKind::Lin:
    case TypeKind::Bang: return is_dlal_type(t->a) && is_dlal_type(t->b);
    case TypeKind::Par: return is_dlal_type(t->a);
    case TypeKind::Forall: return is_dlal_type(t->a);
    default: return false;
  }
}

bool is_lal_type(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::TVar: return true;
    case TypeKind::Lin: return is_lal_type(t->a) && is_lal_type(t->b);
    case TypeKind::Par:
    case TypeKind::OfCourse: return is_lal_type(t->a);
    case TypeKind::Forall: return is_lal_type(t->a);
    default: return false;
  }
}

bool is_simple_type(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::TVar: return true;
    case TypeKind::Arrow: return is_simple_type(t->a) && is_simple_type(t->b);
    default: return false;
  }
}

bool is_quantifier_free(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::TVar: return true;
    case TypeKind::Forall: return false;
    case TypeKind::Par:
    case TypeKind::OfCourse: return is_quantifier_free(t->a);
    default: return is_quantifier_free(t->a) && is_quantifier_free(t->b);
  }
}

TypePtr type_substitute(const TypePtr& a, const std::string& alpha, const TypePtr& b) {
  switch (a->kind) {
    case TypeKind::TVar:
      return a->name == alpha ? b : a;
    case TypeKind::Forall: {
      if (a->name == alpha) return a;
      if (!free_type_vars(a->a).count(alpha)) return a;
      if (free_type_vars(b).count(a->name)) {
        std::set<std::string> avoid = free_type_vars(b);
        auto fv = free_type_vars(a->a);
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(alpha);
        std::string beta = fresh_name(a->name, avoid);
        TypePtr body = type_substitute(a->a, a->name, t_var(beta));
        return t_forall(beta, type_substitute(body, alpha, b));
      }
      return t_forall(a->name, type_substitute(a->a, alpha, b));
    }
    case TypeKind::Par:
      return t_par(type_substitute(a->a, alpha, b));
    case TypeKind::OfCourse:
      return t_ofcourse(type_substitute(a->a, alpha, b));
    case TypeKind::Lin:
      return t_lin(type_substitute(a->a, alpha, b), type_substitute(a->b, alpha, b));
    case TypeKind::Bang:
      return t_bang_arrow(type_substitute(a->a, alpha, b), type_substitute(a->b, alpha, b));
    case TypeKind::Arrow:
      return t_arrow(type_substitute(a->a, alpha, b), type_substitute(a->b, alpha, b));
  }
  return a;
}

TypePtr star_translate(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::TVar: return a;
    case TypeKind::Lin: return t_lin(star_translate(a->a), star_translate(a->b));
    case TypeKind::Bang: return t_lin(t_ofcourse(star_translate(a->a)), star_translate(a->b));
    case TypeKind::Par: return t_par(star_translate(a->a));
    case TypeKind::Forall: return t_forall(a->name, star_translate(a->a));
    default:
      throw invariant_violation("star_translate: not a DLAL type");
  }
}

std::optional<TypePtr> in_dlal_star(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::TVar: return a;
    case TypeKind::OfCourse: return std::nullopt;  // bare ! has no preimage
    case TypeKind::Par: {
      auto p = in_dlal_star(a->a);
      if (!p) return std::nullopt;
      return t_par(*p);
    }
    case TypeKind::Forall: {
      auto p = in_dlal_star(a->a);
      if (!p) return std::nullopt;
      return t_forall(a->name, *p);
    }
    case TypeKind::Lin: {
      auto pb = in_dlal_star(a->b);
      if (!pb) return std::nullopt;
      if (a->a->kind == TypeKind::OfCourse) {
        auto pa = in_dlal_star(a->a->a);
        if (!pa) return std::nullopt;
        return t_bang_arrow(*pa, *pb);
      }
      auto pa = in_dlal_star(a->a);
      if (!pa) return std::nullopt;
      return t_lin(*pa, *pb);
    }
    default:
      return std::nullopt;
  }
}

TypePtr erase_to_simple(const TypePtr& a) {
  if (!is_quantifier_free(a))
    throw invariant_violation("erase_to_simple: quantifier present");
  switch (a->kind) {
    case TypeKind::TVar: return a;
    case TypeKind::Par: return erase_to_simple(a->a);
    case TypeKind::Lin:
    case TypeKind::Bang:
      return t_arrow(erase_to_simple(a->a), erase_to_simple(a->b));
    default:
      throw invariant_violation("erase_to_simple: not a DLAL type");
  }
}

TypePtr lal_erase_to_simple(const TypePtr& a) {
  if (!is_quantifier_free(a))
    throw invariant_violation("lal_erase_to_simple: quantifier present");
  switch (a->kind) {
    case TypeKind::TVar: return a;
    case TypeKind::Par:
    case TypeKind::OfCourse: return lal_erase_to_simple(a->a);
    case TypeKind::Lin:
      return t_arrow(lal_erase_to_simple(a->a), lal_erase_to_simple(a->b));
    default:
      throw invariant_violation("lal_erase_to_simple: not a LAL type");
  }
}

// ---------------------------------------------------------------------------
// Parsing / printing
// ---------------------------------------------------------------------------

namespace {
struct TypeParser {
  const std::string& s;
  std::size_t pos = 0;
  bool lal;  // accept ! and reject =>, or the converse

  TypeParser(const std::string& src, bool lal_mode) : s(src), lal(lal_mode) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  std::string ident() {
    skip_ws();
    if (pos >= s.size() || !ident_start(s[pos]))
      throw parse_error("expected type identifier", pos);
    std::size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }
  bool try_keyword(const std::string& kw) {
    skip_ws();
    std::size_t save = pos;
    if (s.compare(pos, kw.size(), kw) != 0) return false;
    std::size_t end = pos + kw.size();
    if (end < s.size() && ident_char(s[end])) return false;
    pos = end;
    (void)save;
    return true;
  }

  TypePtr atom() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("unexpected end of type", pos);
    char c = s[pos];
    if (c == '(') {
      ++pos;
      TypePtr t = type();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') throw parse_error("expected ')'", pos);
      ++pos;
      return t;
    }
    if (c == '$') {
      ++pos;
      return t_par(atom());
    }
    if (c == '!') {
      if (!lal) throw parse_error("'!' is not a DLAL connective", pos);
      ++pos;
      return t_ofcourse(atom());
    }
    if (try_keyword("forall")) {
      std::string a = ident();
      skip_ws();
      if (pos >= s.size() || s[pos] != '.') throw parse_error("expected '.'", pos);
      ++pos;
      return t_forall(a, type());
    }
    if (ident_start(c)) return t_var(ident());
    throw parse_error(std::string("unexpected character '") + c + "' in type", pos);
  }

  TypePtr type() {
    TypePtr left = atom();
    skip_ws();
    if (pos + 1 < s.size() && s[pos] == '-' && s[pos + 1] == 'o') {
      pos += 2;
      return t_lin(left, type());
    }
    if (pos + 1 < s.size() && s[pos] == '=' && s[pos + 1] == '>') {
      if (lal) throw parse_error("'=>' is not a LAL connective", pos);
      pos += 2;
      return t_bang_arrow(left, type());
    }
    if (pos + 1 < s.size() && s[pos] == '-' && s[pos + 1] == '>') {
      pos += 2;
      return t_arrow(left, type());
    }
    return left;
  }
};

void print_type_rec(const TypePtr& t, std::ostream& os, bool left_of_arrow, bool under_modal) {
  switch (t->kind) {
    case TypeKind::TVar:
      os << t->name;
      return;
    case TypeKind::Forall: {
      bool parens = left_of_arrow || under_modal;
      if (parens) os << '(';
      os << "forall " << t->name << ". ";
      print_type_rec(t->a, os, false, false);
      if (parens) os << ')';
      return;
    }
    case TypeKind::Par:
      os << '$';
      print_type_rec(t->a, os, false, true);
      return;
    case TypeKind::OfCourse:
      os << '!';
      print_type_rec(t->a, os, false, true);
      return;
    default: {
      bool parens = left_of_arrow || under_modal;
      if (parens) os << '(';
      print_type_rec(t->a, os, true, false);
      os << (t->kind == TypeKind::Lin ? " -o " : t->kind == TypeKind::Bang ? " => " : " -> ");
      print_type_rec(t->b, os, false, false);
      if (parens) os << ')';
      return;
    }
  }
}
}  // namespace

TypePtr parse_dlal_type(const std::string& text) {
  TypeParser p(text, false);
  TypePtr t = p.type();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input in type", p.pos);
  if (!is_dlal_type(t)) throw parse_error("not a DLAL type", 0);
  return t;
}

TypePtr parse_lal_type(const std::string& text) {
  TypeParser p(text, true);
  TypePtr t = p.type();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input in type", p.pos);
  if (!is_lal_type(t)) throw parse_error("not a LAL type", 0);
  return t;
}

std::string print_type(const TypePtr& t) {
  std::ostringstream os;
  print_type_rec(t, os, false, false);
  return os.str();
}

bool DualContext::disjoint() const {
  for (const auto& [x, _] : nonlinear)
    if (linear.count(x)) return false;
  return true;
}

bool DualContext::has_discharged() const {
  for (const auto& [_, e] : linear)
    if (e.discharged) return true;
  return false;
}

bool LalContext::has_discharged() const {
  for (const auto& [_, e] : entries)
    if (e.mark != LalMark::Proper) return true;
  return false;
}

std::string print_context(const DualContext& ctx) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [x, a] : ctx.nonlinear) {
    if (!first) os << ", ";
    os << x << " : " << print_type(a);
    first = false;
  }
  os << "; ";
  first = true;
  for (const auto& [x, e] : ctx.linear) {
    if (!first) os << ", ";
    if (e.discharged)
      os << x << " : [" << print_type(e.type) << "]$";
    else
      os << x << " : " << print_type(e.type);
    first = false;
  }
  return os.str();
}

std::string print_context(const LalContext& ctx) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [x, e] : ctx.entries) {
    if (!first) os << ", ";
    switch (e.mark) {
      case LalMark::Proper: os << x << " : " << print_type(e.type); break;
      case LalMark::BangDischarged: os << x << " : [" << print_type(e.type) << "]!"; break;
      case LalMark::ParDischarged: os << x << " : [" << print_type(e.type) << "]$"; break;
    }
    first = false;
  }
  return os.str();
}

}  // namespace dlal
