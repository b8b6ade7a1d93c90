#include "dlal/term.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

namespace dlal {

TermPtr mk_var(std::string name) {
  return std::make_shared<Term>(Term{TermKind::Var, std::move(name), nullptr, nullptr});
}

TermPtr mk_abs(std::string binder, TermPtr body) {
  return std::make_shared<Term>(Term{TermKind::Abs, std::move(binder), std::move(body), nullptr});
}

TermPtr mk_app(TermPtr fun, TermPtr arg) {
  return std::make_shared<Term>(Term{TermKind::App, {}, std::move(fun), std::move(arg)});
}

std::size_t term_size(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var: return 1;
    case TermKind::Abs: return term_size(t->a) + 1;
    case TermKind::App: return term_size(t->a) + term_size(t->b) + 1;
  }
  return 0;
}

std::size_t free_occurrences(const std::string& x, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var: return t->name == x ? 1 : 0;
    case TermKind::Abs:
      return t->name == x ? 0 : free_occurrences(x, t->a);
    case TermKind::App:
      return free_occurrences(x, t->a) + free_occurrences(x, t->b);
  }
  return 0;
}

static void collect_free(const TermPtr& t, std::set<std::string>& bound,
                         std::set<std::string>& out) {
  switch (t->kind) {
    case TermKind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case TermKind::Abs: {
      bool fresh = bound.insert(t->name).second;
      collect_free(t->a, bound, out);
      if (fresh) bound.erase(t->name);
      return;
    }
    case TermKind::App:
      collect_free(t->a, bound, out);
      collect_free(t->b, bound, out);
      return;
  }
}

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  collect_free(t, bound, out);
  return out;
}

namespace {
// Locally nameless comparison: binders are compared by de Bruijn position.
bool alpha_eq_rec(const TermPtr& s, const TermPtr& t,
                  std::map<std::string, int>& ls, std::map<std::string, int>& lt,
                  int depth) {
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
      auto olds = ls.find(s->name) == ls.end() ? std::optional<int>{} : ls[s->name];
      auto oldt = lt.find(t->name) == lt.end() ? std::optional<int>{} : lt[t->name];
      ls[s->name] = depth;
      lt[t->name] = depth;
      bool r = alpha_eq_rec(s->a, t->a, ls, lt, depth + 1);
      if (olds) ls[s->name] = *olds; else ls.erase(s->name);
      if (oldt) lt[t->name] = *oldt; else lt.erase(t->name);
      return r;
    }
    case TermKind::App:
      return alpha_eq_rec(s->a, t->a, ls, lt, depth) &&
             alpha_eq_rec(s->b, t->b, ls, lt, depth);
  }
  return false;
}
}  // namespace

bool alpha_eq(const TermPtr& s, const TermPtr& t) {
  std::map<std::string, int> ls, lt;
  return alpha_eq_rec(s, t, ls, lt, 0);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  // strip a trailing numeric suffix so x1 renames to x2, not x11
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back())))
    stem.pop_back();
  if (stem.empty()) stem = base;
  for (int i = 1;; ++i) {
    std::string c = stem + std::to_string(i);
    if (!avoid.count(c)) return c;
  }
}

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& u) {
  switch (t->kind) {
    case TermKind::Var:
      return t->name == x ? u : t;
    case TermKind::Abs: {
      if (t->name == x) return t;
      if (free_occurrences(x, t->a) == 0) return t;
      if (free_occurrences(t->name, u) > 0) {
        std::set<std::string> avoid = free_vars(u);
        auto bodyfv = free_vars(t->a);
        avoid.insert(bodyfv.begin(), bodyfv.end());
        avoid.insert(x);
        std::string y = fresh_name(t->name, avoid);
        TermPtr body = substitute(t->a, t->name, mk_var(y));
        return mk_abs(y, substitute(body, x, u));
      }
      return mk_abs(t->name, substitute(t->a, x, u));
    }
    case TermKind::App:
      return mk_app(substitute(t->a, x, u), substitute(t->b, x, u));
  }
  return t;
}

TermPtr rename_pair(const TermPtr& t, const std::string& x1, const std::string& x2,
                    const std::string& x) {
  return substitute(substitute(t, x1, mk_var(x)), x2, mk_var(x));
}

std::string path_to_string(const RedexPath& p) {
  std::string s;
  for (auto st : p)
    s += (st == PathStep::Fun ? 'f' : st == PathStep::Arg ? 'a' : 'b');
  return s;
}

RedexPath path_from_string(const std::string& s) {
  RedexPath p;
  for (std::size_t i = 0; i < s.size(); ++i) {
    switch (s[i]) {
      case 'f': p.push_back(PathStep::Fun); break;
      case 'a': p.push_back(PathStep::Arg); break;
      case 'b': p.push_back(PathStep::Body); break;
      default: throw parse_error("invalid path character", i);
    }
  }
  return p;
}

TermPtr subterm_at(const TermPtr& t, const RedexPath& p) {
  TermPtr cur = t;
  for (auto st : p) {
    if (!cur) return nullptr;
    switch (st) {
      case PathStep::Fun:
        cur = cur->kind == TermKind::App ? cur->a : nullptr;
        break;
      case PathStep::Arg:
        cur = cur->kind == TermKind::App ? cur->b : nullptr;
        break;
      case PathStep::Body:
        cur = cur->kind == TermKind::Abs ? cur->a : nullptr;
        break;
    }
  }
  return cur;
}

bool is_redex_at(const TermPtr& t, const RedexPath& p) {
  TermPtr s = subterm_at(t, p);
  return s && s->kind == TermKind::App && s->a->kind == TermKind::Abs;
}

namespace {
void collect_redexes(const TermPtr& t, RedexPath& cur, std::vector<RedexPath>& out) {
  switch (t->kind) {
    case TermKind::Var: return;
    case TermKind::Abs:
      cur.push_back(PathStep::Body);
      collect_redexes(t->a, cur, out);
      cur.pop_back();
      return;
    case TermKind::App:
      if (t->a->kind == TermKind::Abs) out.push_back(cur);
      cur.push_back(PathStep::Fun);
      collect_redexes(t->a, cur, out);
      cur.pop_back();
      cur.push_back(PathStep::Arg);
      collect_redexes(t->b, cur, out);
      cur.pop_back();
      return;
  }
}

TermPtr rebuild_at(const TermPtr& t, const RedexPath& p, std::size_t i, const TermPtr& sub) {
  if (i == p.size()) return sub;
  switch (p[i]) {
    case PathStep::Fun: return mk_app(rebuild_at(t->a, p, i + 1, sub), t->b);
    case PathStep::Arg: return mk_app(t->a, rebuild_at(t->b, p, i + 1, sub));
    case PathStep::Body: return mk_abs(t->name, rebuild_at(t->a, p, i + 1, sub));
  }
  return sub;
}
}  // namespace

std::vector<RedexPath> redex_paths(const TermPtr& t) {
  std::vector<RedexPath> out;
  RedexPath cur;
  collect_redexes(t, cur, out);
  return out;
}

TermPtr beta_step(const TermPtr& t, const RedexPath& p) {
  TermPtr s = subterm_at(t, p);
  if (!s || s->kind != TermKind::App || s->a->kind != TermKind::Abs)
    throw invariant_violation("beta_step: path does not address a redex");
  TermPtr contractum = substitute(s->a->a, s->a->name, s->b);
  return rebuild_at(t, p, 0, contractum);
}

bool is_normal_form(const TermPtr& t) { return redex_paths(t).empty(); }

ReductionTrace normalize(const TermPtr& t, Strategy strategy, std::size_t fuel,
                         uint64_t seed) {
  ReductionTrace tr;
  tr.initial = t;
  TermPtr cur = t;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < fuel; ++i) {
    auto rs = redex_paths(cur);
    if (rs.empty()) {
      tr.final = cur;
      tr.complete = true;
      return tr;
    }
    RedexPath pick;
    switch (strategy) {
      case Strategy::LeftmostOutermost:
        pick = rs.front();
        break;
      case Strategy::RightmostInnermost: {
        // rightmost: lexicographically last path; innermost: longest among
        // those it prefixes. The last pre-order path with no redex below it.
        pick = rs.front();
        for (const auto& r : rs) {
          // r beats pick if pick is a prefix of r (deeper) or r sits to the
          // right of pick at the first differing step.
          auto cmp = [](const RedexPath& a, const RedexPath& b) {
            std::size_t n = std::min(a.size(), b.size());
            for (std::size_t k = 0; k < n; ++k) {
              if (a[k] == b[k]) continue;
              auto rank = [](PathStep s) {
                return s == PathStep::Fun ? 0 : s == PathStep::Body ? 1 : 2;
              };
              return rank(a[k]) < rank(b[k]);
            }
            return a.size() < b.size();  // deeper wins (innermost)
          };
          if (cmp(pick, r)) pick = r;
        }
        break;
      }
      case Strategy::Random: {
        std::uniform_int_distribution<std::size_t> d(0, rs.size() - 1);
        pick = rs[d(rng)];
        break;
      }
    }
    cur = beta_step(cur, pick);
    tr.steps.push_back(TraceStep{pick, term_size(cur)});
  }
  tr.final = cur;
  tr.complete = redex_paths(cur).empty();
  return tr;
}

void replay_trace(const ReductionTrace& tr) {
  TermPtr cur = tr.initial;
  for (const auto& st : tr.steps) {
    cur = beta_step(cur, st.path);
    if (term_size(cur) != st.result_size)
      throw invariant_violation("replay_trace: recorded size disagrees with replay");
  }
  if (!alpha_eq(cur, tr.final))
    throw invariant_violation("replay_trace: final term disagrees with replay");
}

// ---------------------------------------------------------------------------
// Parsing / printing
// ---------------------------------------------------------------------------

namespace {
struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& src) : s(src) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  std::string ident() {
    skip_ws();
    if (pos >= s.size() || !ident_start(s[pos]))
      throw parse_error("expected identifier", pos);
    std::size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }

  TermPtr atom() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("unexpected end of input", pos);
    char c = s[pos];
    if (c == '(') {
      ++pos;
      TermPtr t = term();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') throw parse_error("expected ')'", pos);
      ++pos;
      return t;
    }
    if (c == '\\') return abstraction();
    if (ident_start(c)) return mk_var(ident());
    throw parse_error(std::string("unexpected character '") + c + "'", pos);
  }

  TermPtr abstraction() {
    skip_ws();
    if (pos >= s.size() || s[pos] != '\\') throw parse_error("expected '\\'", pos);
    ++pos;
    std::string x = ident();
    skip_ws();
    if (pos >= s.size() || s[pos] != '.') throw parse_error("expected '.'", pos);
    ++pos;
    return mk_abs(x, term());
  }

  TermPtr term() {
    skip_ws();
    if (peek() == '\\') return abstraction();
    TermPtr t = atom();
    for (;;) {
      skip_ws();
      if (pos >= s.size()) break;
      char c = s[pos];
      if (c == '\\') {
        t = mk_app(t, abstraction());
        break;
      }
      if (c == '(' || ident_start(c)) {
        t = mk_app(t, atom());
        continue;
      }
      break;
    }
    return t;
  }
};
}  // namespace

TermPtr parse_term(const std::string& text) {
  Parser p(text);
  TermPtr t = p.term();
  if (!p.eof()) throw parse_error("trailing input", p.pos);
  return t;
}

namespace {
void print_rec(const TermPtr& t, std::ostream& os, bool fun_pos, bool arg_pos) {
  switch (t->kind) {
    case TermKind::Var:
      os << t->name;
      return;
    case TermKind::Abs: {
      bool parens = fun_pos || arg_pos;
      if (parens) os << '(';
      os << '\\' << t->name << '.';
      print_rec(t->a, os, false, false);
      if (parens) os << ')';
      return;
    }
    case TermKind::App: {
      bool parens = arg_pos;
      if (parens) os << '(';
      print_rec(t->a, os, true, false);
      os << ' ';
      print_rec(t->b, os, false, true);
      if (parens) os << ')';
      return;
    }
  }
}
}  // namespace

std::string print_term(const TermPtr& t) {
  std::ostringstream os;
  print_rec(t, os, false, false);
  return os.str();
}

std::optional<std::size_t> decode_numeral(const TermPtr& t) {
  if (t->kind != TermKind::Abs) return std::nullopt;
  const std::string& f = t->name;
  TermPtr inner = t->a;
  if (inner->kind != TermKind::Abs) return std::nullopt;
  const std::string& x = inner->name;
  if (f == x) return std::nullopt;
  TermPtr cur = inner->a;
  std::size_t n = 0;
  while (cur->kind == TermKind::App) {
    if (cur->a->kind != TermKind::Var || cur->a->name != f) return std::nullopt;
    ++n;
    cur = cur->b;
  }
  if (cur->kind != TermKind::Var || cur->name != x) return std::nullopt;
  return n;
}

std::string trace_to_json(const ReductionTrace& tr) {
  nlohmann::json j;
  j["initial"] = print_term(tr.initial);
  j["steps"] = nlohmann::json::array();
  for (const auto& st : tr.steps)
    j["steps"].push_back({{"path", path_to_string(st.path)}, {"size", st.result_size}});
  j["final"] = print_term(tr.final);
  j["count"] = tr.steps.size();
  j["complete"] = tr.complete;
  return j.dump();
}

}  // namespace dlal
