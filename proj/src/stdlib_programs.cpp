#include "dlal/stdlib.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace dlal {

namespace {

DerivPtr id_(const std::string& x, const TypePtr& a) {
  DerivParams p;
  p.binder = x;
  p.inst_type = a;
  return mk_deriv(Rule::Id, p, {});
}
DerivPtr lin_i(const std::string& x, DerivPtr d) {
  DerivParams p;
  p.binder = x;
  return mk_deriv(Rule::LinI, p, {std::move(d)});
}
DerivPtr bang_i(const std::string& x, DerivPtr d) {
  DerivParams p;
  p.binder = x;
  return mk_deriv(Rule::BangI, p, {std::move(d)});
}
DerivPtr lin_e(DerivPtr f, DerivPtr a) {
  return mk_deriv(Rule::LinE, {}, {std::move(f), std::move(a)});
}
DerivPtr bang_e(DerivPtr f, DerivPtr a) {
  return mk_deriv(Rule::BangE, {}, {std::move(f), std::move(a)});
}
DerivPtr cntr(const std::string& x1, const std::string& x2, const std::string& x, DerivPtr d) {
  DerivParams p;
  p.merged = std::array<std::string, 3>{x1, x2, x};
  return mk_deriv(Rule::Cntr, p, {std::move(d)});
}
DerivPtr par_i(std::vector<std::string> promoted, DerivPtr d) {
  DerivParams p;
  p.promoted = std::move(promoted);
  return mk_deriv(Rule::ParI, p, {std::move(d)});
}
DerivPtr par_e(const std::string& x, DerivPtr u, DerivPtr t) {
  DerivParams p;
  p.binder = x;
  return mk_deriv(Rule::ParE, p, {std::move(u), std::move(t)});
}
DerivPtr forall_i(const std::string& a, DerivPtr d) {
  DerivParams p;
  p.binder = a;
  return mk_deriv(Rule::ForallI, p, {std::move(d)});
}
DerivPtr forall_e(const TypePtr& b, DerivPtr d) {
  DerivParams p;
  p.inst_type = b;
  return mk_deriv(Rule::ForallE, p, {std::move(d)});
}
DerivPtr weak_nl(const std::string& x, const TypePtr& a, DerivPtr d) {
  DerivParams p;
  p.weak_nonlinear.push_back({x, a});
  return mk_deriv(Rule::Weak, p, {std::move(d)});
}
DerivPtr lal_bang_i(DerivPtr d) { return mk_deriv(Rule::LalBangI, {}, {std::move(d)}); }
DerivPtr lal_bang_e(const std::string& x, DerivPtr u, DerivPtr t) {
  DerivParams p;
  p.binder = x;
  return mk_deriv(Rule::LalBangE, p, {std::move(u), std::move(t)});
}

}  // namespace

TypePtr type_N_body(const TypePtr& atom) {
  TypePtr aa = t_lin(atom, atom);
  return t_bang_arrow(aa, t_par(aa));
}

TypePtr type_N() { return t_forall("a", type_N_body(t_var("a"))); }

TypePtr type_W() {
  TypePtr a = t_var("a");
  TypePtr aa = t_lin(a, a);
  return t_forall("a", t_bang_arrow(aa, t_bang_arrow(aa, t_par(aa))));
}

// ---------------------------------------------------------------------------
// Church numerals
// ---------------------------------------------------------------------------

namespace {
// ; |- \f.\x.f^n x : (a -o a) => $(a -o a), propositional body over `atom`
DerivPtr church_body_script(std::size_t n, const TypePtr& atom) {
  TypePtr aa = t_lin(atom, atom);
  if (n == 0) {
    DerivPtr body = lin_i("x", id_("x", atom));
    DerivPtr boxed = par_i({}, body);
    return bang_i("f", weak_nl("f", aa, boxed));
  }
  DerivPtr cur = id_("x", atom);
  for (std::size_t i = n; i >= 1; --i) {
    std::string fi = n == 1 ? "f" : "f" + std::to_string(i);
    cur = lin_e(id_(fi, aa), cur);
    if (i == 1) break;
  }
  cur = lin_i("x", cur);
  std::vector<std::string> promoted;
  for (std::size_t i = 1; i <= n; ++i)
    promoted.push_back(n == 1 ? "f" : "f" + std::to_string(i));
  cur = par_i(promoted, cur);
  if (n >= 2) {
    std::string acc = "f1";
    for (std::size_t i = 2; i <= n; ++i) {
      std::string merged = i == n ? "f" : acc;
      cur = cntr(acc, "f" + std::to_string(i), merged, cur);
      acc = merged;
    }
  }
  return bang_i("f", cur);
}
}  // namespace

NamedProgram church(std::size_t n) {
  NamedProgram p;
  p.name = "church_" + std::to_string(n);
  TermPtr body = mk_var("x");
  for (std::size_t i = 0; i < n; ++i) body = mk_app(mk_var("f"), body);
  p.term = mk_abs("f", mk_abs("x", body));
  p.certificate = forall_i("a", church_body_script(n, t_var("a")));
  p.claimed_type = type_N();
  p.notes = "Church numeral";
  return p;
}

NamedProgram succ_program() {
  TypePtr a = t_var("a");
  TypePtr aa = t_lin(a, a);
  TypePtr N = type_N();
  // f2; n:N |- (n f2) : $(a -o a)
  DerivPtr nf = bang_e(forall_e(a, id_("n", N)), id_("f2", aa));
  // ; f1, v, x |- f1 (v x) : a
  DerivPtr inner = lin_e(id_("f1", aa), lin_e(id_("v", aa), id_("x", a)));
  DerivPtr boxed = par_i({"f1"}, lin_i("x", inner));
  DerivPtr pe = par_e("v", nf, boxed);
  DerivPtr c = cntr("f1", "f2", "f", pe);
  DerivPtr script = lin_i("n", forall_i("a", bang_i("f", c)));

  NamedProgram p;
  p.name = "succ";
  p.term = parse_term("\\n.\\f.\\x.f (n f x)");
  p.certificate = script;
  p.claimed_type = t_lin(N, N);
  p.notes = "successor";
  return p;
}

namespace {

// f_i; v:N |- (v f_i) : $(a -o a) for a numeral-typed variable v
DerivPtr apply_numeral_var(const std::string& v, const std::string& fi, const TypePtr& atom) {
  return bang_e(forall_e(atom, id_(v, type_N())), id_(fi, t_lin(atom, atom)));
}

DerivPtr add_script() {
  TypePtr a = t_var("a");
  TypePtr aa = t_lin(a, a);
  DerivPtr inner = lin_e(id_("v", aa), lin_e(id_("w", aa), id_("x", a)));
  DerivPtr boxed = par_i({}, lin_i("x", inner));
  DerivPtr pe1 = par_e("w", apply_numeral_var("m", "f2", a), boxed);
  DerivPtr pe2 = par_e("v", apply_numeral_var("n", "f1", a), pe1);
  DerivPtr c = cntr("f1", "f2", "f", pe2);
  return lin_i("n", lin_i("m", forall_i("a", bang_i("f", c))));
}

DerivPtr mult_script() {
  TypePtr a = t_var("a");
  TypePtr aa = t_lin(a, a);
  TypePtr N = type_N();
  // M = \k.\f.\x.(n f) ((k f) x) : N -o N   in context ;n:N
  DerivPtr inner = lin_e(id_("v", aa), lin_e(id_("w", aa), id_("x", a)));
  DerivPtr boxed = par_i({}, lin_i("x", inner));
  DerivPtr pe1 = par_e("w", apply_numeral_var("k", "f2", a), boxed);
  DerivPtr pe2 = par_e("v", apply_numeral_var("n", "f1", a), pe1);
  DerivPtr c = cntr("f1", "f2", "f", pe2);
  DerivPtr M = lin_i("k", forall_i("a", bang_i("f", c)));
  // m instantiated at N, applied to M ( ;n:N |- M : N -o N )
  DerivPtr mM = bang_e(forall_e(N, id_("m", N)), M);
  // bridge (m M) into (h 0) under one box
  DerivPtr h0 = lin_e(id_("h", t_lin(N, N)), church(0).certificate);
  DerivPtr box2 = par_i({}, h0);
  DerivPtr pe3 = par_e("h", mM, box2);
  return bang_i("n", lin_i("m", pe3));
}

}  // namespace

// ---------------------------------------------------------------------------
// Coercions
// ---------------------------------------------------------------------------

TermPtr coercion_context(int kind, const TermPtr& t, const std::string& n,
                         const std::string& m) {
  TermPtr succ_t = parse_term("\\n.\\f.\\x.f (n f x)");
  TermPtr zero = parse_term("\\f.\\x.x");
  if (kind == 1) {
    // (m (\g.\p.g (succ p))) (\n.t) 0
    TermPtr g = mk_abs("g", mk_abs("p", mk_app(mk_var("g"), mk_app(succ_t, mk_var("p")))));
    return mk_app(mk_app(mk_app(mk_var(m), g), mk_abs(n, t)), zero);
  }
  // (\n.t) (m succ 0)
  return mk_app(mk_abs(n, t), mk_app(mk_app(mk_var(m), succ_t), zero));
}

DerivPtr coerc1_expand(const NdlalCheckedPtr& premise, const std::string& n,
                       const std::string& m) {
  TypePtr N = type_N();
  TypePtr A = premise->type;
  if (!premise->ctx.nonlinear.count(n) || premise->ctx.nonlinear.size() != 1)
    throw invariant_violation("coerc1: premise must have exactly n:N nonlinear");
  TypePtr NA = t_bang_arrow(N, A);

  // \n.t : N => A
  DerivPtr lam_n = bang_i(n, premise->node);

  // G = \g.\p.g (succ p) : (N => A) -o (N => A)
  DerivPtr succ_c = succ_program().certificate;
  DerivPtr sp = lin_e(succ_c, id_("p", N));
  DerivPtr gsp = bang_e(id_("g", NA), sp);
  DerivPtr G = lin_i("g", bang_i("p", gsp));

  // ;m:N |- m G : $((N=>A) -o (N=>A))
  DerivPtr mG = bang_e(forall_e(NA, id_(m, N)), G);

  // inside the box: (w (\n.t)) 0 : A
  std::set<std::string> names = deriv_names(premise->node);
  names.insert(n);
  names.insert(m);
  std::string w = fresh_name("w", names);
  DerivPtr app1 = lin_e(id_(w, t_lin(NA, NA)), lam_n);
  DerivPtr app2 = bang_e(app1, church(0).certificate);
  DerivPtr boxed = par_i({}, app2);

  DerivPtr cur = par_e(w, mG, boxed);
  // bridge the Delta variables back at their own names ($-lifted types)
  for (const auto& [x, e] : premise->ctx.linear) {
    if (e.discharged)
      throw invariant_violation("coerc1: discharged variable in the premise");
    cur = par_e(x, id_(x, t_par(e.type)), cur);
  }
  return cur;
}

DerivPtr coerc2_expand(const NdlalCheckedPtr& premise, const std::string& n,
                       const std::string& m) {
  TypePtr N = type_N();
  auto it = premise->ctx.linear.find(n);
  if (it == premise->ctx.linear.end() || it->second.discharged ||
      !type_alpha_eq(it->second.type, t_par(N)))
    throw invariant_violation("coerc2: premise must hold n : $N linear");

  DerivPtr lam_n = lin_i(n, premise->node);  // Gamma; Delta |- \n.t : $N -o A

  DerivPtr succ_c = succ_program().certificate;
  DerivPtr msucc = bang_e(forall_e(N, id_(m, N)), succ_c);  // ;m:N |- m succ : $(N -o N)
  std::set<std::string> names = deriv_names(premise->node);
  names.insert(m);
  std::string h = fresh_name("h", names);
  DerivPtr h0 = lin_e(id_(h, t_lin(N, N)), church(0).certificate);
  DerivPtr boxed = par_i({}, h0);
  DerivPtr arg = par_e(h, msucc, boxed);  // ;m:N |- (m succ) 0 : $N

  return lin_e(lam_n, arg);
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

namespace {
DerivPtr square_script() {
  TypePtr N = type_N();
  DerivPtr mult_c = mult_script();
  // n1:N; n2:N |- mult n1 n2 : $N
  DerivPtr s0 = lin_e(bang_e(mult_c, id_("n1", N)), id_("n2", N));
  DerivPtr s1 = coerc1_expand(check_ndlal(s0, false), "n1", "m1");
  DerivPtr s2 = coerc2_expand(check_ndlal(s1, false), "n2", "m2");
  DerivPtr s3 = par_i({"m1", "m2"}, s2);
  DerivPtr s4 = cntr("m1", "m2", "m0", s3);
  DerivPtr s5 = coerc1_expand(check_ndlal(s4, false), "m0", "m");
  return lin_i("m", s5);
}
}  // namespace

Arithmetic arithmetic() {
  Arithmetic ar;
  TypePtr N = type_N();

  ar.add.name = "add";
  ar.add.term = parse_term("\\n.\\m.\\f.\\x.n f (m f x)");
  ar.add.certificate = add_script();
  ar.add.claimed_type = t_lin(N, t_lin(N, N));
  ar.add.notes = "addition";

  ar.mult.name = "mult";
  ar.mult.term = parse_term("\\n.\\m.(m (\\k.\\f.\\x.n f (k f x))) (\\f.\\x.x)");
  ar.mult.certificate = mult_script();
  ar.mult.claimed_type = t_bang_arrow(N, t_lin(N, t_par(N)));
  ar.mult.notes = "multiplication";

  ar.square.name = "square";
  ar.square.certificate = square_script();
  ar.square.term = reconstruct_subject(ar.square.certificate);
  ar.square.claimed_type = t_lin(N, t_par_n(N, 4));
  ar.square.notes = "squaring, Figure 3 rule sequence with coercions expanded";
  return ar;
}

// ---------------------------------------------------------------------------
// Lifts, mult_p, add_q, polynomials
// ---------------------------------------------------------------------------

namespace {

// from |- F : A -o B (closed) to |- \y.F y : $A -o $B
DerivPtr lift_unary(const DerivPtr& F, const TypePtr& A, const TypePtr& /*B*/) {
  std::set<std::string> names = deriv_names(F);
  std::string y = fresh_name("y", names);
  DerivPtr fa = lin_e(F, id_(y, A));
  DerivPtr boxed = par_i({}, fa);
  DerivPtr pe = par_e(y, id_(y, t_par(A)), boxed);
  return lin_i(y, pe);
}

// from |- F : A -o B -o C (closed) to |- \y.\z.F y z : $A -o $B -o $C
DerivPtr lift_binary(const DerivPtr& F, const TypePtr& A, const TypePtr& B) {
  std::set<std::string> names = deriv_names(F);
  std::string y = fresh_name("y", names);
  names.insert(y);
  std::string z = fresh_name("z", names);
  DerivPtr fab = lin_e(lin_e(F, id_(y, A)), id_(z, B));
  DerivPtr boxed = par_i({}, fab);
  DerivPtr p1 = par_e(y, id_(y, t_par(A)), boxed);
  DerivPtr p2 = par_e(z, id_(z, t_par(B)), p1);
  return lin_i(y, lin_i(z, p2));
}

DerivPtr mult0_script() {
  TypePtr N = type_N();
  DerivPtr s0 = lin_e(bang_e(mult_script(), id_("n1", N)), id_("n2", N));
  DerivPtr s1 = coerc1_expand(check_ndlal(s0, false), "n1", "m1");
  return lin_i("m1", lin_i("n2", s1));  // |- \m1.\n2.C1[mult n1 n2] : N -o $N -o $$N
}

}  // namespace

NamedProgram mult_p(std::size_t p) {
  TypePtr N = type_N();
  DerivPtr cur = mult0_script();
  TypePtr A = N, B = t_par(N);
  for (std::size_t i = 0; i < p; ++i) {
    cur = lift_binary(cur, A, B);
    A = t_par(A);
    B = t_par(B);
  }
  NamedProgram prog;
  prog.name = "mult_p" + std::to_string(p);
  prog.certificate = cur;
  prog.term = reconstruct_subject(cur);
  prog.claimed_type = t_lin(t_par_n(N, p), t_lin(t_par_n(N, p + 1), t_par_n(N, p + 2)));
  prog.notes = "lifted multiplication";
  return prog;
}

NamedProgram add_q(std::size_t q) {
  TypePtr N = type_N();
  DerivPtr cur = add_script();
  TypePtr A = N, B = N;
  for (std::size_t i = 0; i < q; ++i) {
    cur = lift_binary(cur, A, B);
    A = t_par(A);
    B = t_par(B);
  }
  NamedProgram prog;
  prog.name = "add_q" + std::to_string(q);
  prog.certificate = cur;
  prog.term = reconstruct_subject(cur);
  prog.claimed_type = t_lin(t_par_n(N, q), t_lin(t_par_n(N, q), t_par_n(N, q)));
  prog.notes = "lifted addition";
  return prog;
}

NamedProgram polynomial(std::size_t a, std::size_t b, std::size_t k) {
  if (k < 1) throw invariant_violation("polynomial: k must be at least 1");
  TypePtr N = type_N();
  std::size_t p = 4 * k - 1, q = 4 * k + 1;

  // u : N -o $^{4k} N, square composed k times
  DerivPtr u = square_script();
  TypePtr u_cod = t_par_n(N, 4);
  for (std::size_t j = 1; j < k; ++j) {
    DerivPtr lifted = square_script();
    TypePtr A = N, B = t_par_n(N, 4);
    for (std::size_t i = 0; i < 4 * j; ++i) {
      lifted = lift_unary(lifted, A, B);
      A = t_par(A);
      B = t_par(B);
    }
    // compose: \n.lifted (u n)
    std::set<std::string> names = deriv_names(u);
    auto extra = deriv_names(lifted);
    names.insert(extra.begin(), extra.end());
    std::string n = fresh_name("n", names);
    DerivPtr comp = lin_i(n, lin_e(lifted, lin_e(u, id_(n, N))));
    u = comp;
    u_cod = t_par_n(N, 4 * (j + 1));
  }

  DerivPtr abar = church(a).certificate;
  for (std::size_t i = 0; i < p; ++i) abar = par_i({}, abar);
  DerivPtr bbar = church(b).certificate;
  for (std::size_t i = 0; i < q; ++i) bbar = par_i({}, bbar);

  DerivPtr multp = mult_p(p).certificate;
  DerivPtr addq = add_q(q).certificate;

  std::set<std::string> names = deriv_names(u);
  std::string n0 = fresh_name("n", names);
  DerivPtr un = lin_e(u, id_(n0, N));
  DerivPtr mpa = lin_e(multp, abar);
  DerivPtr mpau = lin_e(mpa, un);
  DerivPtr res = lin_e(lin_e(addq, mpau), bbar);
  DerivPtr script = lin_i(n0, res);

  NamedProgram prog;
  prog.name = "poly_" + std::to_string(a) + "_" + std::to_string(b) + "_" + std::to_string(k);
  prog.certificate = script;
  prog.term = reconstruct_subject(script);
  prog.claimed_type = t_lin(N, t_par_n(N, q));
  prog.notes = "t_P for P[X] = " + std::to_string(a) + " X^" + std::to_string(1ull << k) +
               " + " + std::to_string(b);
  return prog;
}

// ---------------------------------------------------------------------------
// The counterexample family t_n (NLAL only)
// ---------------------------------------------------------------------------

NamedProgram counterexample(std::size_t n) {
  if (n < 1) throw invariant_violation("counterexample: n must be at least 1");
  TypePtr A = t_var("a");
  TypePtr bA = t_ofcourse(A);
  TypePtr yty = t_lin(bA, t_lin(bA, bA));  // !a -o !a -o !a

  // y_i : !a -o !a -o !a |- \x.y_i x x : !a -o !a
  auto copy = [&](std::size_t i) {
    std::string yi = "y" + std::to_string(i);
    std::string x1 = "x" + std::to_string(i) + "p";
    std::string x2 = "x" + std::to_string(i) + "q";
    std::string xm = "x" + std::to_string(i) + "m";
    std::string x = "x" + std::to_string(i);
    DerivPtr b1 = lal_bang_i(id_(x1, A));
    DerivPtr b2 = lal_bang_i(id_(x2, A));
    DerivPtr app = lin_e(lin_e(id_(yi, yty), b1), b2);
    DerivPtr c = cntr(x1, x2, xm, app);
    DerivPtr be = lal_bang_e(xm, id_(x, bA), c);
    return lin_i(x, be);
  };

  DerivPtr cur = id_("z0", bA);
  for (std::size_t i = n; i >= 1; --i) {
    cur = lin_e(copy(i), cur);
    if (i == 1) break;
  }
  std::vector<std::string> banged{"z0"};
  for (std::size_t i = 1; i <= n; ++i) banged.push_back("y" + std::to_string(i));
  cur = mk_deriv(Rule::ParI, [&] {
    DerivParams p;
    p.promoted = banged;
    return p;
  }(), {cur});
  std::string acc = "y1";
  for (std::size_t i = 2; i <= n; ++i) {
    std::string merged = i == n ? "ym" : acc;
    cur = cntr(acc, "y" + std::to_string(i), merged, cur);
    acc = merged;
  }
  cur = lal_bang_e(acc, id_("y", t_ofcourse(yty)), cur);
  cur = lal_bang_e("z0", id_("z", t_ofcourse(bA)), cur);

  NamedProgram prog;
  prog.name = "counterexample_" + std::to_string(n);
  prog.certificate = cur;
  prog.term = reconstruct_subject(cur);
  prog.claimed_type = t_par(bA);
  prog.system = CertSystem::Lal;
  prog.notes =
      "t_n = (\\x.y x x)^n z; normal-form size follows |u_n| = 2|u_{n-1}|+3, exponential; "
      "no DLAL certificate exists";
  return prog;
}

// ---------------------------------------------------------------------------
// Binary words
// ---------------------------------------------------------------------------

NamedProgram word_program(const std::vector<int>& bits) {
  TypePtr a = t_var("a");
  TypePtr aa = t_lin(a, a);

  TermPtr body = mk_var("x");
  for (auto it = bits.rbegin(); it != bits.rend(); ++it)
    body = mk_app(mk_var(*it ? "f1" : "f0"), body);
  TermPtr term = mk_abs("f0", mk_abs("f1", mk_abs("x", body)));

  std::vector<std::string> occ;  // innermost-first occurrence names
  int n0 = 0, n1 = 0;
  DerivPtr cur = id_("x", a);
  for (std::size_t i = bits.size(); i >= 1; --i) {
    int b = bits[i - 1];
    std::string name = (b ? "g" : "h") + std::to_string(b ? ++n1 : ++n0);
    occ.push_back(name);
    cur = lin_e(id_(name, aa), cur);
    if (i == 1) break;
  }
  cur = lin_i("x", cur);
  cur = par_i(occ, cur);
  auto contract_group = [&](const std::string& prefix, int count, const std::string& final_name,
                            DerivPtr d) {
    if (count == 0) return weak_nl(final_name, aa, d);
    std::string acc = prefix + "1";
    for (int i = 2; i <= count; ++i) {
      std::string merged = i == count ? final_name : acc;
      d = cntr(acc, prefix + std::to_string(i), merged, d);
      acc = merged;
    }
    if (count == 1) {
      // single occurrence: rename by contracting with a weakened copy is
      // overkill; abstract the occurrence name directly
      return d;
    }
    return d;
  };
  // bits of value 1 use g*, value 0 use h*
  DerivPtr with_f1 = contract_group("g", n1, "f1", cur);
  std::string f1name = n1 == 1 ? "g1" : "f1";
  with_f1 = bang_i(f1name, with_f1);
  DerivPtr with_f0 = contract_group("h", n0, "f0", with_f1);
  std::string f0name = n0 == 1 ? "h1" : "f0";
  with_f0 = bang_i(f0name, with_f0);
  DerivPtr script = forall_i("a", with_f0);

  NamedProgram prog;
  std::string bstr;
  for (int b : bits) bstr += b ? '1' : '0';
  prog.name = "word_" + (bstr.empty() ? std::string("eps") : bstr);
  prog.certificate = script;
  prog.term = term;
  prog.claimed_type = type_W();
  prog.notes = "binary word";
  return prog;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

std::vector<NamedProgram> stdlib_corpus() {
  std::vector<NamedProgram> out;
  for (std::size_t n = 0; n <= 3; ++n) out.push_back(church(n));
  out.push_back(succ_program());
  Arithmetic ar = arithmetic();
  out.push_back(ar.add);
  out.push_back(ar.mult);
  out.push_back(ar.square);
  out.push_back(word_program({1, 0, 1}));
  out.push_back(mult_p(3));
  out.push_back(add_q(5));
  out.push_back(polynomial(2, 3, 1));

  // applied programs give the reduction machinery something to chew on
  auto applied = [&](const std::string& name, const NamedProgram& f,
                     std::vector<std::size_t> args, bool first_banged) {
    NamedProgram p;
    p.name = name;
    DerivPtr cur = f.certificate;
    TermPtr term = f.term;
    bool first = true;
    for (std::size_t v : args) {
      NamedProgram num = church(v);
      cur = (first && first_banged) ? bang_e(cur, num.certificate)
                                    : lin_e(cur, num.certificate);
      term = mk_app(term, num.term);
      first = false;
    }
    p.certificate = cur;
    p.term = term;
    NdlalCheckedPtr c = check_ndlal(cur);
    p.claimed_type = c->type;
    p.notes = "applied";
    return p;
  };
  out.push_back(applied("add_2_3", ar.add, {2, 3}, false));
  out.push_back(applied("mult_2_3", ar.mult, {2, 3}, true));
  out.push_back(applied("square_3", ar.square, {3}, false));
  out.push_back(applied("poly_2_3_1_2", polynomial(2, 3, 1), {2}, false));

  for (std::size_t n = 1; n <= 3; ++n) out.push_back(counterexample(n));
  return out;
}

void save_corpus(const std::vector<NamedProgram>& programs, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& p : programs) {
    {
      std::ofstream lam(dir + "/" + p.name + ".lam");
      lam << print_term(p.term) << "\n";
    }
    nlohmann::json j;
    j["name"] = p.name;
    j["system"] = p.system == CertSystem::Dlal ? "dlal" : "lal";
    j["type"] = print_type(p.claimed_type);
    j["notes"] = p.notes;
    if (p.certificate)
      j["certificate"] = nlohmann::json::parse(deriv_to_json(p.certificate));
    std::ofstream cert(dir + "/" + p.name + ".cert.json");
    cert << j.dump(1) << "\n";
  }
}

std::vector<NamedProgram> load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<NamedProgram> out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    nlohmann::json j = nlohmann::json::parse(in);
    NamedProgram p;
    p.name = j.at("name").get<std::string>();
    p.system = j.at("system").get<std::string>() == "lal" ? CertSystem::Lal : CertSystem::Dlal;
    bool lal = p.system == CertSystem::Lal;
    p.claimed_type =
        lal ? parse_lal_type(j.at("type").get<std::string>())
            : parse_dlal_type(j.at("type").get<std::string>());
    p.notes = j.value("notes", "");
    if (j.contains("certificate"))
      p.certificate = deriv_from_json_text(j["certificate"].dump(), lal);
    std::string stem = f.parent_path().string() + "/" + p.name + ".lam";
    std::ifstream lam(stem);
    std::stringstream ss;
    ss << lam.rdbuf();
    p.term = parse_term(ss.str());
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace dlal
