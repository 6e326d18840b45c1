#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "valdetect/classmap.hpp"
#include "valdetect/spec_io.hpp"
#include "valdetect/tower.hpp"

using namespace valdetect;

namespace {

Tower laurent2() { return Tower(3, 7, false, "", {"s", "t"}); }
Tower laurent1() { return Tower(3, 7, false, "", {"t"}); }
Tower rational0() { return Tower(3, 7, true, "x", {}); }
Tower rational1() { return Tower(3, 7, true, "x", {"t"}); }

FlVector cls(const Context& ctx, std::initializer_list<std::pair<const char*, int>> coords) {
  FlVector v;
  for (auto& [name, val] : coords) {
    bool found = false;
    for (const BasisIndex& b : ctx.basis)
      if (b.display() == name) {
        v.set(b, val, ctx.ell);
        found = true;
        break;
      }
    if (!found) throw std::runtime_error(std::string("no basis ") + name);
  }
  return v;
}

}  // namespace

TEST_CASE("tower construction fixes generator and omega") {
  Tower t = laurent2();
  REQUIRE(t.base_field().generator() == 3);
  REQUIRE(t.omega() == 2);  // 3^((7-1)/3) = 9 = 2
  REQUIRE(t.layers() == 2);
  Context ctx = t.seed_context();
  REQUIRE(ctx.dim() == 3);
  REQUIRE(ctx.basis[0] == BasisIndex::unit());
  REQUIRE(ctx.basis[1] == BasisIndex::var(1, "s"));
  REQUIRE(ctx.basis[2] == BasisIndex::var(2, "t"));

  REQUIRE_THROWS_AS(Tower(3, 4, false, "", {}), Error);   // 4 != 1 mod 6
  REQUIRE_THROWS_AS(Tower(2, 7, false, "", {}), Error);   // even ell
  REQUIRE_THROWS_AS(Tower(9, 19, false, "", {}), Error);  // composite ell
  REQUIRE_THROWS_AS(Tower(3, 7, false, "", {"t", "t"}), Error);
  REQUIRE_THROWS_AS(Tower(3, 7, true, "x", {"x"}), Error);
  REQUIRE_NOTHROW(Tower(5, 11, false, "", {"t"}));  // 11 = 1 mod 10
}

TEST_CASE("element parsing and printing round trips") {
  Tower t = rational1();  // F_7(x)((t))
  Elem e = t.parse_elem("(x+1)/(x-1) + 3*t^2");
  REQUIRE(t.to_string(e) == "((x+1)/(x-1)) + 3*t^2");
  REQUIRE(t.to_string(t.parse_elem("t^-2")) == "t^-2");
  REQUIRE(t.to_string(t.parse_elem("1 - t")) == "1 + 6*t");
  REQUIRE(t.to_string(t.parse_elem("2(x+1)t")) == "(2x+2)*t");
  REQUIRE(t.to_string(t.parse_elem("0")) == "0");
  REQUIRE_THROWS_AS(t.parse_elem("y+1"), Error);
  REQUIRE_THROWS_AS(t.parse_elem("t^"), Error);
  REQUIRE_THROWS_AS(t.parse_elem("(1+t"), Error);
  // Division by a multi-term series is not exactly representable.
  REQUIRE_THROWS_AS(t.parse_elem("1/(1+t)"), Error);
  REQUIRE(t.to_string(t.parse_elem("(x+1)/(x+1)")) == "1");
}

TEST_CASE("series arithmetic is exact") {
  Tower t = laurent1();
  Elem a = t.parse_elem("1+t");
  Elem b = t.parse_elem("1-t");
  REQUIRE(t.to_string(t.mul(a, b)) == "1 + 6*t^2");
  REQUIRE(t.exact_zero(t.sub(a, a)));
  REQUIRE(t.to_string(t.pow(a, 3)) == "1 + 3*t + 3*t^2 + t^3");
  // (t^2)^-1 via monomial division
  REQUIRE(t.to_string(t.pow(t.parse_elem("2t^2"), -1)) == "4*t^-2");
}

TEST_CASE("truncation tracks precision through arithmetic") {
  Tower t = laurent1();
  Elem a = t.truncate(t.parse_elem("1+t"), 3);
  Elem p = t.mul(a, a);
  REQUIRE(p.kind == Elem::Kind::Series);
  REQUIRE_FALSE(p.ser->exact);
  REQUIRE(p.ser->prec == 3);
  // Known coefficients: 1 + 2t + t^2
  REQUIRE(p.ser->terms.size() == 3);
  // A truncated tail does not block the class: leading unit still visible.
  auto r = class_of(t, t.seed_context(), p);
  REQUIRE(r.cls.is_zero());
  // Truncating away the leading term does.
  Elem hidden = t.truncate(t.parse_elem("t^2"), 1);
  REQUIRE_THROWS_AS(class_of(t, t.seed_context(), hidden), Error);
  try {
    class_of(t, t.seed_context(), hidden);
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::PrecisionLoss);
  }
}

TEST_CASE("class computation on Laurent towers") {
  Tower t = laurent2();
  Context ctx = t.seed_context();

  SECTION("monomial example") {
    auto r = class_of(t, ctx, t.parse_elem("5*s*t^4"));
    REQUIRE(r.cls == cls(ctx, {{"zeta", 2}, {"s", 1}, {"t", 1}}));
  }
  SECTION("cubes vanish") {
    Elem y = t.parse_elem("2*s^2 + t");
    auto ry = class_of(t, ctx, y);
    REQUIRE(ry.cls == cls(ctx, {{"zeta", 2}, {"s", 2}}));
    auto r3 = class_of(t, ctx, t.pow(y, 3));
    REQUIRE(r3.cls.is_zero());
  }
  SECTION("zero element refused") {
    REQUIRE_THROWS_AS(class_of(t, ctx, t.parse_elem("0")), Error);
  }
  SECTION("principal units are cubes") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 200; ++i) {
      Elem y = t.zero();
      int terms = 1 + static_cast<int>(rng() % 3);
      for (int j = 0; j < terms; ++j) {
        int b = static_cast<int>(rng() % 4);           // t exponent 0..3
        int a = static_cast<int>(rng() % 9) - 4;       // s exponent -4..4
        if (b == 0 && a <= 0) a = 1 + (a + 4) % 4;     // keep v lex positive
        u64 u = 1 + rng() % 6;
        Elem mono = t.scalar_elem(static_cast<long long>(u));
        if (a != 0) mono = t.mul(mono, t.var_elem(1, a));
        if (b != 0) mono = t.mul(mono, t.var_elem(2, b));
        y = t.add(y, mono);
      }
      if (t.exact_zero(y)) continue;
      auto r = class_of(t, ctx, t.add(t.one(), y));
      REQUIRE(r.cls.is_zero());
    }
  }
}

TEST_CASE("class computation over a rational base") {
  Tower t = rational0();
  Context ctx = t.seed_context();

  SECTION("irreducible quadratic mints a basis index") {
    auto r = class_of(t, ctx, t.parse_elem("x^2+1"));
    BasisIndex b = BasisIndex::irr(2, "x^2+1");
    REQUIRE(r.ctx.has(b));
    REQUIRE(r.cls.get(b) == 1);
    REQUIRE(r.cls.e.size() == 1);
  }
  SECTION("quotients subtract multiplicities") {
    auto r = class_of(t, ctx, t.parse_elem("(x+1)/(x-1)^2"));
    REQUIRE(r.cls.get(BasisIndex::irr(1, "x+1")) == 1);
    REQUIRE(r.cls.get(BasisIndex::irr(1, "x-1")) == 1);  // -2 = 1 mod 3
    REQUIRE(r.cls.get(BasisIndex::unit()) == 0);
  }
  SECTION("constants use the dlog class") {
    auto r = class_of(t, ctx, t.parse_elem("5"));
    REQUIRE(r.cls == cls(ctx, {{"zeta", 2}}));
  }
  SECTION("homomorphism on random pairs") {
    Tower tw = rational1();
    Context c0 = tw.seed_context();
    std::vector<Elem> atoms;
    for (const char* s :
         {"2", "3", "t", "t^-1", "x", "x+1", "x-2", "x^2+1", "1+t", "1+x*t",
          "x*t^2", "(x+3)/(x-3)"})
      atoms.push_back(tw.parse_elem(s));
    std::mt19937_64 rng(97);
    Context ctx2 = c0;
    for (int i = 0; i < 500; ++i) {
      const Elem& a = atoms[rng() % atoms.size()];
      const Elem& b = atoms[rng() % atoms.size()];
      auto ra = class_of(tw, ctx2, a);
      ctx2 = ra.ctx;
      auto rb = class_of(tw, ctx2, b);
      ctx2 = rb.ctx;
      auto rab = class_of(tw, ctx2, tw.mul(a, b));
      ctx2 = rab.ctx;
      REQUIRE(rab.cls == fl_add(ra.cls, rb.cls, 3));
    }
    // ell-th powers die
    for (const Elem& a : atoms) {
      auto r = class_of(tw, ctx2, tw.pow(a, 3));
      ctx2 = r.ctx;
      REQUIRE(r.cls.is_zero());
    }
  }
}

TEST_CASE("chain valuations of elements") {
  Tower t = laurent2();
  Elem e = t.parse_elem("s^2*t^-1 + t^2");
  REQUIRE(valuation_of(t, e, 0).empty());
  REQUIRE(valuation_of(t, e, 1) == std::vector<int>{-1});
  REQUIRE(valuation_of(t, e, 2) == std::vector<int>{-1, 2});
  REQUIRE_THROWS_AS(valuation_of(t, e, 3), Error);
}

TEST_CASE("representative families") {
  SECTION("finite floor") {
    Tower t(3, 7, false, "", {});
    Context ctx = t.seed_context();
    auto reps = representatives(t, ctx, cls(ctx, {{"zeta", 1}}), 2);
    REQUIRE(reps.size() == 2);
    REQUIRE(reps[0].scalar == 3);
    REQUIRE(reps[1].scalar == 4);
  }
  SECTION("laurent monomials carry the class exactly") {
    Tower t = laurent1();
    Context ctx = t.seed_context();
    FlVector c = cls(ctx, {{"t", 1}});
    auto reps = representatives(t, ctx, c, 2);
    REQUIRE(reps.size() == 6);  // units {1,6} x exponents {1,-2,4}
    REQUIRE(t.to_string(reps[0]) == "t");
    std::set<std::string> shown;
    for (const Elem& r : reps) {
      auto rc = class_of(t, ctx, r);
      REQUIRE(rc.cls == c);
      shown.insert(t.to_string(r));
    }
    REQUIRE(shown.count("t^-2") == 1);
    REQUIRE(shown.count("t^4") == 1);
  }
  SECTION("zero class includes one and principal-unit perturbations") {
    Tower t = laurent1();
    Context ctx = t.seed_context();
    auto reps = representatives(t, ctx, FlVector{}, 2);
    REQUIRE(t.to_string(reps[0]) == "1");
    bool saw_perturbed = false;
    for (const Elem& r : reps) {
      auto rc = class_of(t, ctx, r);
      REQUIRE(rc.cls.is_zero());
      if (t.to_string(r).find("1 + ") == 0) saw_perturbed = true;
    }
    REQUIRE(saw_perturbed);
  }
  SECTION("rational base products") {
    Tower t = rational0();
    FieldSpec s;
    s.rational = true;
    s.irreducibles = {"x", "x+1"};
    Context ctx = context_from_spec(t, s);
    FlVector c = cls(ctx, {{"x", 1}, {"zeta", 2}});
    auto reps = representatives(t, ctx, c, 3, 500);
    REQUIRE(!reps.empty());
    Context work = ctx;
    for (const Elem& r : reps) {
      auto rc = class_of(t, work, r);
      work = rc.ctx;
      REQUIRE(rc.cls == c);
    }
  }
}

TEST_CASE("one minus classes: certified case analysis") {
  SECTION("finite floor") {
    Tower t(3, 7, false, "", {});
    Context ctx = t.seed_context();
    auto r1 = one_minus_classes(t, ctx, cls(ctx, {{"zeta", 1}}), 2);
    REQUIRE(r1.certified);
    REQUIRE(r1.classes ==
            std::set<FlVector>{cls(ctx, {{"zeta", 1}}), cls(ctx, {{"zeta", 2}})});
    auto r2 = one_minus_classes(t, ctx, cls(ctx, {{"zeta", 2}}), 2);
    REQUIRE(r2.classes ==
            std::set<FlVector>{FlVector{}, cls(ctx, {{"zeta", 1}})});
    auto r0 = one_minus_classes(t, ctx, FlVector{}, 2);
    REQUIRE(r0.classes == std::set<FlVector>{cls(ctx, {{"zeta", 2}})});
  }
  SECTION("one Laurent layer") {
    Tower t = laurent1();
    Context ctx = t.seed_context();
    auto rt = one_minus_classes(t, ctx, cls(ctx, {{"t", 1}}), 2);
    REQUIRE(rt.certified);
    REQUIRE(rt.classes == std::set<FlVector>{FlVector{}, cls(ctx, {{"t", 1}})});
    auto rz = one_minus_classes(t, ctx, cls(ctx, {{"zeta", 1}}), 2);
    REQUIRE(rz.classes == std::set<FlVector>{FlVector{}, cls(ctx, {{"zeta", 1}}),
                                             cls(ctx, {{"zeta", 2}})});
    auto r0 = one_minus_classes(t, ctx, FlVector{}, 2);
    REQUIRE(r0.classes.size() == 9);  // every class over {zeta, t}
  }
  SECTION("two Laurent layers") {
    Tower t = laurent2();
    Context ctx = t.seed_context();
    auto rs = one_minus_classes(t, ctx, cls(ctx, {{"s", 1}}), 2);
    REQUIRE(rs.certified);
    REQUIRE(rs.classes == std::set<FlVector>{FlVector{}, cls(ctx, {{"s", 1}})});
    auto rmix = one_minus_classes(t, ctx, cls(ctx, {{"s", 2}, {"t", 1}}), 2);
    REQUIRE(rmix.classes ==
            std::set<FlVector>{FlVector{}, cls(ctx, {{"s", 2}, {"t", 1}})});
  }
}

namespace {

// Brute-force family: exact monomials and principal-unit perturbations,
// truncated at precision 6 so the truncation plumbing is exercised.
void brute_check(const Tower& t) {
  Context ctx = t.seed_context();
  int n = t.layers();
  std::vector<Elem> family;
  auto push = [&](Elem e) { family.push_back(t.truncate(e, 6)); };
  std::vector<int> exp(n, -4);
  while (true) {
    for (u64 u = 1; u < 7; ++u) {
      Elem m = t.scalar_elem(static_cast<long long>(u));
      for (int lv = 1; lv <= n; ++lv)
        if (exp[lv - 1] != 0) m = t.mul(m, t.var_elem(lv, exp[lv - 1]));
      push(m);
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++exp[i] <= 4) break;
      exp[i] = -4;
    }
    if (i == n) break;
  }
  std::vector<int> e2(n, -2), f(n, -3);
  while (true) {
    std::vector<int> fv(n, -3);
    while (true) {
      bool lexpos = false;
      for (int lv = n; lv >= 1; --lv) {
        if (fv[lv - 1] > 0) { lexpos = true; break; }
        if (fv[lv - 1] < 0) break;
      }
      if (lexpos) {
        for (u64 u = 1; u < 7; ++u)
          for (u64 w = 1; w < 7; ++w) {
            Elem m = t.scalar_elem(static_cast<long long>(u));
            for (int lv = 1; lv <= n; ++lv)
              if (e2[lv - 1] != 0) m = t.mul(m, t.var_elem(lv, e2[lv - 1]));
            Elem pert = t.scalar_elem(static_cast<long long>(w));
            for (int lv = 1; lv <= n; ++lv)
              if (fv[lv - 1] != 0) pert = t.mul(pert, t.var_elem(lv, fv[lv - 1]));
            push(t.mul(m, t.add(t.one(), pert)));
          }
      }
      int i = 0;
      for (; i < n; ++i) {
        if (++fv[i] <= 3) break;
        fv[i] = -3;
      }
      if (i == n) break;
    }
    int i = 0;
    for (; i < n; ++i) {
      if (++e2[i] <= 2) break;
      e2[i] = -2;
    }
    if (i == n) break;
  }
  // Bucket by class(x), record class(1-x).
  std::map<FlVector, std::set<FlVector>> observed;
  for (const Elem& x : family) {
    auto cx = class_of(t, ctx, x);
    Elem om = t.sub(t.one(), x);
    if (!t.definitely_nonzero(om)) continue;
    auto co = class_of(t, ctx, om);
    observed[cx.cls].insert(co.cls);
  }
  // Every class must be observed and match the certified analysis exactly.
  std::set<FlVector> all;
  detail::all_classes_below(ctx, n, all);
  for (const FlVector& c : all) {
    auto certified = one_minus_classes(t, ctx, c, 2);
    REQUIRE(certified.certified);
    auto it = observed.find(c);
    REQUIRE(it != observed.end());
    REQUIRE(it->second == certified.classes);
  }
}

}  // namespace

TEST_CASE("one minus classes agree with a brute-force sweep") {
  brute_check(laurent1());
  brute_check(laurent2());
}

TEST_CASE("one minus classes over a rational base are bounded") {
  Tower t = rational0();
  FieldSpec s;
  s.rational = true;
  s.irreducibles = {"x"};
  Context ctx = context_from_spec(t, s);
  auto r = one_minus_classes(t, ctx, cls(ctx, {{"x", 1}}), 2);
  REQUIRE_FALSE(r.certified);
  REQUIRE(r.bound == 2);
  // 1 - x has class [x-1] + zeta-class of -1 = [x-1]; that class must appear.
  bool found = false;
  for (const FlVector& v : r.classes)
    if (v.get(BasisIndex::irr(1, "x-1")) == 1) found = true;
  REQUIRE(found);
  // Context grew to include minted irreducibles.
  REQUIRE(r.ctx.dim() >= ctx.dim());
}

TEST_CASE("unit subgroups of chain valuations") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  auto [uv2, uv12] = units_subgroups(t, ctx, 2);
  REQUIRE(uv2.dim() == 1);
  REQUIRE(uv2.contains(cls(ctx, {{"zeta", 1}})));
  REQUIRE(uv12.dim() == 0);
  auto [uv0, uv10] = units_subgroups(t, ctx, 0);
  REQUIRE(uv0.dim() == 3);
  REQUIRE_THROWS_AS(units_subgroups(t, ctx, 3), Error);

  Tower tr = rational1();
  FieldSpec s;
  s.rational = true;
  s.irreducibles = {"x", "x+1"};
  Context rctx = context_from_spec(tr, s);
  auto [uv1r, uv11r] = units_subgroups(tr, rctx, 1);
  REQUIRE(uv1r.dim() == 3);  // zeta + two irreducibles
  REQUIRE(uv1r.contains(cls(rctx, {{"x+1", 1}})));
  REQUIRE(!uv1r.contains(cls(rctx, {{"t", 1}})));
}

TEST_CASE("residue transfer is the identity on unit coordinates") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  Subspace T = echelonize(ctx, {cls(ctx, {{"zeta", 1}})});
  Subspace down = residue_transfer(t, ctx, 2, T);
  REQUIRE(down.ctx.dim() == 1);  // residue context {zeta}
  REQUIRE(down.dim() == 1);      // full class space of F_7
  Subspace z = residue_transfer(t, ctx, 2, zero_subspace(ctx));
  REQUIRE(z.dim() == 0);
  // t-coordinate is not a level-1 unit
  Subspace bad = echelonize(ctx, {cls(ctx, {{"t", 1}})});
  REQUIRE_THROWS_AS(residue_transfer(t, ctx, 1, bad), Error);

  Tower tr = rational1();
  FieldSpec s;
  s.rational = true;
  s.irreducibles = {"x"};
  Context rctx = context_from_spec(tr, s);
  Subspace T2 = echelonize(
      rctx, {cls(rctx, {{"zeta", 1}}), cls(rctx, {{"x", 1}})});
  Subspace down2 = residue_transfer(tr, rctx, 1, T2);
  REQUIRE(down2.dim() == 2);
  REQUIRE(down2.contains(cls(rctx, {{"x", 1}})));
}

TEST_CASE("field spec JSON wiring") {
  const char* text = R"({"ell":3,"base":{"kind":"rational","q":7,"var":"x"},
    "laurent":["s","t"],
    "context":{"irreducibles":["x","x+1","x-1"],"degree_bound":2}})";
  FieldSpec s = parse_field_spec(std::string(text));
  REQUIRE(s.ell == 3);
  REQUIRE(s.rational);
  REQUIRE(s.q == 7);
  REQUIRE(s.laurent == std::vector<std::string>{"s", "t"});
  REQUIRE(s.degree_bound == 2);
  Tower t = tower_from_spec(s);
  REQUIRE(t.layers() == 2);
  Context ctx = context_from_spec(t, s);
  REQUIRE(ctx.dim() == 6);  // zeta, s, t, x, x+1, x-1

  REQUIRE_THROWS_AS(parse_field_spec(std::string("{")), Error);
  REQUIRE_THROWS_AS(parse_field_spec(std::string("{\"ell\":3}")), Error);
  FieldSpec bad = s;
  bad.irreducibles = {"x^2-1"};  // reducible
  REQUIRE_THROWS_AS(context_from_spec(t, bad), Error);

  const char* fin = R"({"ell":3,"base":{"kind":"finite","q":7}})";
  FieldSpec fs = parse_field_spec(std::string(fin));
  REQUIRE_FALSE(fs.rational);
  REQUIRE(tower_from_spec(fs).layers() == 0);
}
