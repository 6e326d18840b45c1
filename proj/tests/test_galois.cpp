#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <utility>
#include <vector>

#include "valdetect/galois.hpp"

using namespace valdetect;

namespace {

Tower finite0() { return Tower(3, 7, false, "", {}); }
Tower laurent1() { return Tower(3, 7, false, "", {"t"}); }
Tower laurent2() { return Tower(3, 7, false, "", {"s", "t"}); }
Tower rational0() { return Tower(3, 7, true, "x", {}); }
Tower rational1() { return Tower(3, 7, true, "x", {"t"}); }

// Seed window plus the three degree-one classes used throughout: the
// smallest rational window whose kernel carries vanishing-symbol relations.
Context xwin3(const Tower& t) {
  Context ctx = t.seed_context();
  for (const char* n : {"x", "x+1", "x-1"}) ctx.add(BasisIndex::irr(1, n));
  return ctx;
}

FlVector key1(const Context& ctx, const BasisIndex& b) {
  return FlVector::unit(b, 1, ctx.ell);
}

FlVector zeta(const Context& ctx) { return key1(ctx, BasisIndex::unit()); }

FlVector var1(const Context& ctx, int lv, const char* name) {
  return key1(ctx, BasisIndex::var(lv, name));
}

Character chr(FlVector v) { return Character{std::move(v)}; }

// Every element of a subgroup, zero included (coefficient odometer).
std::vector<FlVector> elements_of(const Context& ctx, const Subspace& S) {
  std::vector<FlVector> out;
  const int d = S.dim();
  std::vector<int> c(d, 0);
  while (true) {
    FlVector v;
    for (int i = 0; i < d; ++i)
      if (c[i]) v.add_scaled(S.rows[static_cast<size_t>(i)], c[i], ctx.ell);
    out.push_back(std::move(v));
    int i = d - 1;
    while (i >= 0 && c[i] == ctx.ell - 1) c[i--] = 0;
    if (i < 0) break;
    ++c[i];
  }
  return out;
}

CommClass cc_add(const CommClass& a, const CommClass& b, int ell) {
  CommClass out;
  for (size_t i = 0; i < a.values.size(); ++i)
    out.values.push_back(mod_norm(a.values[i] + b.values[i], ell));
  return out;
}

CommClass cc_scale(int k, const CommClass& a, int ell) {
  CommClass out;
  for (int v : a.values) out.values.push_back(mod_norm(k * v, ell));
  return out;
}

FlVector rand_dual(const Context& ctx, std::mt19937_64& rng) {
  FlVector v;
  for (const BasisIndex& b : ctx.basis)
    v.set(b, static_cast<int>(rng() % static_cast<unsigned>(ctx.ell)),
          ctx.ell);
  return v;
}

// Independent oracle for the almost-commuting center: enumerate every
// element of Z and keep those whose pairing against each generator lands in
// the beta span.  Both argument orders are checked, so the result also
// certifies that the sign convention of the pairing cannot change the
// subgroup (the span is closed under negation).
Subspace brute_center(const KerTheta& kt, const Subspace& Z) {
  detail::DenseSpan bspan = detail::beta_span(kt, Z);
  std::vector<FlVector> good;
  for (const FlVector& s : elements_of(kt.ctx, Z)) {
    bool ok = true;
    for (const FlVector& tau : Z.rows) {
      if (!bspan.contains(comm_class(kt, chr(s), chr(tau)).values)) ok = false;
      if (!bspan.contains(comm_class(kt, chr(tau), chr(s)).values)) ok = false;
    }
    if (ok) good.push_back(s);
  }
  return echelonize(kt.ctx, good);
}

}  // namespace

TEST_CASE("the comparison-map kernel matches hand-checked relation bases") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  KerTheta kt = ker_theta(t, ctx);
  REQUIRE(kt.n() == 3);
  REQUIRE(kt.domain_dim() == 6);
  REQUIRE(kt.dim() == 3);
  REQUIRE(kt.omega == omega_vector(t));
  REQUIRE(kt.omega.get(BasisIndex::unit()) == 2);

  // Kernel basis in free-column order: the Bockstein relation for the root
  // of unity, then one wedge-with-beta row per Laurent variable.
  REQUIRE(kt.display_vector(kt.basis[0]) == "beta(zeta)");
  REQUIRE(kt.display_vector(kt.basis[1]) == "zeta^s + 2*beta(s)");
  REQUIRE(kt.display_vector(kt.basis[2]) == "zeta^t + 2*beta(t)");
  REQUIRE(kt.basis[0][static_cast<size_t>(kt.beta_coord(0))] == 1);
  REQUIRE(kt.basis[1][static_cast<size_t>(kt.wedge_coord(0, 1))] == 1);
  REQUIRE(kt.basis[1][static_cast<size_t>(kt.beta_coord(1))] == 2);
  REQUIRE(kt.basis[2][static_cast<size_t>(kt.wedge_coord(0, 2))] == 1);
  REQUIRE(kt.basis[2][static_cast<size_t>(kt.beta_coord(2))] == 2);

  for (const auto& w : kt.basis) REQUIRE(theta_apply(kt, w).is_zero());
  // A bare wedge of independent classes is not a relation.
  std::vector<int> w(static_cast<size_t>(kt.domain_dim()), 0);
  w[static_cast<size_t>(kt.wedge_coord(1, 2))] = 1;
  REQUIRE_FALSE(theta_apply(kt, w).is_zero());
  REQUIRE_THROWS_AS(theta_apply(kt, std::vector<int>(5, 0)), Error);

  SECTION("finite base field: only the Bockstein relation survives") {
    Tower f = finite0();
    Context fc = f.seed_context();
    KerTheta kf = ker_theta(f, fc);
    REQUIRE(kf.dim() == 1);
    REQUIRE(kf.display_vector(kf.basis[0]) == "beta(zeta)");
  }

  SECTION("rational window: a vanishing symbol shows up as a pure wedge") {
    Tower r = rational0();
    Context rc = r.seed_context();
    rc.add(BasisIndex::irr(1, "x"));
    rc.add(BasisIndex::irr(1, "x+1"));
    KerTheta kr = ker_theta(r, rc);
    REQUIRE(kr.dim() == 4);
    // x and x+1 = x - (-1) pair to zero, so the wedge itself is a relation.
    REQUIRE(kr.display_vector(kr.basis[0]) == "x^x+1");
    std::vector<int> pw(static_cast<size_t>(kr.domain_dim()), 0);
    pw[static_cast<size_t>(kr.wedge_coord(1, 2))] = 1;
    REQUIRE(theta_apply(kr, pw).is_zero());
  }

  SECTION("construction leaves the caller's window untouched") {
    Tower r = rational1();
    Context rc = xwin3(r);
    REQUIRE(rc.dim() == 5);
    KerTheta kr = ker_theta(r, rc);
    REQUIRE(kr.n() == 5);
    REQUIRE(kr.dim() == 8);
    REQUIRE(rc.dim() == 5);
  }

  SECTION("window size gate") {
    Tower r = rational1();
    Context big = r.seed_context();
    for (const char* n : {"x", "x+1", "x-1", "x+2", "x-2", "x+3", "x-3"})
      big.add(BasisIndex::irr(1, n));
    big.add(BasisIndex::irr(2, "x^2+1"));
    big.add(BasisIndex::irr(2, "x^2+2"));
    REQUIRE(big.dim() == 11);
    try {
      ker_theta(r, big);
      FAIL("expected a size failure");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::TooLarge);
    }
  }
}

TEST_CASE("pairing functionals reproduce the derived commutator values") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  KerTheta kt = ker_theta(t, ctx);
  Character sz = chr(zeta(ctx));
  Character ss = chr(var1(ctx, 1, "s"));
  Character st = chr(var1(ctx, 2, "t"));

  REQUIRE(comm_class(kt, ss, st).is_zero());
  REQUIRE(comm_class(kt, sz, st).values == std::vector<int>{0, 0, 1});
  REQUIRE(comm_class(kt, sz, ss).values == std::vector<int>{0, 1, 0});
  REQUIRE(beta_class(kt, st).values == std::vector<int>{0, 0, 2});
  REQUIRE(beta_class(kt, sz).values == std::vector<int>{1, 0, 0});

  // The commutator of the cyclotomic character against an inertia character
  // is the Bockstein line of that inertia character, scaled by the omega
  // exponent.
  REQUIRE(comm_class(kt, sz, st) == cc_scale(2, beta_class(kt, st), 3));
  REQUIRE(comm_class(kt, sz, ss) == cc_scale(2, beta_class(kt, ss), 3));

  for (const Character& c : {sz, ss, st}) {
    REQUIRE(comm_class(kt, c, c).is_zero());
    CommClass ab = comm_class(kt, c, st);
    CommClass ba = comm_class(kt, st, c);
    REQUIRE(cc_add(ab, ba, 3).is_zero());
  }
  REQUIRE(comm_class(kt, chr(FlVector{}), st).is_zero());
  REQUIRE(beta_class(kt, chr(FlVector{})).is_zero());

  REQUIRE(pair_eval(var1(ctx, 2, "t"), kt.omega, 3) == 0);
  REQUIRE(pair_eval(zeta(ctx), kt.omega, 3) == 2);

  SECTION("characters must live on the window") {
    Character stray = chr(key1(ctx, BasisIndex::irr(1, "x")));
    try {
      comm_class(kt, stray, st);
      FAIL("expected a context failure");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::ContextMismatch);
    }
  }
}

TEST_CASE("pairings are bilinear and alternating on seeded characters") {
  Tower t = rational1();
  Context ctx = xwin3(t);
  KerTheta kt = ker_theta(t, ctx);
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 200; ++trial) {
    FlVector a = rand_dual(ctx, rng);
    FlVector b = rand_dual(ctx, rng);
    FlVector c = rand_dual(ctx, rng);
    FlVector ab = a;
    ab.add_scaled(b, 1, 3);

    CommClass lhs = comm_class(kt, chr(ab), chr(c));
    CommClass rhs = cc_add(comm_class(kt, chr(a), chr(c)),
                           comm_class(kt, chr(b), chr(c)), 3);
    REQUIRE(lhs == rhs);

    CommClass fwd = comm_class(kt, chr(a), chr(b));
    CommClass rev = comm_class(kt, chr(b), chr(a));
    REQUIRE(cc_add(fwd, rev, 3).is_zero());
    REQUIRE(comm_class(kt, chr(a), chr(a)).is_zero());

    FlVector a2 = a;
    a2.add_scaled(a, 1, 3);
    REQUIRE(comm_class(kt, chr(a2), chr(b)) == cc_scale(2, fwd, 3));

    CommClass bsum = beta_class(kt, chr(ab));
    REQUIRE(bsum ==
            cc_add(beta_class(kt, chr(a)), beta_class(kt, chr(b)), 3));
  }
}

TEST_CASE("the almost-commuting center agrees with brute-force membership") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  KerTheta kt = ker_theta(t, ctx);

  REQUIRE(acl_center(kt, full_subspace(ctx)) == full_subspace(ctx));
  REQUIRE(acl_center(kt, zero_subspace(ctx)) == zero_subspace(ctx));
  Subspace zs = echelonize(ctx, {zeta(ctx), var1(ctx, 1, "s")});
  REQUIRE(acl_center(kt, zs) == zs);

  for_each_subspace(ctx, 100, [&](const Subspace& Z) {
    Subspace c = acl_center(kt, Z);
    REQUIRE(Z.contains_all(c));
    REQUIRE(c == brute_center(kt, Z));
    REQUIRE(acl_center(kt, c) == c);
  });

  SECTION("the full rational window centers on its inertia line") {
    Tower r = rational1();
    Context rc = xwin3(r);
    KerTheta kr = ker_theta(r, rc);
    Subspace center = acl_center(kr, full_subspace(rc));
    REQUIRE(center == echelonize(rc, {var1(rc, 1, "t")}));
  }

  SECTION("subgroup size gate") {
    Tower r = rational1();
    Context big = xwin3(r);
    for (const char* n : {"x+2", "x-2", "x+3", "x-3"})
      big.add(BasisIndex::irr(1, n));
    REQUIRE(big.dim() == 9);
    KerTheta kb = ker_theta(r, big);
    try {
      acl_center(kb, full_subspace(big));
      FAIL("expected a size failure");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::TooLarge);
    }
  }

  SECTION("the subgroup must live on the kernel's window") {
    Tower r = rational0();
    Context other = r.seed_context();
    REQUIRE_THROWS_AS(acl_center(kt, full_subspace(other)), Error);
  }
}

TEST_CASE("the dual track recomputes the center through the class closure") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  KerTheta kt = ker_theta(t, ctx);

  // Complete window: the two tracks must agree exactly, with certificates.
  for_each_subspace(ctx, 100, [&](const Subspace& Z) {
    auto [dual, v] = acl_center_dual(t, Z, ctx);
    REQUIRE(v.certified);
    REQUIRE(dual == acl_center(kt, Z));
  });

  // Truncated rational window: agreement whenever the closure certificate
  // is available; otherwise the closure may over-sweep the annihilator of a
  // small subgroup (its out-of-window partners are not quotiented away), so
  // the dual track can only shrink, never grow, the center.
  Tower r = rational1();
  Context rc = xwin3(r);
  KerTheta kr = ker_theta(r, rc);
  std::mt19937 rng(0);
  int equal = 0, contained = 0;
  for (int trial = 0; trial < 20; ++trial) {
    int d = 1 + static_cast<int>(rng() % 4);
    std::vector<FlVector> gens;
    for (int i = 0; i < d; ++i) {
      FlVector v;
      for (const BasisIndex& b : rc.basis)
        v.set(b, static_cast<int>(rng() % 3), 3);
      gens.push_back(std::move(v));
    }
    Subspace Z = echelonize(rc, gens);
    Subspace center = acl_center(kr, Z);
    auto [dual, v] = acl_center_dual(r, Z, rc);
    if (dual == center) {
      ++equal;
    } else {
      REQUIRE_FALSE(v.certified);
      REQUIRE(v.bound == 4);
      REQUIRE(center.contains_all(dual));
      ++contained;
    }
  }
  REQUIRE(equal == 13);
  REQUIRE(contained == 7);
}

TEST_CASE("decomposition and inertia annihilators along the chain") {
  Tower t = laurent2();
  Context ctx = t.seed_context();

  DualPair p0 = d1_i1_of_v(t, 0, ctx);
  REQUIRE(p0.d1 == full_subspace(ctx));
  REQUIRE(p0.i1 == zero_subspace(ctx));

  DualPair p1 = d1_i1_of_v(t, 1, ctx);
  REQUIRE(p1.d1 == full_subspace(ctx));
  REQUIRE(p1.i1 == echelonize(ctx, {var1(ctx, 2, "t")}));

  DualPair p2 = d1_i1_of_v(t, 2, ctx);
  REQUIRE(p2.d1 == full_subspace(ctx));
  REQUIRE(p2.i1 ==
          echelonize(ctx, {var1(ctx, 1, "s"), var1(ctx, 2, "t")}));

  for (int lv = 0; lv <= 2; ++lv) {
    DualPair p = d1_i1_of_v(t, lv, ctx);
    REQUIRE(p.d1.contains_all(p.i1));
  }
  REQUIRE_THROWS_AS(d1_i1_of_v(t, 3, ctx), Error);
  REQUIRE_THROWS_AS(d1_i1_of_v(t, -1, ctx), Error);

  SECTION("rational window") {
    Tower r = rational1();
    Context rc = xwin3(r);
    DualPair q = d1_i1_of_v(r, 1, rc);
    REQUIRE(q.d1 == full_subspace(rc));
    REQUIRE(q.i1 == echelonize(rc, {var1(rc, 1, "t")}));
  }
}

TEST_CASE("inertia commutators against decomposition stay on the beta line") {
  struct Lane {
    Tower t;
    Context ctx;
  };
  std::vector<Lane> lanes;
  {
    Tower t = laurent2();
    Context c = t.seed_context();
    lanes.push_back({std::move(t), std::move(c)});
  }
  {
    Tower t = rational1();
    Context c = xwin3(t);
    lanes.push_back({std::move(t), std::move(c)});
  }

  for (const Lane& lane : lanes) {
    KerTheta kt = ker_theta(lane.t, lane.ctx);
    for (int lv = 0; lv <= lane.t.layers(); ++lv) {
      DualPair p = d1_i1_of_v(lane.t, lv, lane.ctx);
      for (const FlVector& s : elements_of(lane.ctx, p.i1)) {
        detail::DenseSpan line(lane.ctx.ell);
        line.add(beta_class(kt, chr(s)).values);
        for (const FlVector& u : elements_of(lane.ctx, p.d1)) {
          CommClass c = comm_class(kt, chr(s), chr(u));
          REQUIRE(line.contains(c.values));
          // Fixing the distinguished root of unity forces commutation.
          if (pair_eval(u, kt.omega, lane.ctx.ell) == 0)
            REQUIRE(c.is_zero());
        }
      }
    }
  }

  // The worked instance: cyclotomic against deepest inertia.
  Tower t = laurent2();
  Context ctx = t.seed_context();
  KerTheta kt = ker_theta(t, ctx);
  CommClass c = comm_class(kt, chr(zeta(ctx)), chr(var1(ctx, 2, "t")));
  REQUIRE(c == cc_scale(2, beta_class(kt, chr(var1(ctx, 2, "t"))), 3));
}

TEST_CASE("subgroups of an almost-commuting subgroup almost-commute") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  KerTheta kt = ker_theta(t, ctx);
  int acl_count = 0;
  for_each_subspace(ctx, 100, [&](const Subspace& Z) {
    if (!(acl_center(kt, Z) == Z)) return;
    ++acl_count;
    for (const Subspace& sub : detail::proper_subgroups(ctx, Z, 1000))
      REQUIRE(acl_center(kt, sub) == sub);
  });
  REQUIRE(acl_count > 1);
}

TEST_CASE("centralizers contain their subgroup and stay almost-commuting") {
  Tower t = laurent2();
  Context ctx = t.seed_context();
  KerTheta kt = ker_theta(t, ctx);

  Subspace st2 = echelonize(ctx, {var1(ctx, 1, "s"), var1(ctx, 2, "t")});
  REQUIRE(centralizer(kt, st2) == full_subspace(ctx));
  REQUIRE(centralizer(kt, zero_subspace(ctx)) == full_subspace(ctx));

  for_each_subspace(ctx, 100, [&](const Subspace& Z) {
    if (!(acl_center(kt, Z) == Z)) return;
    Subspace c = centralizer(kt, Z);
    REQUIRE(c.contains_all(Z));
    // The subgroup sits inside the center of its own centralizer.
    REQUIRE(acl_center(kt, c).contains_all(Z));
  });

  SECTION("rational window: the inertia line centralizes to everything") {
    Tower r = rational1();
    Context rc = xwin3(r);
    KerTheta kr = ker_theta(r, rc);
    Subspace tl = echelonize(rc, {var1(rc, 1, "t")});
    REQUIRE(centralizer(kr, tl) == full_subspace(rc));
    REQUIRE(centralizer(kr, tl) == d1_i1_of_v(r, 1, rc).d1);
    try {
      centralizer(kr, full_subspace(rc));
      FAIL("expected a non-commuting failure");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::NotACL);
    }
  }
}

TEST_CASE("maximal-center detection matches the valuation side") {
  SECTION("complete windows carry no admissible valuation and no member") {
    for (Tower t : {finite0(), laurent1(), laurent2()}) {
      Context ctx = t.seed_context();
      MaximalCenterReport rep = enumerate_maximal_centers(t, ctx);
      REQUIRE(rep.members.empty());
      REQUIRE(rep.window_artifacts.empty());
      REQUIRE(rep.admitted_levels.empty());
      REQUIRE(rep.scanned ==
              count_all_subspaces(ctx.dim(), ctx.ell));
      REQUIRE(rep.holds());
      REQUIRE(rep.clauses_agree);
      REQUIRE(rep.assurance.certified);
    }
  }

  SECTION("the rational window detects exactly its chain valuation") {
    Tower t = rational1();
    Context ctx = xwin3(t);
    MaximalCenterReport rep = enumerate_maximal_centers(t, ctx);

    REQUIRE(rep.scanned == count_all_subspaces(5, 3));
    REQUIRE(rep.members.size() == 1);
    REQUIRE(rep.members[0].subgroup == full_subspace(ctx));
    REQUIRE(rep.members[0].center ==
            echelonize(ctx, {var1(ctx, 1, "t")}));

    REQUIRE(rep.admitted_levels == std::vector<int>{1});
    DualPair dp = d1_i1_of_v(t, 1, ctx);
    REQUIRE(rep.members[0].subgroup == dp.d1);
    REQUIRE(rep.members[0].center == dp.i1);
    REQUIRE(rep.holds());
    REQUIRE(rep.well_defined);
    REQUIRE(rep.injective);
    REQUIRE(rep.surjective);
    REQUIRE(rep.centers_match);
    REQUIRE_FALSE(rep.assurance.certified);
    REQUIRE(rep.assurance.value);
    REQUIRE(rep.assurance.bound == 4);

    // Window truncation lets two subgroups through exactly one clause; they
    // are reported, not counted, and each re-verifies against the center op.
    REQUIRE_FALSE(rep.clauses_agree);
    REQUIRE(rep.window_artifacts.size() == 2);
    KerTheta kt = ker_theta(t, ctx);
    for (const MaximalCenterEntry& e : rep.window_artifacts) {
      REQUIRE(e.subgroup.dim() == 4);
      REQUIRE(e.center.dim() == 2);
      REQUIRE(e.subgroup.contains_all(e.center));
      REQUIRE(e.center.contains(var1(ctx, 1, "t")));
      REQUIRE(acl_center(kt, e.subgroup) == e.center);
      // One clause only: not simultaneously the centralizer of its center.
      bool acl = acl_center(kt, e.center) == e.center;
      REQUIRE((!acl || !(centralizer(kt, e.center) == e.subgroup)));
    }
  }

  SECTION("window size gate") {
    Tower t = rational1();
    Context big = xwin3(t);
    big.add(BasisIndex::irr(1, "x+2"));
    big.add(BasisIndex::irr(1, "x-2"));
    REQUIRE(big.dim() == 7);
    try {
      enumerate_maximal_centers(t, big);
      FAIL("expected a size failure");
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::TooLarge);
    }
  }
}
