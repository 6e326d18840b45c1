#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "valdetect/subspace.hpp"

using namespace valdetect;

namespace {

Context ctx3() {
  Context c;
  c.ell = 3;
  c.add(BasisIndex::unit());
  c.add(BasisIndex::var(1, "s"));
  c.add(BasisIndex::var(2, "t"));
  return c;
}

Context ctx_n(int extra_vars, int ell = 3) {
  Context c;
  c.ell = ell;
  c.add(BasisIndex::unit());
  for (int i = 1; i <= extra_vars; ++i)
    c.add(BasisIndex::var(i, "v" + std::to_string(i)));
  return c;
}

FlVector vec(const Context& c, std::vector<int> d) { return c.from_dense(d); }

Subspace random_subspace(const Context& c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nrows(0, c.dim());
  std::uniform_int_distribution<int> coef(0, c.ell - 1);
  std::vector<FlVector> gens;
  int k = nrows(rng);
  for (int i = 0; i < k; ++i) {
    std::vector<int> d(c.dim());
    for (int& x : d) x = coef(rng);
    gens.push_back(c.from_dense(d));
  }
  return echelonize(c, gens);
}

}  // namespace

TEST_CASE("echelon form of a dependent generating set") {
  Context c = ctx3();
  // (1,1,0), (0,1,1), (1,0,2): third = first - second, so dimension 2.
  Subspace s = echelonize(c, {vec(c, {1, 1, 0}), vec(c, {0, 1, 1}),
                              vec(c, {1, 0, 2})});
  REQUIRE(s.dim() == 2);
  REQUIRE(s.rows[0] == vec(c, {1, 0, 2}));
  REQUIRE(s.rows[1] == vec(c, {0, 1, 1}));
  REQUIRE(s.contains(vec(c, {2, 1, 2})));
  REQUIRE_FALSE(s.contains(vec(c, {1, 0, 0})));
}

TEST_CASE("canonical form is generating-set independent") {
  Context c = ctx3();
  Subspace a = echelonize(c, {vec(c, {1, 1, 0}), vec(c, {0, 1, 1})});
  Subspace b = echelonize(c, {vec(c, {1, 2, 1}), vec(c, {2, 2, 0}),
                              vec(c, {1, 1, 0})});
  REQUIRE(a == b);
}

TEST_CASE("annihilator of a plane is the expected line") {
  Context c = ctx3();
  Subspace s = echelonize(c, {vec(c, {1, 0, 2}), vec(c, {0, 1, 1})});
  Subspace ann = annihilator(s);
  REQUIRE(ann.dim() == 1);
  REQUIRE(ann.rows[0] == vec(c, {1, 2, 1}));
  REQUIRE(annihilator(ann) == s);
}

TEST_CASE("annihilator is an inclusion-reversing involution") {
  std::mt19937_64 rng(7);
  Context c = ctx_n(4);
  for (int trial = 0; trial < 60; ++trial) {
    Subspace a = random_subspace(c, rng);
    Subspace b = subspace_sum(a, random_subspace(c, rng));  // a <= b
    REQUIRE(annihilator(annihilator(a)) == a);
    REQUIRE(annihilator(b).dim() == c.dim() - b.dim());
    REQUIRE(annihilator(b).contains_all(annihilator(b)));
    REQUIRE(annihilator(a).contains_all(annihilator(b)));
  }
}

TEST_CASE("dimension formula for sum and intersection") {
  std::mt19937_64 rng(11);
  Context c = ctx_n(5);
  for (int trial = 0; trial < 60; ++trial) {
    Subspace a = random_subspace(c, rng);
    Subspace b = random_subspace(c, rng);
    Subspace sum = subspace_sum(a, b);
    Subspace meet = intersect(a, b);
    REQUIRE(sum.dim() + meet.dim() == a.dim() + b.dim());
    REQUIRE(sum.contains_all(a));
    REQUIRE(sum.contains_all(b));
    REQUIRE(a.contains_all(meet));
    REQUIRE(b.contains_all(meet));
  }
}

TEST_CASE("subspace enumeration hits the Gaussian-binomial counts") {
  Context c = ctx3();
  std::vector<Subspace> all = enumerate_subspaces(c);
  REQUIRE(all.size() == 28);  // 1 + 13 + 13 + 1
  int by_dim[4] = {0, 0, 0, 0};
  for (const Subspace& s : all) by_dim[s.dim()]++;
  REQUIRE(by_dim[0] == 1);
  REQUIRE(by_dim[1] == 13);
  REQUIRE(by_dim[2] == 13);
  REQUIRE(by_dim[3] == 1);
  REQUIRE(gaussian_binomial(3, 1, 3) == 13);
  REQUIRE(count_all_subspaces(3, 3) == 28);
  // No duplicates: canonical forms are pairwise distinct.
  std::sort(all.begin(), all.end());
  REQUIRE(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST_CASE("enumeration respects the cap") {
  Context c = ctx_n(3);
  REQUIRE_THROWS_AS(enumerate_subspaces(c, 10), Error);
  try {
    enumerate_subspaces(c, 10);
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::TooLarge);
  }
}

TEST_CASE("line enumeration gives one representative per direction") {
  Context c = ctx3();
  std::vector<FlVector> lines = all_lines(c);
  REQUIRE(lines.size() == 13);
  for (const FlVector& v : lines) REQUIRE(v.e.begin()->second == 1);
}

TEST_CASE("context growth keeps existing vectors and order valid") {
  Context c = ctx3();
  FlVector v = vec(c, {1, 2, 0});
  Context grown = c;
  grown.add(BasisIndex::irr(1, "x+1"));
  REQUIRE(grown.dim() == 4);
  REQUIRE(grown.contains_vector(v));
  // New irreducibles sort after the unit class and all variables.
  REQUIRE(grown.basis[0] == BasisIndex::unit());
  REQUIRE(grown.basis[1].kind == BasisIndex::Kind::Var);
  REQUIRE(grown.basis[2].kind == BasisIndex::Kind::Var);
  REQUIRE(grown.basis[3].kind == BasisIndex::Kind::Irr);
  // Dense coordinates follow the grown basis.
  auto d = grown.dense(v);
  REQUIRE(d == std::vector<int>{1, 2, 0, 0});
}

TEST_CASE("vector arithmetic stays normalized") {
  Context c = ctx3();
  FlVector a = vec(c, {2, 1, 0});
  FlVector b = vec(c, {1, 2, 0});
  REQUIRE(fl_add(a, b, 3).is_zero());
  REQUIRE(fl_sub(a, a, 3).is_zero());
  REQUIRE(a.scaled(3, 3).is_zero());
  REQUIRE(mod_inv(2, 3) == 2);
}
