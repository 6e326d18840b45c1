#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "valdetect/classmap.hpp"

namespace valdetect {

// --- places of the rational base field ---

// A closed point of P^1 over F_q: a monic irreducible polynomial or the
// point at infinity.  Finite places sort first, by polynomial order.
struct Place {
  bool infinite = false;
  Poly p;

  static Place at(Poly q) { return {false, std::move(q)}; }
  static Place infinity() { return {true, {}}; }

  friend bool operator==(const Place& a, const Place& b) {
    return a.infinite == b.infinite && a.p == b.p;
  }
  friend bool operator<(const Place& a, const Place& b) {
    if (a.infinite != b.infinite) return b.infinite;
    return a.p < b.p;
  }
};

// --- K_2 mod ell values ---

// A K_2/ell class, stored along the canonical splitting of each Laurent
// layer K_2(k((v))) = K_2(k) + K_1(k): one residue K_1 class per layer
// (keyed by the layer's variable level), plus, when the floor is F_q(x),
// the tame classes at the finitely many supporting places.  K_2 of a
// finite field vanishes mod ell, so the floor map is the whole story.
struct K2Class {
  int ell = 3;
  std::map<int, FlVector> tame;
  std::map<Place, int> place;

  bool is_zero() const { return tame.empty() && place.empty(); }

  void add_tame(int level, const FlVector& v, long long scale = 1) {
    FlVector sum = fl_add(tame[level], v.scaled(scale, ell), ell);
    if (sum.is_zero())
      tame.erase(level);
    else
      tame[level] = std::move(sum);
  }

  void add_place(const Place& pl, long long c) {
    int v = mod_norm(place[pl] + c, ell);
    if (v == 0)
      place.erase(pl);
    else
      place[pl] = v;
  }

  K2Class& add(const K2Class& o, long long scale = 1) {
    for (const auto& [lv, v] : o.tame) add_tame(lv, v, scale);
    for (const auto& [pl, c] : o.place) add_place(pl, scale * c);
    return *this;
  }

  friend bool operator==(const K2Class& a, const K2Class& b) {
    return a.tame == b.tame && a.place == b.place;
  }

  std::string display(const Tower& t) const {
    std::string s;
    for (const auto& [lv, v] : tame) {
      if (!s.empty()) s += "; ";
      s += "@" + t.var_name(lv) + " " + v.display();
    }
    for (const auto& [pl, c] : place) {
      if (!s.empty()) s += "; ";
      std::string nm =
          pl.infinite ? "inf" : t.ring().to_string(pl.p, t.base_var());
      s += "(" + nm + "):" + std::to_string(c);
    }
    return s.empty() ? "0" : s;
  }
};

namespace detail {

// class_of with in-place context growth.
inline FlVector class_in(const Tower& t, Context& ctx, const Elem& e) {
  ClassResult r = class_of(t, std::move(ctx), e);
  ctx = std::move(r.ctx);
  return std::move(r.cls);
}

// P-adic valuation of f together with the cofactor f / P^m.
inline std::pair<int, Poly> strip_place(const PolyRing& R, Poly f,
                                        const Poly& P) {
  int m = 0;
  for (;;) {
    auto [q, r] = R.divmod(f, P);
    if (!r.is_zero()) break;
    f = std::move(q);
    ++m;
  }
  return {m, std::move(f)};
}

inline Poly ext_pow(const FqExt& E, Poly z, long long n) {
  if (n < 0) {
    z = E.pow(z, E.order() - 2);
    n = -n;
  }
  return E.pow(z, static_cast<u128>(n));
}

inline u64 fq_pow(const Fq& k, u64 a, long long n) {
  if (n < 0) {
    a = k.inv(a);
    n = -n;
  }
  return k.pow(a, static_cast<u128>(n));
}

// Tame symbols of {x, y} at every supporting place of F_q(x), plus the
// place at infinity when either valuation there is nonzero.  Components
// are classes in k(P)^x mod ell-th powers.
inline void rational_base_symbol(const Tower& t, const RatFun& x,
                                 const RatFun& y, K2Class& out) {
  const PolyRing& R = t.ring();
  const Fq& k = t.base_field();
  int ell = t.ell();
  if (x.num.is_zero() || y.num.is_zero())
    fail(Errc::ZeroElement, "symbol of zero");

  std::set<Poly> support;
  for (const Poly* f : {&x.num, &x.den, &y.num, &y.den})
    if (f->deg() >= 1)
      for (const auto& [p, m] : R.factor(*f).factors) support.insert(p);

  for (const Poly& P : support) {
    auto [mxn, cxn] = strip_place(R, x.num, P);
    auto [mxd, cxd] = strip_place(R, x.den, P);
    auto [myn, cyn] = strip_place(R, y.num, P);
    auto [myd, cyd] = strip_place(R, y.den, P);
    int a = mxn - mxd, b = myn - myd;
    if (a == 0 && b == 0) continue;
    FqExt E(R, P);
    Poly rx = E.mul(E.reduce(cxn), ext_pow(E, E.reduce(cxd), -1));
    Poly ry = E.mul(E.reduce(cyn), ext_pow(E, E.reduce(cyd), -1));
    Poly u = E.mul(ext_pow(E, rx, b), ext_pow(E, ry, -a));
    if ((a & 1) && (b & 1)) u = E.mul(u, Poly::constant(k.from_int(-1)));
    int c = E.unit_class(u, ell);
    if (c) out.add_place(Place::at(P), c);
  }

  // At infinity v = -deg and the unit-part residue is the leading
  // coefficient, so the tame formula reads off leading coefficients.
  int a = x.den.deg() - x.num.deg();
  int b = y.den.deg() - y.num.deg();
  if (a != 0 || b != 0) {
    u64 lx = k.mul(x.num.lead(), k.inv(x.den.lead()));
    u64 ly = k.mul(y.num.lead(), k.inv(y.den.lead()));
    u64 u = k.mul(fq_pow(k, lx, b), fq_pow(k, ly, -a));
    if ((a & 1) && (b & 1)) u = k.mul(u, k.from_int(-1));
    int c = k.class_mod(u, ell);
    if (c) out.add_place(Place::infinity(), c);
  }
}

}  // namespace detail

// Tame symbol at the outermost-layer valuation: the class of
// (-1)^{ab} x^b / y^a in the residue field, where a = v(x), b = v(y).
// Equals ab*class(-1) + b*class(lc x) - a*class(lc y) since the unit
// parts reduce to the leading coefficients.
inline FlVector tame_symbol(const Tower& t, Context& ctx, const Elem& x,
                            const Elem& y) {
  if (t.layers() < 1) fail(Errc::NotInChain, "tame symbol needs a layer");
  if (x.kind != Elem::Kind::Series || y.kind != Elem::Kind::Series)
    fail(Errc::ContextMismatch, "element has too few layers");
  const auto& [a, lcx] = detail::leading_term(t, *x.ser);
  const auto& [b, lcy] = detail::leading_term(t, *y.ser);
  Tower rt = residue_tower(t, 1);
  FlVector out = detail::class_in(rt, ctx, lcx).scaled(b, ctx.ell);
  out.add_scaled(detail::class_in(rt, ctx, lcy), -a, ctx.ell);
  FlVector m1 = detail::class_in(rt, ctx, rt.scalar_elem(-1));
  out.add_scaled(m1, static_cast<long long>(a) * b, ctx.ell);
  return out;
}

namespace detail {

inline void symbol_rec(const Tower& t, Context& ctx, const Elem& x,
                       const Elem& y, K2Class& out) {
  if (t.layers() > 0) {
    if (x.kind != Elem::Kind::Series || y.kind != Elem::Kind::Series)
      fail(Errc::ContextMismatch, "element has too few layers");
    out.add_tame(t.layers(), tame_symbol(t, ctx, x, y));
    symbol_rec(residue_tower(t, 1), ctx, leading_term(t, *x.ser).second,
               leading_term(t, *y.ser).second, out);
    return;
  }
  if (!t.base_rational()) {
    if (x.kind != Elem::Kind::Scalar || y.kind != Elem::Kind::Scalar)
      fail(Errc::ContextMismatch, "element/base mismatch");
    if (x.scalar == 0 || y.scalar == 0)
      fail(Errc::ZeroElement, "symbol of zero");
    return;  // K_2 of a finite field is trivial mod ell
  }
  if (x.kind != Elem::Kind::Rational || y.kind != Elem::Kind::Rational)
    fail(Errc::ContextMismatch, "element/base mismatch");
  rational_base_symbol(t, *x.rat, *y.rat, out);
}

}  // namespace detail

// Symbol of two field elements, computed by peeling Laurent layers: each
// layer contributes its tame symbol, and the K_2 part of the splitting
// descends to the leading coefficients.
inline K2Class symbol_elems(const Tower& t, Context& ctx, const Elem& x,
                            const Elem& y) {
  K2Class out;
  out.ell = t.ell();
  detail::symbol_rec(t, ctx, x, y, out);
  return out;
}

// Field element representing a context basis index.
inline Elem basis_elem(const Tower& t, const BasisIndex& b) {
  switch (b.kind) {
    case BasisIndex::Kind::Unit:
      return t.scalar_elem(static_cast<long long>(t.base_field().generator()));
    case BasisIndex::Kind::Var:
      return t.var_elem(b.var_level);
    case BasisIndex::Kind::Irr:
      return t.rational_elem(t.ring().parse(b.name, t.base_var()),
                             Poly::constant(1));
  }
  fail(Errc::OutOfContext, "unknown basis kind");
}

// Bilinear symbol on classes, built from cached symbols of basis pairs.
// Diagonal pairs vanish ({x,x} = {-1,x} and class(-1) = 0 here), so the
// expansion runs over ordered pairs with antisymmetric coefficients.
class SymbolTable {
 public:
  SymbolTable(const Tower& t, Context& ctx) : t_(&t), ctx_(&ctx) {}

  const Context& ctx() const { return *ctx_; }
  const Tower& tower() const { return *t_; }

  const K2Class& pair_symbol(const BasisIndex& i, const BasisIndex& j) {
    auto key = std::make_pair(i, j);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    K2Class v =
        symbol_elems(*t_, *ctx_, basis_elem(*t_, i), basis_elem(*t_, j));
    return cache_.emplace(std::move(key), std::move(v)).first->second;
  }

  K2Class symbol(const FlVector& x, const FlVector& y) {
    for (const FlVector* v : {&x, &y})
      for (const auto& [b, c] : v->e)
        if (!ctx_->has(b)) fail(Errc::OutOfContext, b.display());
    K2Class out;
    out.ell = ctx_->ell;
    for (const auto& [bi, xi] : x.e)
      for (const auto& [bj, yj] : y.e) {
        if (!(bi < bj) && !(bj < bi)) continue;
        bool flip = bj < bi;
        const BasisIndex& lo = flip ? bj : bi;
        const BasisIndex& hi = flip ? bi : bj;
        long long c = static_cast<long long>(xi) * yj * (flip ? -1 : 1);
        out.add(pair_symbol(lo, hi), mod_norm(c, ctx_->ell));
      }
    return out;
  }

 private:
  const Tower* t_;
  Context* ctx_;
  std::map<std::pair<BasisIndex, BasisIndex>, K2Class> cache_;
};

inline K2Class symbol(const Tower& t, Context& ctx, const FlVector& x,
                      const FlVector& y) {
  SymbolTable st(t, ctx);
  return st.symbol(x, y);
}

// --- flattened coordinates ---

// A K2Class embeds into one F_ell coordinate space: each (layer, residue
// basis index) pair and each place becomes a synthetic basis index, so
// the row-reduction machinery applies to K_2 values unchanged.
namespace detail {

inline BasisIndex flat_tame_key(int level, const BasisIndex& b) {
  std::string tag;
  switch (b.kind) {
    case BasisIndex::Kind::Unit:
      tag = "z";
      break;
    case BasisIndex::Kind::Var:
      tag = "v:" + b.name;
      break;
    case BasisIndex::Kind::Irr:
      tag = "p:" + b.name;
      break;
  }
  return BasisIndex::irr(level, tag);
}

inline BasisIndex flat_place_key(const Place& pl, const Tower& t) {
  std::string nm =
      pl.infinite ? "inf" : t.ring().to_string(pl.p, t.base_var());
  return BasisIndex::irr(0, "P:" + nm);
}

}  // namespace detail

inline FlVector flatten(const K2Class& v, const Tower& t, Context& flat) {
  FlVector out;
  for (const auto& [lv, w] : v.tame)
    for (const auto& [b, c] : w.e) {
      BasisIndex k = detail::flat_tame_key(lv, b);
      if (!flat.has(k)) flat.add(k);
      out.set(k, c, flat.ell);
    }
  for (const auto& [pl, c] : v.place) {
    BasisIndex k = detail::flat_place_key(pl, t);
    if (!flat.has(k)) flat.add(k);
    out.set(k, c, flat.ell);
  }
  return out;
}

// --- wedge presentation ---

// The comparison map from the exterior square of the context to K_2:
// generators b_i ^ b_j with i < j, their symbol images, and the kernel
// (combinations of wedges with vanishing symbol).
struct K2Presentation {
  Context ctx;
  std::vector<std::pair<BasisIndex, BasisIndex>> gens;
  std::vector<K2Class> images;
  std::vector<BasisIndex> wedge_keys;  // synthetic coordinate per generator
  Context wedge;
  Context flat;
  Subspace image_span;
  Subspace kernel;

  int rank() const { return image_span.dim(); }
};

inline K2Presentation k2_presentation(const Tower& t, Context ctx) {
  if (ctx.dim() > 12) fail(Errc::TooLarge, "context dimension above 12");
  K2Presentation P;
  P.ctx = ctx;
  P.wedge.ell = ctx.ell;
  P.flat.ell = ctx.ell;
  SymbolTable st(t, P.ctx);
  int n = P.ctx.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const BasisIndex& bi = P.ctx.basis[i];
      const BasisIndex& bj = P.ctx.basis[j];
      P.gens.emplace_back(bi, bj);
      P.images.push_back(st.pair_symbol(bi, bj));
      BasisIndex wk = BasisIndex::irr(
          i * 64 + j, "(" + bi.display() + "," + bj.display() + ")");
      P.wedge_keys.push_back(wk);
      P.wedge.add(wk);
    }
  std::vector<FlVector> flats;
  for (const K2Class& v : P.images) flats.push_back(flatten(v, t, P.flat));
  P.image_span = echelonize(P.flat, flats);
  // Kernel: wedge combinations annihilated by every flat coordinate.
  std::map<BasisIndex, FlVector> cols;
  for (size_t k = 0; k < flats.size(); ++k)
    for (const auto& [fk, c] : flats[k].e)
      cols[fk].set(P.wedge_keys[k], c, ctx.ell);
  std::vector<FlVector> rows;
  for (auto& [fk, v] : cols) rows.push_back(std::move(v));
  P.kernel = annihilator(echelonize(P.wedge, rows));
  return P;
}

// --- quotient by the ideal generated by a subgroup ---

// Degree-2 part of the graded ideal generated by T: the span of all
// symbols {t, b} with t running over a basis of T and b over the context
// basis, in flattened coordinates.
class K2Ideal {
 public:
  K2Ideal(SymbolTable& st, const Subspace& T) : t_(&st.tower()) {
    flat_.ell = st.ctx().ell;
    std::vector<FlVector> rows;
    std::vector<BasisIndex> basis = st.ctx().basis;  // may grow during symbols
    for (const FlVector& row : T.rows)
      for (const BasisIndex& b : basis) {
        K2Class v = st.symbol(row, FlVector::unit(b, 1, flat_.ell));
        rows.push_back(flatten(v, *t_, flat_));
      }
    span_ = echelonize(flat_, rows);
  }

  const Context& flat() const { return flat_; }
  const Subspace& span() const { return span_; }

  FlVector reduce(const K2Class& v) {
    return span_.reduce(flatten(v, *t_, flat_));
  }
  bool contains(const K2Class& v) { return reduce(v).is_zero(); }

 private:
  const Tower* t_;
  Context flat_;
  Subspace span_;
};

// Image of symbol(x, y) modulo the ideal generated by T; zero iff the
// symbol lies in the degree-2 ideal span within the context.
inline FlVector symbol_mod_T(const Tower& t, Context& ctx, const FlVector& x,
                             const FlVector& y, const Subspace& T) {
  SymbolTable st(t, ctx);
  K2Ideal ideal(st, T);
  return ideal.reduce(st.symbol(x, y));
}

// --- reciprocity over the rational base ---

// Multiplier e_P with class_q(norm(z)) = e_P * unit_class(z) on k(P)^x:
// both kernels are the unique index-ell subgroup of a cyclic group, so
// the two classes are proportional; any unit outside the kernel fixes
// the ratio.
inline int norm_transfer_unit(const FqExt& E, int ell) {
  u64 q = E.ring().field().q();
  for (u64 h = 2;; ++h) {
    Poly cand;
    u64 v = h;
    size_t i = 0;
    while (v) {
      cand.c.resize(i + 1, 0);
      cand.c[i] = v % q;
      v /= q;
      ++i;
    }
    cand.trim();
    if (cand.deg() >= E.degree())
      fail(Errc::BadModulus, "no unit outside the ell-th powers");
    int c = E.unit_class(cand, ell);
    if (c == 0) continue;
    return mod_norm(static_cast<long long>(E.norm_class(cand, ell)) *
                        mod_inv(c, ell),
                    ell);
  }
}

// Weil reciprocity mod ell: the norm classes of all tame components of a
// floor symbol, the place at infinity included, sum to zero.
inline bool reciprocity_holds(const Tower& t, const K2Class& v) {
  Tower base = residue_tower(t, t.layers());
  long long sum = 0;
  for (const auto& [pl, c] : v.place) {
    if (pl.infinite) {
      sum += c;
    } else {
      FqExt E(base.ring(), pl.p);
      sum += static_cast<long long>(norm_transfer_unit(E, t.ell())) * c;
    }
  }
  return mod_norm(sum, t.ell()) == 0;
}

inline bool reciprocity_check(const Tower& t, Context& ctx, const Elem& x,
                              const Elem& y) {
  return reciprocity_holds(t, symbol_elems(t, ctx, x, y));
}

}  // namespace valdetect
