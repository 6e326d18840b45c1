#pragma once

#include <functional>
#include <set>

#include "valdetect/subspace.hpp"
#include "valdetect/tower.hpp"

namespace valdetect {

// class_of may mint new irreducible basis indices, so it returns the
// (possibly grown) context along with the coordinates.
struct ClassResult {
  FlVector cls;
  Context ctx;
};

namespace detail {

// Leading (lowest-exponent) visible term of a series layer.  Throws
// PrecisionLoss when truncation hides it, ZeroElement on exact zero.
inline const std::pair<int, Elem>& leading_term(const Tower& t,
                                                const SeriesData& s) {
  for (const auto& term : s.terms) {
    if (t.definitely_nonzero(term.second)) return term;
    if (!t.exact_zero(term.second))
      fail(Errc::PrecisionLoss, "leading coefficient not determined");
  }
  if (s.exact) fail(Errc::ZeroElement, "class of zero");
  fail(Errc::PrecisionLoss, "no visible leading term");
}

inline void class_of_rec(const Tower& t, Context& ctx, const Elem& e,
                         int depth, FlVector& out) {
  if (depth > 0) {
    if (e.kind != Elem::Kind::Series)
      fail(Errc::ContextMismatch, "element has too few layers");
    const auto& [exp, coeff] = leading_term(t, *e.ser);
    BasisIndex var = BasisIndex::var(depth, t.var_name(depth));
    out.set(var, out.get(var) + exp, ctx.ell);
    class_of_rec(t, ctx, coeff, depth - 1, out);
    return;
  }
  switch (e.kind) {
    case Elem::Kind::Scalar: {
      if (e.scalar == 0) fail(Errc::ZeroElement, "class of zero");
      BasisIndex z = BasisIndex::unit();
      out.set(z, out.get(z) + t.base_field().dlog(e.scalar), ctx.ell);
      return;
    }
    case Elem::Kind::Rational: {
      if (e.rat->num.is_zero()) fail(Errc::ZeroElement, "class of zero");
      const PolyRing& R = t.ring();
      u64 unit = t.base_field().mul(e.rat->num.lead(),
                                    t.base_field().inv(e.rat->den.lead()));
      BasisIndex z = BasisIndex::unit();
      out.set(z, out.get(z) + t.base_field().dlog(unit), ctx.ell);
      for (int sign : {1, -1}) {
        const Poly& f = sign == 1 ? e.rat->num : e.rat->den;
        if (f.deg() < 1) continue;
        auto fac = R.factor(f);
        for (const auto& [p, m] : fac.factors) {
          BasisIndex b = BasisIndex::irr(p.deg(), R.to_string(p, t.base_var()));
          if (!ctx.has(b)) ctx.add(b);
          out.set(b, out.get(b) + sign * m, ctx.ell);
        }
      }
      return;
    }
    case Elem::Kind::Series:
      fail(Errc::ContextMismatch, "element has too many layers");
  }
}

}  // namespace detail

inline ClassResult class_of(const Tower& t, Context ctx, const Elem& e) {
  FlVector out;
  detail::class_of_rec(t, ctx, e,
                       e.kind == Elem::Kind::Series ? t.layers() : 0, out);
  return {std::move(out), std::move(ctx)};
}

// Value of the level-k chain valuation: exponents of the k outermost layers,
// outermost first (lexicographic value group).
inline std::vector<int> valuation_of(const Tower& t, const Elem& e, int k) {
  if (k < 0 || k > t.layers()) fail(Errc::NotInChain, "level out of range");
  std::vector<int> v;
  const Elem* cur = &e;
  for (int d = t.layers(); d > t.layers() - k; --d) {
    if (cur->kind != Elem::Kind::Series)
      fail(Errc::ContextMismatch, "element has too few layers");
    const auto& [exp, coeff] = detail::leading_term(t, *cur->ser);
    v.push_back(exp);
    cur = &coeff;
  }
  return v;
}

// --- representative streams ---

namespace detail {

// Units of F_q in the given class mod ell, ascending.
inline std::vector<u64> units_in_class(const Fq& k, int ell, int cls) {
  std::vector<u64> out;
  for (u64 u = 1; u < k.q(); ++u)
    if (k.dlog(u) % ell == cls) out.push_back(u);
  return out;
}

// Base-floor representatives over F_q(x): unit * prod(irr^a) * h^ell with the
// irreducible exponents congruent to the class coordinates and total degree
// of the irreducible part at most D; h runs over monic polynomials of degree
// 1..D (and the empty product).
inline std::vector<Elem> base_rational_reps(const Tower& t, const Context& ctx,
                                            const FlVector& c, int D,
                                            size_t cap) {
  const PolyRing& R = t.ring();
  int ell = ctx.ell;
  std::vector<std::pair<Poly, int>> irr_coords;  // (poly, class coord)
  int zeta = c.get(BasisIndex::unit());
  for (const auto& [b, coeff] : c.e) {
    if (b.kind == BasisIndex::Kind::Var)
      return {};  // no bounded representative with a Laurent coordinate
    if (b.kind == BasisIndex::Kind::Irr)
      irr_coords.emplace_back(R.parse(b.name, t.base_var()), coeff);
  }
  // Exponent choices per irreducible: the two smallest lifts of the coord.
  std::vector<std::vector<int>> choices;
  for (auto& [p, coord] : irr_coords)
    choices.push_back({coord, coord - ell});
  std::vector<Elem> out;
  std::vector<size_t> pick(choices.size(), 0);
  std::vector<u64> units = units_in_class(t.base_field(), ell, zeta);
  // Optional ell-th power cofactors, the trivial one first.
  std::vector<Poly> cof{Poly::constant(1)};
  for (int hd = 1; hd <= D; ++hd) {
    u64 count = 1;
    for (int i = 0; i < hd; ++i) count *= t.base_field().q();
    for (u64 m = 0; m < count; ++m) {
      Poly h;
      h.c.assign(hd + 1, 0);
      u64 v = m;
      for (int i = 0; i < hd; ++i) {
        h.c[i] = v % t.base_field().q();
        v /= t.base_field().q();
      }
      h.c[hd] = 1;
      cof.push_back(h);
      if (cof.size() > cap) break;
    }
    if (cof.size() > cap) break;
  }
  while (true) {
    int total_deg = 0;
    for (size_t i = 0; i < pick.size(); ++i)
      total_deg +=
          std::abs(choices[i][pick[i]]) * irr_coords[i].first.deg();
    if (total_deg <= D) {
      for (u64 u : units) {
        for (const Poly& h : cof) {
          Poly num = Poly::constant(u);
          Poly den = Poly::constant(1);
          for (size_t i = 0; i < pick.size(); ++i) {
            int a = choices[i][pick[i]];
            for (int j = 0; j < std::abs(a); ++j) {
              Poly& side = a > 0 ? num : den;
              side = R.mul(side, irr_coords[i].first);
            }
          }
          for (int j = 0; j < ell; ++j) num = R.mul(num, h);
          out.push_back(t.rational_elem(num, den, 0));
          if (out.size() >= cap) return out;
        }
      }
    }
    // odometer over pick
    size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < choices[i].size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
    if (pick.empty()) break;
  }
  return out;
}

}  // namespace detail

// Exact elements of class c.  For pure Laurent towers the family realizes
// every achievable class(1-x); over a rational base it is the bounded
// product family described above, lifted through the Laurent layers.
inline std::vector<Elem> representatives(const Tower& t, const Context& ctx,
                                         const FlVector& c, int D,
                                         size_t cap = 5000) {
  int ell = ctx.ell;
  int n = t.layers();
  // Split c into variable part and base part.
  std::vector<int> vcoord(n + 1, 0);
  FlVector base_part;
  for (const auto& [b, coeff] : c.e) {
    if (b.kind == BasisIndex::Kind::Var)
      vcoord[b.var_level] = coeff;
    else
      base_part.e[b] = coeff;
  }
  // Base-floor units/products of class base_part.
  std::vector<Elem> base_elems;
  if (t.base_rational()) {
    base_elems = detail::base_rational_reps(t, ctx, base_part, D, cap);
  } else {
    int zeta = base_part.get(BasisIndex::unit());
    for (u64 u : detail::units_in_class(t.base_field(), ell, zeta))
      base_elems.push_back(Elem::make_scalar(u));
  }
  if (n == 0) return base_elems;
  // Exponent tuples: each level picks its coordinate or a +-ell shift.
  std::vector<Elem> out;
  std::vector<int> shift(n, 0);  // 0 -> c, 1 -> c-ell, 2 -> c+ell
  while (true) {
    for (const Elem& b : base_elems) {
      Elem x = t.lift(b, n);
      for (int lv = 1; lv <= n; ++lv) {
        int e = vcoord[lv] + (shift[lv - 1] == 1   ? -ell
                              : shift[lv - 1] == 2 ? ell
                                                   : 0);
        if (e != 0) x = t.mul(x, t.var_elem(lv, e));
      }
      out.push_back(std::move(x));
      if (out.size() >= cap) return out;
    }
    size_t i = 0;
    for (; i < static_cast<size_t>(n); ++i) {
      if (++shift[i] < 3) break;
      shift[i] = 0;
    }
    if (i == static_cast<size_t>(n)) break;
  }
  // For the zero class include 1 + unit*monomial perturbations, which
  // realize the remaining values of class(1-x).
  if (c.is_zero()) {
    std::vector<int> f(n, -ell);
    while (true) {
      bool lex_positive = false;
      for (int lv = n; lv >= 1; --lv) {
        if (f[lv - 1] > 0) {
          lex_positive = true;
          break;
        }
        if (f[lv - 1] < 0) break;
      }
      if (lex_positive) {
        for (u64 w = 1; w < t.base_field().q(); ++w) {
          Elem pert = t.scalar_elem(static_cast<long long>(w));
          for (int lv = 1; lv <= n; ++lv)
            if (f[lv - 1] != 0) pert = t.mul(pert, t.var_elem(lv, f[lv - 1]));
          out.push_back(t.add(t.one(), pert));
          if (out.size() >= cap) return out;
        }
      }
      int i = 0;
      for (; i < n; ++i) {
        if (++f[i] <= ell) break;
        f[i] = -ell;
      }
      if (i == n) break;
    }
  }
  return out;
}

// --- the 1 - x class analysis ---

struct OneMinusResult {
  std::set<FlVector> classes;
  bool certified = true;
  int bound = 0;  // meaningful when !certified
  Context ctx;    // possibly grown (rational base only)
};

// Result of a predicate probe through the same sweep: the first achievable
// class matching the predicate, in sweep order, or nothing.
struct OneMinusProbe {
  std::optional<FlVector> found;
  bool certified = true;
  int bound = 0;
  Context ctx;
};

namespace detail {

// Shared sweep state; pred (when set) stops the walk at its first match.
struct OneMinusSweep {
  std::set<FlVector> classes;
  std::optional<FlVector> hit;
  const std::function<bool(const FlVector&)>* pred = nullptr;
  // Returns false to stop the sweep.
  bool emit(FlVector v) {
    if (pred && (*pred)(v)) {
      hit = std::move(v);
      return false;
    }
    classes.insert(std::move(v));
    return true;
  }
};

// All vectors supported on the basis indices of ctx that are not Laurent
// variables above max_level.
inline void all_classes_below(const Context& ctx, int max_level,
                              std::set<FlVector>& out) {
  std::vector<BasisIndex> keep;
  for (const BasisIndex& b : ctx.basis)
    if (b.kind != BasisIndex::Kind::Var || b.var_level <= max_level)
      keep.push_back(b);
  if (keep.size() > 12) fail(Errc::TooLarge, "class space too large");
  std::vector<int> coord(keep.size(), 0);
  while (true) {
    FlVector v;
    for (size_t i = 0; i < keep.size(); ++i)
      if (coord[i]) v.e[keep[i]] = coord[i];
    out.insert(std::move(v));
    size_t i = 0;
    for (; i < coord.size(); ++i) {
      if (++coord[i] < ctx.ell) break;
      coord[i] = 0;
    }
    if (i == coord.size()) break;
    if (coord.empty()) break;
  }
  if (keep.empty()) out.insert(FlVector{});
}

// Returns false when a predicate match stopped the sweep.
inline bool one_minus_rec(const Tower& t, Context& ctx, const FlVector& c,
                          int depth, int D, bool& certified, OneMinusSweep& S) {
  int ell = ctx.ell;
  if (depth == 0) {
    if (!t.base_rational()) {
      // Finite floor: enumerate the units of the class directly.
      int zeta = c.get(BasisIndex::unit());
      for (u64 u : units_in_class(t.base_field(), ell, zeta)) {
        if (u == 1) continue;
        u64 om = t.base_field().sub(1, u);
        FlVector v;
        v.set(BasisIndex::unit(), t.base_field().dlog(om), ell);
        if (!S.emit(std::move(v))) return false;
      }
      return true;
    }
    // Rational floor: bounded sweep over exact representatives.
    certified = false;
    for (const Elem& r : base_rational_reps(t, ctx, c, D, 20000)) {
      Elem om = t.sub(t.one(0), r);
      if (t.exact_zero(om)) continue;
      ClassResult cr = class_of(t, ctx, om);
      ctx = cr.ctx;
      if (!S.emit(std::move(cr.cls))) return false;
    }
    return true;
  }
  BasisIndex var = BasisIndex::var(depth, t.var_name(depth));
  // Cases v(x) > 0 and v(x) < 0 are always realizable at a Laurent layer:
  // 1 - x is then a principal unit (class 0) or -x times one (class c).
  if (!S.emit(FlVector{})) return false;
  if (!S.emit(c)) return false;
  if (c.get(var) != 0) return true;
  // Unit case: recurse on the residue field (same coordinates).
  if (c.is_zero()) {
    // x = 1 + y reaches every class: 1 - x = -y with y arbitrary below.
    std::set<FlVector> bulk;
    all_classes_below(ctx, depth, bulk);
    for (const FlVector& v : bulk)
      if (!S.emit(v)) return false;
  }
  return one_minus_rec(t, ctx, c, depth - 1, D, certified, S);
}

}  // namespace detail

// The set {class(1-x) : class(x) = c}.  Certified by exact case analysis on
// pure Laurent towers over a finite base; bounded (degree D sweeps) when the
// base is a rational function field.
inline OneMinusResult one_minus_classes(const Tower& t, Context ctx,
                                        const FlVector& c, int D) {
  detail::OneMinusSweep S;
  OneMinusResult R;
  detail::one_minus_rec(t, ctx, c, t.layers(), D, R.certified, S);
  if (!R.certified) R.bound = D;
  R.classes = std::move(S.classes);
  R.ctx = std::move(ctx);
  return R;
}

// First achievable 1 - x class matching pred, walking the identical sweep
// but stopping at the match.  Avoids materializing the full class set when
// only an escape witness is needed.
inline OneMinusProbe one_minus_find(
    const Tower& t, Context ctx, const FlVector& c, int D,
    const std::function<bool(const FlVector&)>& pred) {
  detail::OneMinusSweep S;
  S.pred = &pred;
  OneMinusProbe R;
  detail::one_minus_rec(t, ctx, c, t.layers(), D, R.certified, S);
  if (!R.certified) R.bound = D;
  R.found = std::move(S.hit);
  R.ctx = std::move(ctx);
  return R;
}

// --- chain valuations as subspaces ---

struct UnitsPair {
  Subspace uv;
  Subspace uv1;
};

// U_v for the level-k valuation: classes with no coordinate at the k
// outermost variables.  U_v^1 is zero in this universe: 1 + m_v consists of
// ell-th powers (Hensel, residue characteristic != ell) and class(-1) = 0.
inline UnitsPair units_subgroups(const Tower& t, const Context& ctx, int k) {
  if (k < 0 || k > t.layers()) fail(Errc::NotInChain, "level out of range");
  std::vector<FlVector> gens;
  for (const BasisIndex& b : ctx.basis) {
    if (b.kind == BasisIndex::Kind::Var && b.var_level > t.layers() - k)
      continue;
    FlVector v;
    v.set(b, 1, ctx.ell);
    gens.push_back(std::move(v));
  }
  return {echelonize(ctx, gens), zero_subspace(ctx)};
}

// Tower and context after collapsing the k outermost variables.
inline Tower residue_tower(const Tower& t, int k) {
  if (k < 0 || k > t.layers()) fail(Errc::NotInChain, "level out of range");
  std::vector<std::string> vars(t.laurent_vars().begin(),
                                t.laurent_vars().end() - k);
  return Tower(t.ell(), t.base_field().q(), t.base_rational(), t.base_var(),
               std::move(vars));
}

inline Context residue_context(const Tower& t, const Context& ctx, int k) {
  Context out;
  out.ell = ctx.ell;
  for (const BasisIndex& b : ctx.basis)
    if (b.kind != BasisIndex::Kind::Var || b.var_level <= t.layers() - k)
      out.add(b);
  return out;
}

// Image of T in residue-field coordinates, for U_v^1 <= T <= U_v.
inline Subspace residue_transfer(const Tower& t, const Context& ctx, int k,
                                 const Subspace& T) {
  UnitsPair u = units_subgroups(t, ctx, k);
  for (const FlVector& row : T.rows)
    if (!u.uv.contains(row))
      fail(Errc::NotSandwiched, "subgroup not inside U_v");
  Context rctx = residue_context(t, ctx, k);
  std::vector<FlVector> rows = T.rows;  // coordinates carry over unchanged
  return echelonize(rctx, rows);
}

}  // namespace valdetect
