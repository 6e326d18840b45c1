#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "valdetect/milnor.hpp"
#include "valdetect/rigidity.hpp"

namespace valdetect {

// ---- characters -------------------------------------------------------------

// Functional on the context's class space, written in dual coordinates over
// the same named basis.  Every functional is a legal character here: the
// Kummer pairing against ell-th roots is perfect at this scale, so the dual
// side is the full linear dual.
struct Character {
  FlVector coords;

  static Character dual_of(const BasisIndex& b, int ell) {
    return Character{FlVector::unit(b, 1, ell)};
  }
};

// sigma(x): dot product in the shared named basis.
inline int pair_eval(const FlVector& sigma, const FlVector& x, int ell) {
  long long acc = 0;
  for (const auto& [k, c] : sigma.e)
    acc += static_cast<long long>(c) * x.get(k);
  return mod_norm(acc, ell);
}

// Class of the distinguished primitive ell-th root of unity in the base
// field.  Zero exactly when that root is itself an ell-th power.
inline FlVector omega_vector(const Tower& t) {
  FlVector v;
  v.set(BasisIndex::unit(), t.base_field().class_mod(t.omega(), t.ell()),
        t.ell());
  return v;
}

// ---- kernel of the comparison map --------------------------------------------

// Kernel of Theta, the comparison map from wedge-plus-beta coordinates into
// flattened K_2:
//
//   Theta(b_i ^ b_j) = {b_i, b_j},   Theta(beta_r) = {b_r, w}
//
// with w the root-of-unity class.  Domain coordinates are the C(n,2) wedges
// in lexicographic basis order followed by one beta per basis entry.  The
// kernel basis is kept in free-column order with leading coefficient 1, so
// reruns and flipped conventions land on the same representation.
struct KerTheta {
  Context ctx;                     // the window the dual side refers to
  std::vector<BasisIndex> window;  // = ctx.basis, frozen at construction
  FlVector omega;
  std::vector<std::pair<int, int>> wedges;
  std::vector<FlVector> images;  // Theta of each domain coordinate
  Context flat;                  // codomain coordinates
  std::vector<std::vector<int>> basis;  // kernel basis, dense over the domain

  int n() const { return static_cast<int>(window.size()); }
  int domain_dim() const {
    return static_cast<int>(wedges.size()) + static_cast<int>(window.size());
  }
  int dim() const { return static_cast<int>(basis.size()); }

  int wedge_coord(int i, int j) const {
    for (size_t c = 0; c < wedges.size(); ++c)
      if (wedges[c] == std::make_pair(i, j)) return static_cast<int>(c);
    fail(Errc::OutOfContext, "no such wedge coordinate");
  }
  int beta_coord(int r) const { return static_cast<int>(wedges.size()) + r; }
  int window_pos(const BasisIndex& b) const {
    for (size_t i = 0; i < window.size(); ++i)
      if (window[i] == b) return static_cast<int>(i);
    fail(Errc::OutOfContext, b.display());
  }

  std::string coord_name(int c) const {
    if (c < static_cast<int>(wedges.size()))
      return window[wedges[c].first].display() + "^" +
             window[wedges[c].second].display();
    return "beta(" + window[c - wedges.size()].display() + ")";
  }
  std::string display_vector(const std::vector<int>& w) const {
    std::string s;
    for (int c = 0; c < domain_dim(); ++c) {
      if (!w[c]) continue;
      if (!s.empty()) s += " + ";
      if (w[c] != 1) s += std::to_string(w[c]) + "*";
      s += coord_name(c);
    }
    return s.empty() ? "0" : s;
  }
};

namespace detail {

// Kernel of a dense matrix over F_ell: basis vectors in free-column order,
// each normalized to leading coefficient 1.
inline std::vector<std::vector<int>> dense_nullspace(
    std::vector<std::vector<int>> m, int ncols, int ell) {
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < ncols && row < static_cast<int>(m.size()); ++col) {
    int sel = -1;
    for (int i = row; i < static_cast<int>(m.size()); ++i)
      if (m[i][col]) { sel = i; break; }
    if (sel < 0) continue;
    std::swap(m[sel], m[row]);
    int inv = mod_inv(m[row][col], ell);
    for (int j = 0; j < ncols; ++j) m[row][j] = m[row][j] * inv % ell;
    for (int i = 0; i < static_cast<int>(m.size()); ++i) {
      if (i == row || !m[i][col]) continue;
      int c = m[i][col];
      for (int j = 0; j < ncols; ++j)
        m[i][j] = mod_norm(m[i][j] - c * m[row][j], ell);
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<int>> out;
  for (int free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<int> w(ncols, 0);
    w[free] = 1;
    for (size_t r = 0; r < pivot_col.size(); ++r)
      w[pivot_col[r]] = mod_norm(-m[r][free], ell);
    int lead = 0;
    while (!w[lead]) ++lead;
    int inv = mod_inv(w[lead], ell);
    if (inv != 1)
      for (int& x : w) x = x * inv % ell;
    out.push_back(std::move(w));
  }
  return out;
}

// Row-echelon span over a fixed-length dense coordinate space.
struct DenseSpan {
  int ell;
  std::vector<std::vector<int>> rows;  // reduced, sorted by pivot index

  explicit DenseSpan(int ell) : ell(ell) {}

  static int pivot(const std::vector<int>& v) {
    for (size_t i = 0; i < v.size(); ++i)
      if (v[i]) return static_cast<int>(i);
    return -1;
  }
  std::vector<int> reduce(std::vector<int> v) const {
    for (const auto& row : rows) {
      int p = pivot(row);
      int c = v[p];
      if (!c) continue;
      for (size_t j = 0; j < v.size(); ++j)
        v[j] = mod_norm(v[j] - c * row[j], ell);
    }
    return v;
  }
  bool contains(const std::vector<int>& v) const {
    return pivot(reduce(v)) < 0;
  }
  void add(std::vector<int> v) {
    v = reduce(v);
    int p = pivot(v);
    if (p < 0) return;
    int inv = mod_inv(v[p], ell);
    if (inv != 1)
      for (int& x : v) x = x * inv % ell;
    for (auto& row : rows) {
      int c = row[p];
      if (!c) continue;
      for (size_t j = 0; j < row.size(); ++j)
        row[j] = mod_norm(row[j] - c * v[j], ell);
    }
    auto it = rows.begin();
    while (it != rows.end() && pivot(*it) < p) ++it;
    rows.insert(it, std::move(v));
  }
  int dim() const { return static_cast<int>(rows.size()); }
};

}  // namespace detail

// Theta of an arbitrary domain vector, in the flattened K_2 coordinates.
inline FlVector theta_apply(const KerTheta& kt, const std::vector<int>& w) {
  if (static_cast<int>(w.size()) != kt.domain_dim())
    fail(Errc::ContextMismatch, "domain vector length mismatch");
  FlVector acc;
  for (int c = 0; c < kt.domain_dim(); ++c)
    if (w[c]) acc.add_scaled(kt.images[c], w[c], kt.ctx.ell);
  return acc;
}

inline KerTheta ker_theta(const Tower& t, const Context& ctx) {
  if (ctx.dim() > 10)
    fail(Errc::TooLarge, "context dimension above 10 for the kernel");
  KerTheta kt;
  kt.ctx = ctx;
  kt.window = ctx.basis;
  kt.omega = omega_vector(t);
  kt.flat.ell = ctx.ell;
  // Symbols may mint residue keys while they evaluate; the window above
  // stays frozen, only this working copy grows.
  Context work = ctx;
  SymbolTable st(t, work);
  const int n = kt.n();
  std::vector<K2Class> raw;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      kt.wedges.emplace_back(i, j);
      raw.push_back(st.pair_symbol(kt.window[i], kt.window[j]));
    }
  for (int r = 0; r < n; ++r)
    raw.push_back(
        st.symbol(FlVector::unit(kt.window[r], 1, ctx.ell), kt.omega));
  for (const K2Class& v : raw) kt.images.push_back(flatten(v, t, kt.flat));

  const int N = kt.domain_dim();
  std::vector<std::vector<int>> m;
  for (const BasisIndex& fk : kt.flat.basis) {
    std::vector<int> row(N, 0);
    for (int c = 0; c < N; ++c) row[c] = kt.images[c].get(fk);
    m.push_back(std::move(row));
  }
  kt.basis = detail::dense_nullspace(std::move(m), N, ctx.ell);
  for (const auto& w : kt.basis)
    if (!theta_apply(kt, w).is_zero())
      fail(Errc::NoWitnessFound,
           "comparison map does not vanish on a kernel basis vector");
  return kt;
}

// ---- functionals on the kernel ------------------------------------------------

// Functional on the kernel, stored by its values on the kernel basis.
struct CommClass {
  std::vector<int> values;

  bool is_zero() const {
    for (int v : values)
      if (v) return false;
    return true;
  }
  std::string display() const {
    std::string s = "(";
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(values[i]);
    }
    return s + ")";
  }
  friend bool operator==(const CommClass& a, const CommClass& b) {
    return a.values == b.values;
  }
};

namespace detail {

inline void require_dual_vector(const Context& ctx, const FlVector& v) {
  for (const auto& [k, c] : v.e) {
    (void)c;
    if (!ctx.has(k))
      fail(Errc::ContextMismatch, "character outside the window: " + k.display());
  }
}

inline std::vector<int> window_values(const KerTheta& kt, const FlVector& v) {
  std::vector<int> out(kt.n());
  for (int i = 0; i < kt.n(); ++i) out[i] = v.get(kt.window[i]);
  return out;
}

}  // namespace detail

// Pairing of a character pair against the kernel:
// (x ^ y (+) z) -> s(x)u(y) - s(y)u(x).  Bilinear and alternating.
inline CommClass comm_class(const KerTheta& kt, const Character& s,
                            const Character& u) {
  detail::require_dual_vector(kt.ctx, s.coords);
  detail::require_dual_vector(kt.ctx, u.coords);
  const int ell = kt.ctx.ell;
  std::vector<int> sv = detail::window_values(kt, s.coords);
  std::vector<int> uv = detail::window_values(kt, u.coords);
  CommClass out;
  for (const auto& w : kt.basis) {
    long long acc = 0;
    for (size_t c = 0; c < kt.wedges.size(); ++c) {
      if (!w[c]) continue;
      auto [i, j] = kt.wedges[c];
      acc += static_cast<long long>(w[c]) * (sv[i] * uv[j] - sv[j] * uv[i]);
    }
    out.values.push_back(mod_norm(acc, ell));
  }
  return out;
}

// Pairing of a character against the kernel's beta part:
// (x ^ y (+) z) -> s(z).  Linear.
inline CommClass beta_class(const KerTheta& kt, const Character& s) {
  detail::require_dual_vector(kt.ctx, s.coords);
  const int ell = kt.ctx.ell;
  std::vector<int> sv = detail::window_values(kt, s.coords);
  const int W = static_cast<int>(kt.wedges.size());
  CommClass out;
  for (const auto& w : kt.basis) {
    long long acc = 0;
    for (int r = 0; r < kt.n(); ++r)
      acc += static_cast<long long>(w[W + r]) * sv[r];
    out.values.push_back(mod_norm(acc, ell));
  }
  return out;
}

namespace detail {

// Span of the beta functionals of a dual subgroup.
inline DenseSpan beta_span(const KerTheta& kt, const Subspace& Z) {
  DenseSpan span(kt.ctx.ell);
  for (const FlVector& r : Z.rows) span.add(beta_class(kt, Character{r}).values);
  return span;
}

}  // namespace detail

// ---- almost-commuting center ---------------------------------------------------

// Largest subgroup of Z whose pairing against every element of Z stays
// inside the beta span of Z.  Membership is a linear condition in the first
// argument, so this is an exact solve; Z almost-commutes exactly when the
// center is all of Z.
inline Subspace acl_center(const KerTheta& kt, const Subspace& Z) {
  require_same_context(Z.ctx, kt.ctx);
  if (Z.dim() > 8) fail(Errc::TooLarge, "dual subgroup dimension above 8");
  const int ell = kt.ctx.ell;
  const int m = kt.dim();
  const int dz = Z.dim();
  detail::DenseSpan bspan = detail::beta_span(kt, Z);
  std::vector<std::vector<int>> cond;
  for (int b = 0; b < dz; ++b) {
    std::vector<std::vector<int>> res;
    for (int a = 0; a < dz; ++a)
      res.push_back(bspan.reduce(
          comm_class(kt, Character{Z.rows[a]}, Character{Z.rows[b]}).values));
    for (int k = 0; k < m; ++k) {
      std::vector<int> row(dz);
      bool nonzero = false;
      for (int a = 0; a < dz; ++a) {
        row[a] = res[a][k];
        nonzero |= row[a] != 0;
      }
      if (nonzero) cond.push_back(std::move(row));
    }
  }
  std::vector<FlVector> gens;
  for (const auto& c : detail::dense_nullspace(std::move(cond), dz, ell)) {
    FlVector v;
    for (int a = 0; a < dz; ++a)
      if (c[a]) v.add_scaled(Z.rows[a], c[a], ell);
    gens.push_back(std::move(v));
  }
  return echelonize(kt.ctx, gens);
}

// The dual-track recomputation of the center: annihilate, close up on the
// class-space side, annihilate again.  Must agree with acl_center whenever
// the closure verdict is certified.
inline std::pair<Subspace, Verdict> acl_center_dual(const Tower& t,
                                                    const Subspace& Z,
                                                    const Context& ctx,
                                                    int D = 4) {
  require_same_context(Z.ctx, ctx);
  Subspace zperp = annihilator(Z);
  Context work = ctx;
  auto [span, verdict] = hull(t, work, zperp, D);
  // Out-of-window coordinates cannot pair against window characters, so the
  // closure only matters through its window projection.
  std::vector<FlVector> rows;
  for (const FlVector& r : span.rows) {
    FlVector p;
    for (const auto& [k, c] : r.e)
      if (ctx.has(k)) p.set(k, c, ctx.ell);
    rows.push_back(std::move(p));
  }
  return {annihilator(echelonize(ctx, rows)), std::move(verdict)};
}

// ---- decomposition-side subgroups ----------------------------------------------

// Annihilators of the one-unit and full unit class subgroups at a chain
// level.  The residue characteristic never equals ell here, so these window
// subgroups realize the honest decomposition/inertia pair.
struct DualPair {
  Subspace d1;  // annihilator of the one-unit classes
  Subspace i1;  // annihilator of the unit classes
};

inline DualPair d1_i1_of_v(const Tower& t, int level, const Context& ctx) {
  UnitsPair u = units_subgroups(t, ctx, level);
  return {annihilator(u.uv1), annihilator(u.uv)};
}

// All characters whose pairing against the given subgroup stays inside its
// beta span.  Only defined when the subgroup almost-commutes.
inline Subspace centralizer(const KerTheta& kt, const Subspace& A) {
  require_same_context(A.ctx, kt.ctx);
  if (!(acl_center(kt, A) == A))
    fail(Errc::NotACL, "subgroup is not its own almost-commuting center");
  const int ell = kt.ctx.ell;
  const int n = kt.n();
  const int m = kt.dim();
  detail::DenseSpan bspan = detail::beta_span(kt, A);
  std::vector<std::vector<int>> cond;
  for (const FlVector& tau : A.rows) {
    std::vector<std::vector<int>> res;
    for (int i = 0; i < n; ++i) {
      Character e = Character::dual_of(kt.window[i], ell);
      res.push_back(bspan.reduce(comm_class(kt, e, Character{tau}).values));
    }
    for (int k = 0; k < m; ++k) {
      std::vector<int> row(n);
      bool nonzero = false;
      for (int i = 0; i < n; ++i) {
        row[i] = res[i][k];
        nonzero |= row[i] != 0;
      }
      if (nonzero) cond.push_back(std::move(row));
    }
  }
  std::vector<FlVector> gens;
  for (const auto& c : detail::dense_nullspace(std::move(cond), n, ell)) {
    FlVector v;
    for (int i = 0; i < n; ++i)
      if (c[i]) v.set(kt.window[i], c[i], ell);
    gens.push_back(std::move(v));
  }
  return echelonize(kt.ctx, gens);
}

// ---- detection of valuations on the dual side ----------------------------------

// A subgroup strictly larger than its almost-commuting center that passes
// both detection clauses: the center is maximal (no proper overgroup's
// center contains it) and the subgroup is the centralizer of its center.
// Over the full field the two clauses provably coincide; a finite window
// sees only some overgroups and its truncated kernel can inflate centers,
// so subgroups passing one clause but not the other are reported separately
// as window artifacts instead of being counted.
struct MaximalCenterEntry {
  Subspace subgroup;
  Subspace center;
};

struct MaximalCenterReport {
  std::vector<MaximalCenterEntry> members;  // both clauses, scan order
  std::vector<MaximalCenterEntry> window_artifacts;  // exactly one clause
  std::uint64_t scanned = 0;
  std::vector<int> admitted_levels;  // chain levels with admissible valuation
  // The level-to-member map: each admitted level must land on a member
  // (well_defined) whose center is the level's inertia annihilator
  // (centers_match); distinct levels must land on distinct members
  // (injective) and every member must be hit (surjective).
  bool well_defined = true;
  bool injective = true;
  bool surjective = true;
  bool centers_match = true;
  // Whether the two detection clauses picked out the same family; expected
  // over a complete window, informational over a truncated one.
  bool clauses_agree = true;
  Verdict assurance;

  bool holds() const {
    return well_defined && injective && surjective && centers_match;
  }
};

inline MaximalCenterReport enumerate_maximal_centers(const Tower& t,
                                                     const Context& ctx,
                                                     int D = 4) {
  if (ctx.dim() > 6)
    fail(Errc::TooLarge, "context dimension above 6 for the dual scan");
  KerTheta kt = ker_theta(t, ctx);
  MaximalCenterReport rep;

  std::vector<std::pair<Subspace, Subspace>> all;  // (Z, center)
  for_each_subspace(ctx, count_all_subspaces(ctx.dim(), ctx.ell),
                    [&](const Subspace& Z) {
                      all.emplace_back(Z, acl_center(kt, Z));
                    });
  rep.scanned = all.size();

  for (const auto& [Z, IZ] : all) {
    if (IZ == Z) continue;
    bool maximal = true;
    for (const auto& [Zp, IZp] : all) {
      if (Zp.dim() <= Z.dim() || !Zp.contains_all(Z)) continue;
      if (IZp.contains_all(IZ)) {
        maximal = false;
        break;
      }
    }
    // Centralizer-of-center clause; needs the center to almost-commute.
    bool identity =
        acl_center(kt, IZ) == IZ && centralizer(kt, IZ) == Z;
    if (maximal && identity)
      rep.members.push_back({Z, IZ});
    else if (maximal || identity) {
      rep.window_artifacts.push_back({Z, IZ});
      rep.clauses_agree = false;
    }
  }

  // The valuation side: admitted chain levels and their dual pairs.
  Context work = ctx;
  ClassificationReport vk = enumerate_vk_tk(t, work, D);
  rep.admitted_levels = vk.admitted_levels();
  rep.assurance = vk.pairing.assurance;

  std::vector<Subspace> images;
  std::vector<bool> hit(rep.members.size(), false);
  for (int lv : rep.admitted_levels) {
    DualPair dp = d1_i1_of_v(t, lv, ctx);
    for (const Subspace& prev : images)
      if (prev == dp.d1) rep.injective = false;
    bool found = false;
    for (size_t i = 0; i < rep.members.size(); ++i)
      if (rep.members[i].subgroup == dp.d1) {
        found = true;
        hit[i] = true;
        if (!(rep.members[i].center == dp.i1)) rep.centers_match = false;
        break;
      }
    if (!found) rep.well_defined = false;
    images.push_back(std::move(dp.d1));
  }
  for (bool h : hit)
    if (!h) rep.surjective = false;
  return rep;
}

}  // namespace valdetect
