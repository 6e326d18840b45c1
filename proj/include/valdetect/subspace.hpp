#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "valdetect/flvec.hpp"

namespace valdetect {

// Subgroup of K^x containing the ell-th powers, stored as the subspace of
// class space it cuts out.  Rows are kept in reduced row-echelon form over
// the context's basis order, so equal subspaces have equal representations.
struct Subspace {
  Context ctx;
  std::vector<FlVector> rows;

  int dim() const { return static_cast<int>(rows.size()); }

  // Residual of v after eliminating every pivot row; zero iff v lies in the
  // subspace.
  FlVector reduce(const FlVector& v) const {
    FlVector r = v;
    for (const FlVector& row : rows) {
      const BasisIndex& piv = row.e.begin()->first;
      int c = r.get(piv);
      if (c) r.add_scaled(row, ctx.ell - c, ctx.ell);
    }
    return r;
  }
  bool contains(const FlVector& v) const { return reduce(v).is_zero(); }
  bool contains_all(const Subspace& other) const {
    for (const FlVector& r : other.rows)
      if (!contains(r)) return false;
    return true;
  }

  std::string display() const {
    if (rows.empty()) return "{1}";
    std::string s;
    for (const FlVector& r : rows) {
      if (!s.empty()) s += ", ";
      s += r.display();
    }
    return "<" + s + ">";
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ctx == b.ctx && a.rows == b.rows;
  }
  // Deterministic order for use as a map key (assumes same context).
  friend auto operator<=>(const Subspace& a, const Subspace& b) {
    return a.rows <=> b.rows;
  }
};

inline Subspace echelonize(const Context& ctx, std::vector<FlVector> gens) {
  std::vector<FlVector> rows;
  for (FlVector v : gens) {
    for (const FlVector& row : rows) {
      const BasisIndex& piv = row.e.begin()->first;
      int c = v.get(piv);
      if (c) v.add_scaled(row, ctx.ell - c, ctx.ell);
    }
    if (v.is_zero()) continue;
    const BasisIndex piv = v.e.begin()->first;
    v = v.scaled(mod_inv(v.get(piv), ctx.ell), ctx.ell);
    // Clear the new pivot from earlier rows, keep rows sorted by pivot.
    for (FlVector& row : rows) {
      int c = row.get(piv);
      if (c) row.add_scaled(v, ctx.ell - c, ctx.ell);
    }
    rows.push_back(v);
  }
  std::sort(rows.begin(), rows.end(), [](const FlVector& a, const FlVector& b) {
    return a.e.begin()->first < b.e.begin()->first;
  });
  return Subspace{ctx, std::move(rows)};
}

inline Subspace zero_subspace(const Context& ctx) { return Subspace{ctx, {}}; }

inline Subspace full_subspace(const Context& ctx) {
  std::vector<FlVector> rows;
  for (const BasisIndex& b : ctx.basis)
    rows.push_back(FlVector::unit(b, 1, ctx.ell));
  return Subspace{ctx, std::move(rows)};
}

inline Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  require_same_context(a.ctx, b.ctx);
  std::vector<FlVector> gens = a.rows;
  gens.insert(gens.end(), b.rows.begin(), b.rows.end());
  return echelonize(a.ctx, gens);
}

inline Subspace subspace_span(const Subspace& a, const FlVector& extra) {
  std::vector<FlVector> gens = a.rows;
  gens.push_back(extra);
  return echelonize(a.ctx, gens);
}

// Nullspace of the row set under the standard dot product; with dual
// coordinates written over the same named basis.  Inclusion-reversing, and
// annihilator(annihilator(A)) == A.
inline Subspace annihilator(const Subspace& a) {
  const Context& ctx = a.ctx;
  const int n = ctx.dim();
  std::vector<std::vector<int>> m;
  for (const FlVector& r : a.rows) m.push_back(ctx.dense(r));
  // Gauss-Jordan; record pivot column per row.
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < static_cast<int>(m.size()); ++col) {
    int sel = -1;
    for (int i = row; i < static_cast<int>(m.size()); ++i)
      if (m[i][col]) { sel = i; break; }
    if (sel < 0) continue;
    std::swap(m[sel], m[row]);
    int inv = mod_inv(m[row][col], ctx.ell);
    for (int j = 0; j < n; ++j) m[row][j] = m[row][j] * inv % ctx.ell;
    for (int i = 0; i < static_cast<int>(m.size()); ++i) {
      if (i == row || !m[i][col]) continue;
      int c = m[i][col];
      for (int j = 0; j < n; ++j)
        m[i][j] = mod_norm(m[i][j] - c * m[row][j], ctx.ell);
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<FlVector> null_rows;
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    FlVector v;
    v.set(ctx.basis[free], 1, ctx.ell);
    for (size_t r = 0; r < pivot_col.size(); ++r)
      v.set(ctx.basis[pivot_col[r]], -m[r][free], ctx.ell);
    null_rows.push_back(std::move(v));
  }
  return echelonize(ctx, null_rows);
}

inline Subspace intersect(const Subspace& a, const Subspace& b) {
  require_same_context(a.ctx, b.ctx);
  return annihilator(subspace_sum(annihilator(a), annihilator(b)));
}

// ---- enumeration ----------------------------------------------------------

// Visits every vector of the context's class space (including zero) in
// odometer order, last coordinate fastest.  Returns false if fn aborted.
inline bool for_each_vector(const Context& ctx,
                            const std::function<bool(const FlVector&)>& fn) {
  const int n = ctx.dim();
  std::vector<int> d(n, 0);
  while (true) {
    if (!fn(ctx.from_dense(d))) return false;
    int i = n - 1;
    while (i >= 0 && d[i] == ctx.ell - 1) d[i--] = 0;
    if (i < 0) return true;
    ++d[i];
  }
}

// One representative per nonzero class up to scaling: first nonzero
// coordinate equals 1.
inline bool for_each_line(const Context& ctx,
                          const std::function<bool(const FlVector&)>& fn) {
  return for_each_vector(ctx, [&](const FlVector& v) {
    if (v.is_zero()) return true;
    if (v.e.begin()->second != 1) return true;
    return fn(v);
  });
}

inline std::vector<FlVector> all_lines(const Context& ctx) {
  std::vector<FlVector> out;
  for_each_line(ctx, [&](const FlVector& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

// All subspaces, enumerated as reduced row-echelon patterns: for every
// dimension k and pivot-column set, every assignment of the free entries.
// Aborts with TooLarge once more than `cap` subspaces have been produced.
inline void for_each_subspace(const Context& ctx, uint64_t cap,
                              const std::function<void(const Subspace&)>& fn,
                              std::optional<int> dim_filter = std::nullopt) {
  const int n = ctx.dim();
  if (n > 12) fail(Errc::TooLarge, "subspace enumeration beyond dim 12");
  uint64_t produced = 0;
  std::vector<int> pivots;
  std::function<void(int, int)> choose = [&](int k, int start) {
    if (static_cast<int>(pivots.size()) == k) {
      // Free positions: (row i, col j) with j > pivots[i] and j not a pivot.
      std::vector<std::pair<int, int>> free_pos;
      std::vector<bool> is_pivot(n, false);
      for (int p : pivots) is_pivot[p] = true;
      for (int i = 0; i < k; ++i)
        for (int j = pivots[i] + 1; j < n; ++j)
          if (!is_pivot[j]) free_pos.emplace_back(i, j);
      std::vector<int> assign(free_pos.size(), 0);
      while (true) {
        if (++produced > cap)
          fail(Errc::TooLarge, "subspace enumeration exceeded cap");
        std::vector<FlVector> rows(k);
        for (int i = 0; i < k; ++i)
          rows[i].set(ctx.basis[pivots[i]], 1, ctx.ell);
        for (size_t f = 0; f < free_pos.size(); ++f)
          rows[free_pos[f].first].set(ctx.basis[free_pos[f].second], assign[f],
                                      ctx.ell);
        fn(Subspace{ctx, rows});
        int i = static_cast<int>(assign.size()) - 1;
        while (i >= 0 && assign[i] == ctx.ell - 1) assign[i--] = 0;
        if (i < 0) break;
        ++assign[i];
      }
      return;
    }
    for (int p = start; p < n; ++p) {
      pivots.push_back(p);
      choose(k, p + 1);
      pivots.pop_back();
    }
  };
  for (int k = 0; k <= n; ++k) {
    if (dim_filter && *dim_filter != k) continue;
    choose(k, 0);
  }
}

inline std::vector<Subspace> enumerate_subspaces(
    const Context& ctx, uint64_t cap = 1'000'000,
    std::optional<int> dim_filter = std::nullopt) {
  std::vector<Subspace> out;
  for_each_subspace(
      ctx, cap, [&](const Subspace& s) { out.push_back(s); }, dim_filter);
  return out;
}

// Number of k-dimensional subspaces of an n-dimensional space over F_ell
// (Gaussian binomial); saturates at UINT64_MAX on overflow.
inline uint64_t gaussian_binomial(int n, int k, int ell) {
  if (k < 0 || k > n) return 0;
  // [n,k]_q = prod_{i=0..k-1} (q^{n-i}-1)/(q^{i+1}-1)
  long double acc = 1;
  for (int i = 0; i < k; ++i) {
    long double top = powl((long double)ell, n - i) - 1;
    long double bot = powl((long double)ell, i + 1) - 1;
    acc = acc * top / bot;
  }
  if (acc > 1.8e19L) return UINT64_MAX;
  return static_cast<uint64_t>(llroundl(acc));
}

inline uint64_t count_all_subspaces(int n, int ell) {
  uint64_t total = 0;
  for (int k = 0; k <= n; ++k) {
    uint64_t c = gaussian_binomial(n, k, ell);
    if (c == UINT64_MAX || total > UINT64_MAX - c) return UINT64_MAX;
    total += c;
  }
  return total;
}

}  // namespace valdetect
