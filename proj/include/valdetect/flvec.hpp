#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "valdetect/errors.hpp"

namespace valdetect {

// Coordinates of K^x / (K^x)^ell live over a named basis rather than bare
// column numbers, so a context can grow (new irreducible factors showing up
// mid-computation) without renumbering anything already computed.
//
// Intrinsic order: the unit-class generator first, then Laurent variables
// from innermost to outermost, then irreducible polynomials by (degree,
// coefficient string).  Growth inserts new irreducibles between existing
// keys but never reorders them, so echelon forms stay echelon.
struct BasisIndex {
  enum class Kind : uint8_t { Unit = 0, Var = 1, Irr = 2 };
  Kind kind = Kind::Unit;
  int irr_degree = 0;   // Kind::Irr only
  std::string name;     // canonical polynomial string / variable name
  int var_level = 0;    // Kind::Var only; 1 = innermost Laurent variable

  static BasisIndex unit() { return BasisIndex{}; }
  static BasisIndex irr(int degree, std::string canonical) {
    BasisIndex b;
    b.kind = Kind::Irr;
    b.irr_degree = degree;
    b.name = std::move(canonical);
    return b;
  }
  static BasisIndex var(int level, std::string name) {
    BasisIndex b;
    b.kind = Kind::Var;
    b.var_level = level;
    b.name = std::move(name);
    return b;
  }

  std::string display() const {
    return kind == Kind::Unit ? std::string("zeta") : name;
  }

  friend auto operator<=>(const BasisIndex& a, const BasisIndex& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    switch (a.kind) {
      case Kind::Unit: return std::strong_ordering::equal;
      case Kind::Irr:
        if (a.irr_degree != b.irr_degree) return a.irr_degree <=> b.irr_degree;
        return a.name <=> b.name;
      case Kind::Var: return a.var_level <=> b.var_level;
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const BasisIndex& a, const BasisIndex& b) {
    return (a <=> b) == 0;
  }
};

inline int mod_norm(long long v, int ell) {
  long long r = v % ell;
  if (r < 0) r += ell;
  return static_cast<int>(r);
}

// Inverse mod ell; ell is a small prime.
inline int mod_inv(int a, int ell) {
  a = mod_norm(a, ell);
  for (int x = 1; x < ell; ++x)
    if (a * x % ell == 1) return x;
  fail(Errc::BadModulus, "no inverse of " + std::to_string(a));
}

// Sparse vector over F_ell keyed by BasisIndex.  Entries are always
// normalized to 1..ell-1; absent key means 0.
struct FlVector {
  std::map<BasisIndex, int> e;

  bool is_zero() const { return e.empty(); }
  int get(const BasisIndex& i) const {
    auto it = e.find(i);
    return it == e.end() ? 0 : it->second;
  }
  void set(const BasisIndex& i, long long v, int ell) {
    int r = mod_norm(v, ell);
    if (r == 0)
      e.erase(i);
    else
      e[i] = r;
  }
  void add_scaled(const FlVector& o, long long c, int ell) {
    for (const auto& [k, v] : o.e) set(k, get(k) + c * v, ell);
  }
  FlVector scaled(long long c, int ell) const {
    FlVector r;
    r.add_scaled(*this, c, ell);
    return r;
  }
  friend FlVector operator+(const FlVector& a, const FlVector& b) = delete;
  friend bool operator==(const FlVector& a, const FlVector& b) {
    return a.e == b.e;
  }
  friend auto operator<=>(const FlVector& a, const FlVector& b) {
    return a.e <=> b.e;
  }

  static FlVector unit(const BasisIndex& i, int c, int ell) {
    FlVector v;
    v.set(i, c, ell);
    return v;
  }

  std::string display() const {
    if (e.empty()) return "1";
    std::string s;
    for (const auto& [k, v] : e) {
      if (!s.empty()) s += "*";
      s += k.display();
      if (v != 1) s += "^" + std::to_string(v);
    }
    return s;
  }
};

inline FlVector fl_add(const FlVector& a, const FlVector& b, int ell) {
  FlVector r = a;
  r.add_scaled(b, 1, ell);
  return r;
}
inline FlVector fl_sub(const FlVector& a, const FlVector& b, int ell) {
  FlVector r = a;
  r.add_scaled(b, ell - 1, ell);
  return r;
}

// Basis window for one field: the modulus ell plus the ordered list of
// coordinate names currently in play.  Value type; operations that discover
// new irreducible factors return/extend a copy owned by the caller.
struct Context {
  int ell = 3;
  std::vector<BasisIndex> basis;  // sorted ascending, no duplicates

  int dim() const { return static_cast<int>(basis.size()); }

  bool has(const BasisIndex& i) const {
    return std::binary_search(basis.begin(), basis.end(), i);
  }
  int position(const BasisIndex& i) const {
    auto it = std::lower_bound(basis.begin(), basis.end(), i);
    if (it == basis.end() || !(*it == i))
      fail(Errc::OutOfContext, i.display());
    return static_cast<int>(it - basis.begin());
  }
  // Inserts if absent; keeps order.
  void add(const BasisIndex& i) {
    auto it = std::lower_bound(basis.begin(), basis.end(), i);
    if (it == basis.end() || !(*it == i)) basis.insert(it, i);
  }

  bool contains_vector(const FlVector& v) const {
    for (const auto& [k, c] : v.e) {
      (void)c;
      if (!has(k)) return false;
    }
    return true;
  }

  std::vector<int> dense(const FlVector& v) const {
    std::vector<int> d(basis.size(), 0);
    for (const auto& [k, c] : v.e) d[position(k)] = c;
    return d;
  }
  FlVector from_dense(const std::vector<int>& d) const {
    FlVector v;
    for (size_t i = 0; i < d.size() && i < basis.size(); ++i)
      v.set(basis[i], d[i], ell);
    return v;
  }

  friend bool operator==(const Context& a, const Context& b) {
    return a.ell == b.ell && a.basis == b.basis;
  }
};

inline void require_same_context(const Context& a, const Context& b) {
  if (!(a == b)) fail(Errc::ContextMismatch, "operands use different contexts");
}

}  // namespace valdetect
