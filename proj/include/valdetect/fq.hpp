#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "valdetect/errors.hpp"

namespace valdetect {

using u64 = uint64_t;
using u128 = unsigned __int128;

// Small finite field F_q, q = p^e <= 2^16.  Elements are packed base-p digit
// strings: value = sum c_i * p^i with c_i the coefficients over F_p in a
// fixed polynomial basis (modulus found by deterministic search).  For e = 1
// the packing is just the residue.
class Fq {
 public:
  Fq() = default;
  Fq(uint32_t p, uint32_t e) : p_(p), e_(e) {
    if (p < 2 || !is_prime(p)) fail(Errc::BadModulus, "characteristic");
    q_ = 1;
    for (uint32_t i = 0; i < e; ++i) {
      q_ *= p;
      if (q_ > (1u << 16)) fail(Errc::BadModulus, "q exceeds 2^16");
    }
    if (e_ > 1) modulus_ = find_modulus();
    g_ = find_generator();
  }

  static Fq from_q(u64 q) {
    for (uint32_t p = 2; p <= q; ++p) {
      if (!is_prime(p)) continue;
      u64 t = q;
      uint32_t e = 0;
      while (t % p == 0) t /= p, ++e;
      if (t == 1) return Fq(p, e);
      if (q % p == 0) break;
    }
    fail(Errc::BadModulus, "q is not a prime power");
  }

  uint32_t p() const { return p_; }
  uint32_t e() const { return e_; }
  u64 q() const { return q_; }
  u64 generator() const { return g_; }

  u64 add(u64 a, u64 b) const {
    if (e_ == 1) return (a + b) % p_;
    u64 r = 0, mul = 1;
    for (uint32_t i = 0; i < e_; ++i) {
      r += (a % p_ + b % p_) % p_ * mul;
      a /= p_;
      b /= p_;
      mul *= p_;
    }
    return r;
  }
  u64 neg(u64 a) const {
    if (e_ == 1) return (p_ - a % p_) % p_;
    u64 r = 0, mul = 1;
    for (uint32_t i = 0; i < e_; ++i) {
      r += (p_ - a % p_) % p_ * mul;
      a /= p_;
      mul *= p_;
    }
    return r;
  }
  u64 sub(u64 a, u64 b) const { return add(a, neg(b)); }

  u64 mul(u64 a, u64 b) const {
    if (e_ == 1) return a * b % p_;
    std::vector<uint32_t> da = digits(a), db = digits(b);
    std::vector<uint32_t> prod(2 * e_ - 1, 0);
    for (uint32_t i = 0; i < e_; ++i)
      for (uint32_t j = 0; j < e_; ++j)
        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    // Reduce mod the modulus polynomial (monic of degree e).
    for (int k = 2 * e_ - 2; k >= static_cast<int>(e_); --k) {
      uint32_t c = prod[k];
      if (!c) continue;
      prod[k] = 0;
      for (uint32_t i = 0; i < e_; ++i)
        prod[k - e_ + i] =
            (prod[k - e_ + i] + c * (p_ - modulus_[i])) % p_;
    }
    u64 r = 0, mul_ = 1;
    for (uint32_t i = 0; i < e_; ++i) {
      r += prod[i] * mul_;
      mul_ *= p_;
    }
    return r;
  }

  u64 pow(u64 a, u128 n) const {
    u64 r = 1;
    a %= q_;
    while (n) {
      if (n & 1) r = mul(r, a);
      a = mul(a, a);
      n >>= 1;
    }
    return r;
  }

  u64 inv(u64 a) const {
    if (a == 0) fail(Errc::ZeroElement, "inverse of 0");
    return pow(a, q_ - 2);
  }

  // Discrete log base the canonical generator; lazily built table.
  int dlog(u64 a) const {
    if (a == 0) fail(Errc::ZeroElement, "dlog of 0");
    if (dlog_table_.empty()) {
      dlog_table_.assign(q_, -1);
      u64 cur = 1;
      for (u64 k = 0; k < q_ - 1; ++k) {
        dlog_table_[cur] = static_cast<int>(k);
        cur = mul(cur, g_);
      }
    }
    return dlog_table_[a];
  }

  int class_mod(u64 a, int ell) const { return dlog(a) % ell; }

  // Reads integer constants into the prime subfield.
  u64 from_int(long long v) const {
    long long r = v % static_cast<long long>(p_);
    if (r < 0) r += p_;
    return static_cast<u64>(r);
  }

  static bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

  friend bool operator==(const Fq& a, const Fq& b) {
    return a.p_ == b.p_ && a.e_ == b.e_;
  }

 private:
  std::vector<uint32_t> digits(u64 a) const {
    std::vector<uint32_t> d(e_);
    for (uint32_t i = 0; i < e_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }

  // --- minimal F_p[y] helpers for finding an irreducible modulus ---
  using Fp = std::vector<uint32_t>;  // coeffs, may carry leading zeros

  Fp fp_trim(Fp f) const {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
  }
  Fp fp_mulmod(const Fp& a, const Fp& b, const Fp& m) const {
    Fp prod(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j)
        prod[i + j] = (prod[i + j] + a[i] * b[j]) % p_;
    // m is monic.
    for (int k = static_cast<int>(prod.size()) - 1;
         k >= static_cast<int>(m.size()) - 1; --k) {
      uint32_t c = prod[k];
      if (!c) continue;
      prod[k] = 0;
      for (size_t i = 0; i + 1 < m.size(); ++i)
        prod[k - (m.size() - 1) + i] =
            (prod[k - (m.size() - 1) + i] + c * (p_ - m[i])) % p_;
    }
    return fp_trim(prod);
  }
  Fp fp_powmod(Fp a, u64 n, const Fp& m) const {
    Fp r{1};
    while (n) {
      if (n & 1) r = fp_mulmod(r, a, m);
      a = fp_mulmod(a, a, m);
      n >>= 1;
    }
    return r;
  }
  Fp fp_gcd(Fp a, Fp b) const {
    a = fp_trim(a);
    b = fp_trim(b);
    while (!b.empty()) {
      // a mod b, b made monic first
      uint32_t lead_inv = 1;
      {  // inverse of b's leading coeff mod p
        uint32_t lb = b.back();
        for (uint32_t x = 1; x < p_; ++x)
          if (lb * x % p_ == 1) { lead_inv = x; break; }
      }
      for (uint32_t& c : b) c = c * lead_inv % p_;
      while (a.size() >= b.size() && !a.empty()) {
        uint32_t c = a.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i)
          a[shift + i] = (a[shift + i] + c * (p_ - b[i])) % p_;
        a = fp_trim(a);
      }
      std::swap(a, b);
    }
    return a;
  }

  bool fp_irreducible(const Fp& f) const {
    // f monic of degree e; irreducible iff y^{p^e} == y mod f and for every
    // prime r | e, gcd(y^{p^{e/r}} - y, f) == 1.
    uint32_t d = static_cast<uint32_t>(f.size()) - 1;
    Fp y{0, 1};
    Fp t = y;
    for (uint32_t i = 0; i < d; ++i) t = fp_powmod(t, p_, f);
    Fp diff = t;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = (diff[1] + p_ - 1) % p_;
    if (!fp_trim(diff).empty()) return false;
    for (uint32_t r = 2; r <= d; ++r) {
      if (d % r || !is_prime(r)) continue;
      Fp s = y;
      for (uint32_t i = 0; i < d / r; ++i) s = fp_powmod(s, p_, f);
      Fp df = s;
      if (df.size() < 2) df.resize(2, 0);
      df[1] = (df[1] + p_ - 1) % p_;
      if (fp_gcd(df, f).size() > 1) return false;
    }
    return true;
  }

  std::vector<uint32_t> find_modulus() const {
    // Smallest monic irreducible of degree e over F_p, constant digits
    // enumerated as a base-p odometer.
    u64 total = 1;
    for (uint32_t i = 0; i < e_; ++i) total *= p_;
    for (u64 m = 0; m < total; ++m) {
      Fp f(e_ + 1, 0);
      u64 t = m;
      for (uint32_t i = 0; i < e_; ++i) {
        f[i] = t % p_;
        t /= p_;
      }
      f[e_] = 1;
      if (fp_irreducible(f)) return f;
    }
    fail(Errc::BadModulus, "no irreducible modulus found");
  }

  u64 find_generator() const {
    std::vector<u64> prime_factors;
    u64 n = q_ - 1;
    for (u64 d = 2; d * d <= n; ++d)
      while (n % d == 0) {
        prime_factors.push_back(d);
        while (n % d == 0) n /= d;
        break;
      }
    if (n > 1) prime_factors.push_back(n);
    // Dedup.
    std::sort(prime_factors.begin(), prime_factors.end());
    prime_factors.erase(
        std::unique(prime_factors.begin(), prime_factors.end()),
        prime_factors.end());
    for (u64 cand = 2; cand < q_; ++cand) {
      bool ok = true;
      for (u64 r : prime_factors)
        if (pow(cand, (q_ - 1) / r) == 1) { ok = false; break; }
      if (ok) return cand;
    }
    fail(Errc::BadModulus, "no generator found");
  }

  uint32_t p_ = 2, e_ = 1;
  u64 q_ = 2;
  u64 g_ = 1;
  std::vector<uint32_t> modulus_;
  mutable std::vector<int> dlog_table_;
};

}  // namespace valdetect
