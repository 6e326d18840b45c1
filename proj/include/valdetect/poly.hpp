#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "valdetect/fq.hpp"

namespace valdetect {

// Dense univariate polynomial over F_q.  Coefficients packed (fq.hpp),
// index = degree, normalized with no leading zeros; zero poly = empty.
struct Poly {
  std::vector<u64> c;

  static Poly zero() { return {}; }
  static Poly constant(u64 v) { return v ? Poly{{v}} : Poly{}; }
  static Poly var() { return Poly{{0, 1}}; }

  int deg() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  u64 lead() const { return c.empty() ? 0 : c.back(); }
  u64 coeff(size_t i) const { return i < c.size() ? c[i] : 0; }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }
  // Order: by degree, then coefficient tuple from the top down.  Gives the
  // deterministic enumeration order used everywhere irreducibles are listed.
  friend bool operator<(const Poly& a, const Poly& b) {
    if (a.c.size() != b.c.size()) return a.c.size() < b.c.size();
    for (size_t i = a.c.size(); i-- > 0;)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  }
};

class PolyRing {
 public:
  explicit PolyRing(const Fq& k) : k_(&k) {}

  const Fq& field() const { return *k_; }

  Poly add(const Poly& a, const Poly& b) const {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i)
      r.c[i] = k_->add(a.coeff(i), b.coeff(i));
    r.trim();
    return r;
  }
  Poly neg(const Poly& a) const {
    Poly r = a;
    for (u64& x : r.c) x = k_->neg(x);
    return r;
  }
  Poly sub(const Poly& a, const Poly& b) const { return add(a, neg(b)); }

  Poly mul(const Poly& a, const Poly& b) const {
    if (a.is_zero() || b.is_zero()) return {};
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j)
        r.c[i + j] = k_->add(r.c[i + j], k_->mul(a.c[i], b.c[j]));
    r.trim();
    return r;
  }

  Poly scale(const Poly& a, u64 s) const {
    Poly r = a;
    for (u64& x : r.c) x = k_->mul(x, s);
    r.trim();
    return r;
  }

  // Division with remainder; divisor must be nonzero.
  std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) const {
    if (b.is_zero()) fail(Errc::ZeroElement, "poly division by zero");
    Poly rem = a, quot;
    if (a.deg() >= b.deg()) quot.c.assign(a.deg() - b.deg() + 1, 0);
    u64 li = k_->inv(b.lead());
    while (rem.deg() >= b.deg()) {
      u64 f = k_->mul(rem.lead(), li);
      int shift = rem.deg() - b.deg();
      quot.c[shift] = f;
      for (size_t i = 0; i < b.c.size(); ++i)
        rem.c[shift + i] =
            k_->sub(rem.c[shift + i], k_->mul(f, b.c[i]));
      rem.trim();
    }
    quot.trim();
    return {quot, rem};
  }
  Poly mod(const Poly& a, const Poly& b) const { return divmod(a, b).second; }
  Poly div(const Poly& a, const Poly& b) const { return divmod(a, b).first; }

  Poly monic(const Poly& a) const {
    if (a.is_zero()) return a;
    return scale(a, k_->inv(a.lead()));
  }

  Poly gcd(Poly a, Poly b) const {
    while (!b.is_zero()) {
      Poly r = mod(a, b);
      a = b;
      b = r;
    }
    return monic(a);
  }

  Poly derivative(const Poly& a) const {
    Poly r;
    if (a.c.size() < 2) return r;
    r.c.resize(a.c.size() - 1);
    for (size_t i = 1; i < a.c.size(); ++i)
      r.c[i - 1] = k_->mul(a.c[i], k_->from_int(static_cast<long long>(i)));
    r.trim();
    return r;
  }

  u64 eval(const Poly& a, u64 x) const {
    u64 r = 0;
    for (size_t i = a.c.size(); i-- > 0;) r = k_->add(k_->mul(r, x), a.c[i]);
    return r;
  }

  Poly mulmod(const Poly& a, const Poly& b, const Poly& m) const {
    return mod(mul(a, b), m);
  }
  Poly powmod(Poly a, u128 n, const Poly& m) const {
    Poly r = Poly::constant(1);
    a = mod(a, m);
    while (n) {
      if (n & 1) r = mulmod(r, a, m);
      a = mulmod(a, a, m);
      n >>= 1;
    }
    return r;
  }

  // q-th power of a coefficient leaves it fixed; p-th root in F_q is
  // a -> a^{q/p}, used when the derivative vanishes.
  u64 pth_root(u64 a) const { return k_->pow(a, k_->q() / k_->p()); }

  // --- factorization ---

  // Monic squarefree part list: (g_i, multiplicity), product g_i^{m_i} = f/lc.
  std::vector<std::pair<Poly, int>> squarefree(const Poly& f0) const {
    std::vector<std::pair<Poly, int>> out;
    squarefree_rec(monic(f0), 1, out);
    return out;
  }

  bool is_irreducible(const Poly& f) const {
    if (f.deg() < 1) return false;
    Poly m = monic(f);
    int d = m.deg();
    Poly x = Poly::var();
    Poly t = powmod(x, q_pow(d), m);
    if (!mod(sub(t, x), m).is_zero()) return false;
    for (int r = 2; r <= d; ++r) {
      if (d % r || !Fq::is_prime(static_cast<u64>(r))) continue;
      Poly s = powmod(x, q_pow(d / r), m);
      if (gcd(sub(s, x), m).deg() > 0) return false;
    }
    return true;
  }

  // Full factorization of nonzero f: leading unit and map irreducible -> mult.
  struct Factorization {
    u64 unit;
    std::map<Poly, int> factors;
  };
  Factorization factor(const Poly& f) const {
    if (f.is_zero()) fail(Errc::ZeroElement, "factor of zero polynomial");
    Factorization out;
    out.unit = f.lead();
    for (auto& [g, mult] : squarefree(f)) {
      for (auto& [d, prod] : ddf(g))
        for (const Poly& irr : edf(prod, d)) out.factors[irr] += mult;
    }
    return out;
  }

  // Monic irreducibles of degree d, in the canonical Poly order.
  std::vector<Poly> irreducibles(int d) const {
    std::vector<Poly> out;
    u64 total = 1;
    for (int i = 0; i < d; ++i) {
      total *= k_->q();
      if (total > 2'000'000) fail(Errc::TooLarge, "irreducible enumeration");
    }
    for (u64 m = 0; m < total; ++m) {
      // Base-q digits of m are the low coefficients; ascending m matches the
      // canonical Poly order on monic degree-d polynomials.
      Poly f;
      f.c.assign(d + 1, 0);
      u64 t = m;
      for (int i = 0; i < d; ++i) {
        f.c[i] = t % k_->q();
        t /= k_->q();
      }
      f.c[d] = 1;
      if (is_irreducible(f)) out.push_back(f);
    }
    return out;
  }

  // --- printing / parsing ---

  // Balanced representative of a prime-field element for printing.
  long long balanced(u64 a) const {
    long long p = static_cast<long long>(k_->p());
    long long v = static_cast<long long>(a % static_cast<u64>(p));
    if (2 * v > p) v -= p;
    return v;
  }

  std::string to_string(const Poly& f, const std::string& var) const {
    if (f.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (size_t i = f.c.size(); i-- > 0;) {
      if (!f.c[i]) continue;
      long long v = k_->e() == 1 ? balanced(f.c[i])
                                 : static_cast<long long>(f.c[i]);
      bool negative = v < 0;
      long long av = negative ? -v : v;
      if (first) {
        if (negative) s += "-";
        first = false;
      } else {
        s += negative ? "-" : "+";
      }
      if (i == 0 || av != 1) s += std::to_string(av);
      if (i >= 1) {
        s += var;
        if (i >= 2) s += "^" + std::to_string(i);
      }
    }
    return s;
  }

  // Accepts sums of terms c, c*v^k, v^k, with optional '*' and whitespace.
  Poly parse(const std::string& text, const std::string& var) const {
    size_t pos = 0;
    auto skip = [&] {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    Poly result = Poly::zero();
    skip();
    if (pos == text.size()) fail(Errc::SpecParse, "empty polynomial");
    bool any = false;
    while (true) {
      skip();
      int sign = 1;
      while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        if (text[pos] == '-') sign = -sign;
        ++pos;
        skip();
      }
      if (pos == text.size()) {
        if (!any) fail(Errc::SpecParse, "empty polynomial");
        break;
      }
      long long coeff = 1;
      bool saw_num = false, saw_var = false;
      if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
        coeff = 0;
        while (pos < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos]))) {
          coeff = coeff * 10 + (text[pos] - '0');
          coeff %= static_cast<long long>(k_->p());
          ++pos;
        }
        saw_num = true;
        skip();
        if (pos < text.size() && text[pos] == '*') {
          ++pos;
          skip();
        }
      }
      int power = 0;
      if (pos < text.size() && text.compare(pos, var.size(), var) == 0) {
        pos += var.size();
        saw_var = true;
        power = 1;
        skip();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip();
          if (pos == text.size() ||
              !std::isdigit(static_cast<unsigned char>(text[pos])))
            fail(Errc::SpecParse, "bad exponent");
          power = 0;
          while (pos < text.size() &&
                 std::isdigit(static_cast<unsigned char>(text[pos]))) {
            power = power * 10 + (text[pos] - '0');
            if (power > 1000) fail(Errc::SpecParse, "exponent too large");
            ++pos;
          }
        }
      }
      if (!saw_num && !saw_var) fail(Errc::SpecParse, "bad term in polynomial");
      Poly term;
      term.c.assign(power + 1, 0);
      term.c[power] = k_->from_int(sign * coeff);
      term.trim();
      result = add(result, term);
      any = true;
      skip();
      if (pos == text.size()) break;
      if (text[pos] != '+' && text[pos] != '-')
        fail(Errc::SpecParse, "unexpected character in polynomial");
    }
    return result;
  }

 private:
  u128 q_pow(int d) const {
    u128 r = 1;
    for (int i = 0; i < d; ++i) r *= k_->q();
    return r;
  }

  void squarefree_rec(const Poly& f, int mult,
                      std::vector<std::pair<Poly, int>>& out) const {
    if (f.deg() < 1) return;
    Poly d = derivative(f);
    if (d.is_zero()) {
      // f = g(x^p); take p-th roots of the surviving coefficients.
      Poly g;
      g.c.resize(f.deg() / k_->p() + 1, 0);
      for (size_t i = 0; i < g.c.size(); ++i)
        g.c[i] = pth_root(f.coeff(i * k_->p()));
      g.trim();
      squarefree_rec(g, mult * static_cast<int>(k_->p()), out);
      return;
    }
    Poly a = gcd(f, d);       // carries repeated part
    Poly w = div(f, a);       // product of factors with mult not divisible by p
    int i = 1;
    while (w.deg() > 0) {
      Poly y = gcd(w, a);
      Poly part = div(w, y);
      if (part.deg() > 0) out.emplace_back(monic(part), mult * i);
      w = y;
      a = div(a, y);
      ++i;
    }
    if (a.deg() > 0) squarefree_rec(a, mult, out);  // leftover p-th powers
  }

  // Distinct-degree: squarefree monic f -> list of (d, product of deg-d irr).
  std::vector<std::pair<int, Poly>> ddf(const Poly& f0) const {
    std::vector<std::pair<int, Poly>> out;
    Poly f = f0;
    Poly h = Poly::var();
    int d = 0;
    while (f.deg() > 0) {
      ++d;
      if (2 * d > f.deg()) {
        out.emplace_back(f.deg(), f);
        break;
      }
      h = powmod(h, k_->q(), f);
      Poly g = gcd(sub(h, Poly::var()), f);
      if (g.deg() > 0) {
        out.emplace_back(d, g);
        f = div(f, g);
        h = mod(h, f);
      }
    }
    return out;
  }

  // Equal-degree splitting, deterministic candidate sweep (q odd).
  std::vector<Poly> edf(const Poly& f, int d) const {
    std::vector<Poly> out;
    if (f.deg() == d) {
      out.push_back(monic(f));
      return out;
    }
    if (k_->q() % 2 == 0) fail(Errc::BadModulus, "even q not supported here");
    u128 exp = (q_pow(d) - 1) / 2;
    // Candidates: polys of degree < deg f with packed coefficients counting
    // up; every split eventually succeeds since the candidate set exhausts
    // representatives of distinct residues.
    for (u64 trial = 1;; ++trial) {
      Poly r;
      u64 t = trial;
      size_t i = 0;
      while (t) {
        r.c.resize(i + 1, 0);
        r.c[i] = t % k_->q();
        t /= k_->q();
        ++i;
      }
      r.trim();
      if (r.deg() >= f.deg()) fail(Errc::NoWitnessFound, "edf split failed");
      Poly s = powmod(r, exp, f);
      Poly g = gcd(sub(s, Poly::constant(1)), f);
      if (g.deg() > 0 && g.deg() < f.deg()) {
        for (auto& part : {g, div(f, g)})
          for (const Poly& irr : edf(part, d)) out.push_back(irr);
        return out;
      }
    }
  }

  const Fq* k_;
};

// Residue field F_q[x]/(P) for a monic irreducible P.  Elements are Poly of
// degree < deg P.  Provides the unit-class and norm-class maps used at
// places of the rational function field.
class FqExt {
 public:
  FqExt(const PolyRing& ring, Poly modulus)
      : ring_(&ring), mod_(ring.monic(std::move(modulus))) {
    d_ = mod_.deg();
    if (d_ < 1) fail(Errc::BadModulus, "residue field modulus");
    if (d_ * 16 > 120) fail(Errc::TooLarge, "residue field too large");
  }

  const Poly& modulus() const { return mod_; }
  int degree() const { return d_; }
  const PolyRing& ring() const { return *ring_; }

  u128 order() const {
    u128 r = 1;
    for (int i = 0; i < d_; ++i) r *= ring_->field().q();
    return r;
  }

  Poly reduce(const Poly& a) const { return ring_->mod(a, mod_); }
  Poly mul(const Poly& a, const Poly& b) const {
    return ring_->mulmod(a, b, mod_);
  }
  Poly pow(const Poly& a, u128 n) const { return ring_->powmod(a, n, mod_); }

  // Class of a unit in k(P)^x / (k(P)^x)^ell, measured against a canonical
  // generator of the order-ell quotient: the packed-order smallest h with
  // h^{(|k(P)|-1)/ell} != 1.  For degree 1 the base-field generator is used
  // so classes agree with base-field dlogs.
  int unit_class(const Poly& a0, int ell) const {
    Poly a = reduce(a0);
    if (a.is_zero()) fail(Errc::ZeroElement, "class of zero residue");
    u128 m = (order() - 1) / static_cast<u128>(ell);
    Poly target = pow(a, m);
    Poly omega = omega_root(ell);
    Poly cur = Poly::constant(1);
    for (int c = 0; c < ell; ++c) {
      if (cur == target) return c;
      cur = mul(cur, omega);
    }
    fail(Errc::BadModulus, "unit class not found (ell | q^d - 1 required)");
  }

  // Norm down to F_q: N(a) = a^{(q^d-1)/(q-1)}, a constant residue.
  u64 norm(const Poly& a0) const {
    Poly a = reduce(a0);
    if (a.is_zero()) return 0;
    u128 e = (order() - 1) / static_cast<u128>(ring_->field().q() - 1);
    Poly n = pow(a, e);
    if (n.deg() > 0) fail(Errc::BadModulus, "norm not constant");
    return n.coeff(0);
  }

  int norm_class(const Poly& a, int ell) const {
    u64 n = norm(a);
    if (n == 0) fail(Errc::ZeroElement, "norm class of zero");
    return ring_->field().class_mod(n, ell);
  }

 private:
  Poly omega_root(int ell) const {
    u128 m = (order() - 1) / static_cast<u128>(ell);
    if (m * static_cast<u128>(ell) != order() - 1)
      fail(Errc::BadModulus, "ell does not divide residue order");
    if (d_ == 1) {
      u64 g = ring_->field().generator();
      return pow(Poly::constant(g), m);
    }
    // Packed odometer over candidate residues.
    for (u64 h = 2;; ++h) {
      Poly cand;
      u64 t = h;
      size_t i = 0;
      while (t) {
        cand.c.resize(i + 1, 0);
        cand.c[i] = t % ring_->field().q();
        t /= ring_->field().q();
        ++i;
      }
      cand.trim();
      if (cand.deg() >= d_) fail(Errc::BadModulus, "no omega root");
      Poly w = pow(cand, m);
      if (!(w == Poly::constant(1))) return w;
    }
  }

  const PolyRing* ring_;
  Poly mod_;
  int d_;
};

}  // namespace valdetect
