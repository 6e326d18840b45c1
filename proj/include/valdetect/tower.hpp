#pragma once

#include <cctype>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "valdetect/flvec.hpp"
#include "valdetect/poly.hpp"

namespace valdetect {

// Reduced fraction of base-variable polynomials; den monic, gcd(num,den)=1.
struct RatFun {
  Poly num;
  Poly den;
};

struct SeriesData;

// Element of an iterated Laurent tower, stored at full depth: one Series
// node per Laurent layer (outermost first), with a scalar or rational leaf.
// Immutable; shared substructure is safe.
struct Elem {
  enum class Kind { Scalar, Rational, Series };
  Kind kind = Kind::Scalar;
  u64 scalar = 0;
  std::shared_ptr<const RatFun> rat;
  std::shared_ptr<const SeriesData> ser;

  static Elem make_scalar(u64 v) {
    Elem e;
    e.kind = Kind::Scalar;
    e.scalar = v;
    return e;
  }
  static Elem make_rational(RatFun r) {
    Elem e;
    e.kind = Kind::Rational;
    e.rat = std::make_shared<RatFun>(std::move(r));
    return e;
  }
  static Elem make_series(SeriesData s);
};

// Finite sum of (exponent, coefficient) terms, sorted by ascending exponent.
// A truncated series knows nothing about exponents >= prec.
struct SeriesData {
  std::vector<std::pair<int, Elem>> terms;
  bool exact = true;
  int prec = 0;  // meaningful only when !exact
};

inline Elem Elem::make_series(SeriesData s) {
  Elem e;
  e.kind = Kind::Series;
  e.ser = std::make_shared<SeriesData>(std::move(s));
  return e;
}

// Precision sentinel for exact data; saturating add keeps it stable.
inline constexpr int kExactPrec = std::numeric_limits<int>::max() / 4;
inline int prec_add(int a, int b) {
  if (a >= kExactPrec) return kExactPrec;  // exact stays exact under shifts
  long long s = static_cast<long long>(a) + b;
  if (s >= kExactPrec) return kExactPrec;
  if (s <= -kExactPrec) return -kExactPrec;
  return static_cast<int>(s);
}

// Iterated Laurent tower over F_q or F_q(x): K = base((v_1))...((v_n)) with
// v_1 the innermost variable.  Valuation chain level k collapses the k
// outermost variables.  Immutable and cheap to copy.
class Tower {
 public:
  Tower(int ell, u64 q, bool rational_base, std::string base_var,
        std::vector<std::string> laurent_vars)
      : ell_(ell),
        rational_(rational_base),
        base_var_(std::move(base_var)),
        lvars_(std::move(laurent_vars)) {
    if (ell < 3 || ell % 2 == 0 || !Fq::is_prime(static_cast<u64>(ell)) ||
        ell > 13)
      fail(Errc::UnsupportedEll, "ell must be an odd prime <= 13");
    k_ = std::make_shared<Fq>(Fq::from_q(q));
    if ((q - 1) % (2 * static_cast<u64>(ell)) != 0)
      fail(Errc::BadModulus, "q = 1 mod 2*ell required");
    ring_ = std::make_shared<PolyRing>(*k_);
    omega_ = k_->pow(k_->generator(), (q - 1) / static_cast<u64>(ell));
    // Distinct, nonempty variable names.
    std::vector<std::string> names = lvars_;
    if (rational_) names.push_back(base_var_);
    for (size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty()) fail(Errc::SpecParse, "empty variable name");
      for (size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j])
          fail(Errc::SpecParse, "duplicate variable name");
    }
  }

  int ell() const { return ell_; }
  const Fq& base_field() const { return *k_; }
  const PolyRing& ring() const { return *ring_; }
  bool base_rational() const { return rational_; }
  const std::string& base_var() const { return base_var_; }
  const std::vector<std::string>& laurent_vars() const { return lvars_; }
  int layers() const { return static_cast<int>(lvars_.size()); }
  u64 omega() const { return omega_; }

  // Variable name for Laurent level (1 = innermost).
  const std::string& var_name(int level) const {
    return lvars_.at(level - 1);
  }

  Context seed_context() const {
    Context c;
    c.ell = ell_;
    c.add(BasisIndex::unit());
    for (int lv = 1; lv <= layers(); ++lv)
      c.add(BasisIndex::var(lv, var_name(lv)));
    return c;
  }

  // --- element constructors ---

  // Zero at a Laurent layer is the empty exact series.
  Elem zero(int depth = -1) const {
    if (depth < 0) depth = layers();
    if (depth == 0) return base_zero();
    return Elem::make_series(SeriesData{});
  }

  Elem scalar_elem(long long v, int depth = -1) const {
    if (depth < 0) depth = layers();
    Elem e;
    if (rational_) {
      Poly n = Poly::constant(k_->from_int(v));
      e = Elem::make_rational({n, Poly::constant(1)});
    } else {
      e = Elem::make_scalar(k_->from_int(v));
    }
    return lift(std::move(e), depth);
  }
  Elem one(int depth = -1) const { return scalar_elem(1, depth); }

  Elem rational_elem(Poly num, Poly den, int depth = -1) const {
    if (!rational_) fail(Errc::SpecParse, "base field has no variable");
    if (depth < 0) depth = layers();
    return lift(Elem::make_rational(reduce_rat(std::move(num), std::move(den))),
                depth);
  }

  // Monomial var(level)^exp as a full-depth element.
  Elem var_elem(int level, int exp = 1, int depth = -1) const {
    if (depth < 0) depth = layers();
    if (level < 1 || level > layers()) fail(Errc::NotInChain, "no such layer");
    Elem e = one(level - 1);
    SeriesData s;
    s.terms.emplace_back(exp, std::move(e));
    Elem cur = Elem::make_series(std::move(s));
    for (int d = level + 1; d <= depth; ++d) {
      SeriesData w;
      w.terms.emplace_back(0, std::move(cur));
      cur = Elem::make_series(std::move(w));
    }
    return cur;
  }

  // Wraps an element of the depth-d subtower as a constant at higher layers.
  Elem lift(Elem e, int to_depth) const {
    int d = elem_depth(e);
    for (; d < to_depth; ++d) {
      SeriesData s;
      s.terms.emplace_back(0, std::move(e));
      e = Elem::make_series(std::move(s));
    }
    return e;
  }

  int elem_depth(const Elem& e) const {
    if (e.kind != Elem::Kind::Series) return 0;
    // Depth of a series with no visible terms cannot be probed further; the
    // element is assumed well-formed at its nominal depth by construction.
    int d = 1;
    const SeriesData* s = e.ser.get();
    while (!s->terms.empty() &&
           s->terms.front().second.kind == Elem::Kind::Series) {
      s = s->terms.front().second.ser.get();
      ++d;
    }
    return s->terms.empty() ? d : d;
  }

  // --- predicates ---

  // True iff the element is literally zero (exact at every layer).
  bool exact_zero(const Elem& e) const {
    switch (e.kind) {
      case Elem::Kind::Scalar: return e.scalar == 0;
      case Elem::Kind::Rational: return e.rat->num.is_zero();
      case Elem::Kind::Series: return e.ser->exact && e.ser->terms.empty();
    }
    return false;
  }

  // True iff nonzero is certain despite possible truncation.
  bool definitely_nonzero(const Elem& e) const {
    switch (e.kind) {
      case Elem::Kind::Scalar: return e.scalar != 0;
      case Elem::Kind::Rational: return !e.rat->num.is_zero();
      case Elem::Kind::Series:
        for (const auto& [exp, coeff] : e.ser->terms)
          if (definitely_nonzero(coeff)) return true;
        return false;
    }
    return false;
  }

  // --- arithmetic (all exact-aware) ---

  Elem add(const Elem& a, const Elem& b) const {
    require_same_kind(a, b);
    switch (a.kind) {
      case Elem::Kind::Scalar:
        return Elem::make_scalar(k_->add(a.scalar, b.scalar));
      case Elem::Kind::Rational: {
        const PolyRing& R = *ring_;
        Poly n = R.add(R.mul(a.rat->num, b.rat->den),
                       R.mul(b.rat->num, a.rat->den));
        Poly d = R.mul(a.rat->den, b.rat->den);
        return Elem::make_rational(reduce_rat(std::move(n), std::move(d)));
      }
      case Elem::Kind::Series: {
        SeriesData out;
        out.exact = a.ser->exact && b.ser->exact;
        out.prec = std::min(a.ser->exact ? kExactPrec : a.ser->prec,
                            b.ser->exact ? kExactPrec : b.ser->prec);
        size_t i = 0, j = 0;
        const auto& ta = a.ser->terms;
        const auto& tb = b.ser->terms;
        while (i < ta.size() || j < tb.size()) {
          int ea = i < ta.size() ? ta[i].first : kExactPrec;
          int eb = j < tb.size() ? tb[j].first : kExactPrec;
          int e = std::min(ea, eb);
          Elem coeff;
          if (ea == e && eb == e) {
            coeff = add(ta[i].second, tb[j].second);
            ++i, ++j;
          } else if (ea == e) {
            coeff = ta[i].second;
            ++i;
          } else {
            coeff = tb[j].second;
            ++j;
          }
          if (!exact_zero(coeff) && (out.exact || e < out.prec))
            out.terms.emplace_back(e, std::move(coeff));
        }
        return Elem::make_series(std::move(out));
      }
    }
    fail(Errc::SpecParse, "unreachable");
  }

  Elem neg(const Elem& a) const {
    switch (a.kind) {
      case Elem::Kind::Scalar: return Elem::make_scalar(k_->neg(a.scalar));
      case Elem::Kind::Rational:
        return Elem::make_rational({ring_->neg(a.rat->num), a.rat->den});
      case Elem::Kind::Series: {
        SeriesData out = *a.ser;
        for (auto& [e, c] : out.terms) c = neg(c);
        return Elem::make_series(std::move(out));
      }
    }
    fail(Errc::SpecParse, "unreachable");
  }

  Elem sub(const Elem& a, const Elem& b) const { return add(a, neg(b)); }

  Elem mul(const Elem& a, const Elem& b) const {
    require_same_kind(a, b);
    switch (a.kind) {
      case Elem::Kind::Scalar:
        return Elem::make_scalar(k_->mul(a.scalar, b.scalar));
      case Elem::Kind::Rational:
        return Elem::make_rational(reduce_rat(
            ring_->mul(a.rat->num, b.rat->num),
            ring_->mul(a.rat->den, b.rat->den)));
      case Elem::Kind::Series: {
        if (exact_zero(a) || exact_zero(b)) {
          SeriesData z;
          return Elem::make_series(std::move(z));
        }
        int pa = a.ser->exact ? kExactPrec : a.ser->prec;
        int pb = b.ser->exact ? kExactPrec : b.ser->prec;
        int va = a.ser->terms.empty() ? pa : a.ser->terms.front().first;
        int vb = b.ser->terms.empty() ? pb : b.ser->terms.front().first;
        SeriesData out;
        out.prec = std::min(prec_add(pa, vb), prec_add(pb, va));
        out.exact = out.prec >= kExactPrec;
        std::map<int, Elem> acc;
        for (const auto& [ea, ca] : a.ser->terms)
          for (const auto& [eb, cb] : b.ser->terms) {
            int e = ea + eb;
            if (!out.exact && e >= out.prec) continue;
            Elem prod = mul(ca, cb);
            auto it = acc.find(e);
            if (it == acc.end())
              acc.emplace(e, std::move(prod));
            else
              it->second = add(it->second, prod);
          }
        for (auto& [e, c] : acc)
          if (!exact_zero(c)) out.terms.emplace_back(e, std::move(c));
        return Elem::make_series(std::move(out));
      }
    }
    fail(Errc::SpecParse, "unreachable");
  }

  // Exact division.  At Laurent layers the divisor must be a single-term
  // exact series (an inverse of a general series is not a finite sum).
  Elem div(const Elem& a, const Elem& b) const {
    require_same_kind(a, b);
    switch (a.kind) {
      case Elem::Kind::Scalar:
        return Elem::make_scalar(k_->mul(a.scalar, k_->inv(b.scalar)));
      case Elem::Kind::Rational:
        if (b.rat->num.is_zero()) fail(Errc::ZeroElement, "division by zero");
        return Elem::make_rational(reduce_rat(
            ring_->mul(a.rat->num, b.rat->den),
            ring_->mul(a.rat->den, b.rat->num)));
      case Elem::Kind::Series: {
        if (!b.ser->exact || b.ser->terms.size() != 1)
          fail(Errc::PrecisionLoss,
               "division requires a single-term exact divisor");
        auto& [eb, cb] = b.ser->terms.front();
        SeriesData out;
        out.exact = a.ser->exact;
        out.prec = prec_add(a.ser->exact ? kExactPrec : a.ser->prec, -eb);
        for (const auto& [ea, ca] : a.ser->terms)
          out.terms.emplace_back(ea - eb, div(ca, cb));
        return Elem::make_series(std::move(out));
      }
    }
    fail(Errc::SpecParse, "unreachable");
  }

  Elem pow(const Elem& a, long long n) const {
    if (n < 0) return pow(div(one(elem_depth_full(a)), a), -n);
    Elem r = one(elem_depth_full(a));
    Elem base = a;
    unsigned long long m = static_cast<unsigned long long>(n);
    while (m) {
      if (m & 1) r = mul(r, base);
      base = mul(base, base);
      m >>= 1;
    }
    return r;
  }

  // Marks everything at or above exponent `prec` of the outermost layer
  // unknown.  Used to build deliberately truncated representatives.
  Elem truncate(const Elem& a, int prec) const {
    if (a.kind != Elem::Kind::Series)
      fail(Errc::PrecisionLoss, "truncate needs a series layer");
    SeriesData out;
    out.exact = false;
    out.prec = a.ser->exact ? prec : std::min(prec, a.ser->prec);
    for (const auto& [e, c] : a.ser->terms)
      if (e < out.prec) out.terms.emplace_back(e, c);
    return Elem::make_series(std::move(out));
  }

  // --- parsing and printing ---

  Elem parse_elem(const std::string& text) const {
    ElemParser p{this, text, 0};
    Elem e = p.parse_expr();
    p.skip();
    if (p.pos != text.size()) fail(Errc::SpecParse, "trailing input");
    return e;
  }

  std::string to_string(const Elem& e, int depth = -1) const {
    if (depth < 0) depth = e.kind == Elem::Kind::Series ? layers() : 0;
    switch (e.kind) {
      case Elem::Kind::Scalar:
        return std::to_string(e.scalar);
      case Elem::Kind::Rational: {
        if (e.rat->den == Poly::constant(1) && e.rat->num.deg() <= 0)
          return std::to_string(e.rat->num.coeff(0));
        std::string n = ring_->to_string(e.rat->num, base_var_);
        if (e.rat->den == Poly::constant(1)) return n;
        return "(" + n + ")/(" + ring_->to_string(e.rat->den, base_var_) + ")";
      }
      case Elem::Kind::Series: {
        const std::string& v = var_name(depth);
        if (e.ser->terms.empty()) return e.ser->exact ? "0" : "O(...)";
        std::string s;
        for (const auto& [exp, c] : e.ser->terms) {
          if (!s.empty()) s += " + ";
          std::string cs = to_string(c, depth - 1);
          bool simple = cs.find_first_of("+-/ ") == std::string::npos;
          if (!simple) cs = "(" + cs + ")";
          if (exp == 0) {
            s += cs;
          } else {
            if (cs != "1") s += cs + "*";
            s += v;
            if (exp != 1) s += "^" + std::to_string(exp);
          }
        }
        if (!e.ser->exact)
          s += " + O(" + v + "^" + std::to_string(e.ser->prec) + ")";
        return s;
      }
    }
    return "?";
  }

  RatFun reduce_rat(Poly num, Poly den) const {
    const PolyRing& R = *ring_;
    if (den.is_zero()) fail(Errc::ZeroElement, "zero denominator");
    if (num.is_zero()) return {Poly::zero(), Poly::constant(1)};
    Poly g = R.gcd(num, den);
    if (g.deg() > 0 || g.lead() != 1) {
      num = R.div(num, g);
      den = R.div(den, g);
    }
    u64 li = k_->inv(den.lead());
    return {R.scale(num, li), R.scale(den, li)};
  }

 private:
  // Nominal depth: series nesting count expected from the tower shape.
  int elem_depth_full(const Elem& e) const {
    return e.kind == Elem::Kind::Series ? layers() : 0;
  }

  Elem base_zero() const {
    return rational_
               ? Elem::make_rational({Poly::zero(), Poly::constant(1)})
               : Elem::make_scalar(0);
  }

  void require_same_kind(const Elem& a, const Elem& b) const {
    if (a.kind != b.kind)
      fail(Errc::ContextMismatch, "element layer mismatch");
  }

  struct ElemParser {
    const Tower* t;
    const std::string& s;
    size_t pos;

    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Elem parse_expr() {
      skip();
      bool negate = false;
      while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        if (s[pos] == '-') negate = !negate;
        ++pos;
        skip();
      }
      Elem acc = parse_term();
      if (negate) acc = t->neg(acc);
      while (true) {
        skip();
        if (pos >= s.size() || (s[pos] != '+' && s[pos] != '-')) break;
        bool minus = s[pos] == '-';
        ++pos;
        Elem rhs = parse_term();
        acc = minus ? t->sub(acc, rhs) : t->add(acc, rhs);
      }
      return acc;
    }

    Elem parse_term() {
      Elem acc = parse_factor();
      while (true) {
        skip();
        if (pos < s.size() && s[pos] == '*') {
          ++pos;
          acc = t->mul(acc, parse_factor());
        } else if (pos < s.size() && s[pos] == '/') {
          ++pos;
          acc = t->div(acc, parse_factor());
        } else if (pos < s.size() &&
                   (std::isalpha(static_cast<unsigned char>(s[pos])) ||
                    s[pos] == '(')) {
          // implicit multiplication: 3x, 2(x+1)
          acc = t->mul(acc, parse_factor());
        } else {
          break;
        }
      }
      return acc;
    }

    Elem parse_factor() {
      Elem base = parse_atom();
      skip();
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        skip();
        bool paren = eat('(');
        bool negv = false;
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
          if (s[pos] == '-') negv = !negv;
          ++pos;
          skip();
        }
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
          fail(Errc::SpecParse, "bad exponent");
        long long v = 0;
        while (pos < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[pos]))) {
          v = v * 10 + (s[pos] - '0');
          if (v > 1000000) fail(Errc::SpecParse, "exponent too large");
          ++pos;
        }
        if (paren && !eat(')')) fail(Errc::SpecParse, "missing )");
        base = t->pow(base, negv ? -v : v);
      }
      return base;
    }

    Elem parse_atom() {
      skip();
      if (pos >= s.size()) fail(Errc::SpecParse, "unexpected end of element");
      if (s[pos] == '(') {
        ++pos;
        Elem e = parse_expr();
        if (!eat(')')) fail(Errc::SpecParse, "missing )");
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
        long long v = 0;
        while (pos < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[pos]))) {
          v = v * 10 + (s[pos] - '0');
          v %= static_cast<long long>(t->base_field().p());
          ++pos;
        }
        return t->scalar_elem(v);
      }
      if (std::isalpha(static_cast<unsigned char>(s[pos]))) {
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                s[pos] == '_'))
          ++pos;
        std::string name = s.substr(start, pos - start);
        if (t->base_rational() && name == t->base_var())
          return t->rational_elem(Poly::var(), Poly::constant(1));
        for (int lv = 1; lv <= t->layers(); ++lv)
          if (name == t->var_name(lv)) return t->var_elem(lv);
        fail(Errc::SpecParse, "unknown variable " + name);
      }
      fail(Errc::SpecParse, "unexpected character in element");
    }
  };

  int ell_;
  bool rational_;
  std::string base_var_;
  std::vector<std::string> lvars_;
  std::shared_ptr<Fq> k_;
  std::shared_ptr<PolyRing> ring_;
  u64 omega_ = 1;
};

}  // namespace valdetect
