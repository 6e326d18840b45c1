#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "valdetect/errors.hpp"

namespace valdetect {

// ---- exact rationals -------------------------------------------------------

// Exact rational on 64-bit numerator/denominator.  All arithmetic runs
// through 128-bit intermediates and refuses to round: a reduced value that
// does not fit is an error, never an approximation.
struct Rat {
  long long n = 0;
  long long d = 1;

  static long long checked(__int128 v) {
    if (v > __int128(9223372036854775807LL) ||
        v < -__int128(9223372036854775807LL))
      fail(Errc::PrecisionLoss, "rational arithmetic overflow");
    return static_cast<long long>(v);
  }
  static Rat make(__int128 num, __int128 den) {
    if (den == 0) fail(Errc::ZeroElement, "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 g = 1;
    {
      __int128 x = a, y = den;
      while (y) {
        __int128 r = x % y;
        x = y;
        y = r;
      }
      g = x ? x : 1;
    }
    Rat out;
    out.n = checked(num / g);
    out.d = checked(den / g);
    return out;
  }
  static Rat of(long long v) { return Rat{v, 1}; }

  bool is_zero() const { return n == 0; }
  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(__int128(a.n) * b.d + __int128(b.n) * a.d,
                __int128(a.d) * b.d);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(__int128(a.n) * b.d - __int128(b.n) * a.d,
                __int128(a.d) * b.d);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(__int128(a.n) * b.n, __int128(a.d) * b.d);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.is_zero()) fail(Errc::ZeroElement, "division by zero");
    return make(__int128(a.n) * b.d, __int128(a.d) * b.n);
  }
  friend Rat operator-(const Rat& a) { return Rat{-a.n, a.d}; }
  friend bool operator==(const Rat& a, const Rat& b) {
    return a.n == b.n && a.d == b.d;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

  std::string display() const {
    std::string s = std::to_string(n);
    if (d != 1) s += "/" + std::to_string(d);
    return s;
  }
};

// ---- projective plane ------------------------------------------------------

namespace detail {

inline std::array<Rat, 3> pp2_normalize(std::array<Rat, 3> h) {
  int lead = -1;
  for (int i = 0; i < 3; ++i)
    if (!h[static_cast<size_t>(i)].is_zero()) {
      lead = i;
      break;
    }
  if (lead < 0) fail(Errc::ZeroElement, "all homogeneous coordinates zero");
  Rat inv = h[static_cast<size_t>(lead)];
  for (auto& c : h) c = c / inv;
  return h;
}

inline std::array<Rat, 3> pp2_cross(const std::array<Rat, 3>& a,
                                    const std::array<Rat, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline std::string pp2_display(const std::array<Rat, 3>& h) {
  if (!h[0].is_zero())
    return "(" + h[1].display() + ", " + h[2].display() + ")";
  return "(" + h[1].display() + " : " + h[2].display() + ")";
}

}  // namespace detail

// A point of the projective plane over the rationals, coordinates
// (w : u : v) with the affine embedding (a, b) -> (1 : a : b).  Normalized
// so the first nonzero coordinate is 1, making equality componentwise.
struct PP2Point {
  std::array<Rat, 3> h;

  static PP2Point of(Rat w, Rat u, Rat v) {
    return PP2Point{detail::pp2_normalize({w, u, v})};
  }
  static PP2Point of(long long w, long long u, long long v) {
    return of(Rat::of(w), Rat::of(u), Rat::of(v));
  }
  static PP2Point affine(Rat a, Rat b) { return of(Rat::of(1), a, b); }
  bool at_infinity() const { return h[0].is_zero(); }
  // Affine or directional display: "(a, b)" when finite, "(u : v)" at
  // infinity.
  std::string display() const { return detail::pp2_display(h); }
  friend bool operator==(const PP2Point& a, const PP2Point& b) {
    return a.h == b.h;
  }
  friend bool operator!=(const PP2Point& a, const PP2Point& b) {
    return !(a == b);
  }
};

// A line, stored by its coefficient triple (same normalization); a point
// lies on a line when the dot product vanishes.
struct PP2Line {
  std::array<Rat, 3> h;

  static PP2Line of(Rat w, Rat u, Rat v) {
    return PP2Line{detail::pp2_normalize({w, u, v})};
  }
  static PP2Line of(long long w, long long u, long long v) {
    return of(Rat::of(w), Rat::of(u), Rat::of(v));
  }
  // Coefficient display, bracketed to tell lines from points.
  std::string display() const {
    return "[" + h[0].display() + " : " + h[1].display() + " : " +
           h[2].display() + "]";
  }
  friend bool operator==(const PP2Line& a, const PP2Line& b) {
    return a.h == b.h;
  }
  friend bool operator!=(const PP2Line& a, const PP2Line& b) {
    return !(a == b);
  }
};

inline bool on_line(const PP2Point& p, const PP2Line& l) {
  Rat acc = p.h[0] * l.h[0] + p.h[1] * l.h[1] + p.h[2] * l.h[2];
  return acc.is_zero();
}

inline PP2Line line_through(const PP2Point& p, const PP2Point& q) {
  std::array<Rat, 3> c = detail::pp2_cross(p.h, q.h);
  if (c[0].is_zero() && c[1].is_zero() && c[2].is_zero())
    fail(Errc::CoincidentPoints, "no unique line through equal points");
  return PP2Line{detail::pp2_normalize(c)};
}

inline PP2Point intersect_lines(const PP2Line& l1, const PP2Line& l2) {
  std::array<Rat, 3> c = detail::pp2_cross(l1.h, l2.h);
  if (c[0].is_zero() && c[1].is_zero() && c[2].is_zero())
    fail(Errc::CoincidentLines, "no unique intersection of equal lines");
  return PP2Point{detail::pp2_normalize(c)};
}

// ---- the replayed construction ---------------------------------------------
//
// The ambient objects are classes a + b*x + c*y indexed by integer triples
// (a, b, c), taken projectively (coprime, sign-normalized).  The replay
// starts from five pinned images and re-derives every later image as the
// intersection of two lines through already-established images; each
// derivation is checked against the closed form (b+c-a : b : c).

using Triple = std::array<long long, 3>;

inline Triple triple_canonical(Triple t) {
  long long g = std::gcd(std::gcd(std::llabs(t[0]), std::llabs(t[1])),
                         std::llabs(t[2]));
  if (g > 1)
    for (auto& v : t) v /= g;
  for (long long v : t) {
    if (v > 0) break;
    if (v < 0) {
      for (auto& w : t) w = -w;
      break;
    }
  }
  return t;
}

inline std::string triple_display(const Triple& t) {
  std::string s;
  const char* names[3] = {"", "x", "y"};
  for (int i = 0; i < 3; ++i) {
    long long v = t[static_cast<size_t>(i)];
    if (!v) continue;
    if (!s.empty()) s += v > 0 ? " + " : " - ";
    else if (v < 0) s += "-";
    long long a = std::llabs(v);
    if (a != 1 || i == 0) s += std::to_string(a);
    if (i > 0) {
      if (a != 1) s += "*";
      s += names[i];
    }
  }
  return s.empty() ? "0" : s;
}

// The closed form the replay verifies: (a, b, c) -> (b+c-a : b : c).
inline PP2Point psi_value(const Triple& t) {
  return PP2Point::of(t[1] + t[2] - t[0], t[1], t[2]);
}

struct StepRecord {
  int index = 0;
  std::string element;   // headline class of the step
  std::string value;     // its verified image
  std::uint64_t instances = 0;
  bool pass = true;
  std::string detail;    // first failure, empty when passing
};

struct ReplayReport {
  int range = 0;
  std::vector<StepRecord> steps;
  std::uint64_t established = 0;      // distinct classes with verified images
  std::uint64_t lattice_targets = 0;  // rational points within the range box
  std::uint64_t lattice_reached = 0;
  bool lattice_closed() const { return lattice_reached == lattice_targets; }
  bool all_pass() const {
    for (const StepRecord& s : steps)
      if (!s.pass) return false;
    return lattice_closed();
  }
};

namespace detail {

// One way of writing a target class as anchor +/- base, both established:
// geometrically, the target lies on the line between their images.
struct Decomp {
  Triple u;
  Triple v;
  int sign;  // target == u + sign*v, exactly, componentwise
};

struct ReplayState {
  std::map<Triple, PP2Point> table;

  bool has(const Triple& t) const {
    return table.count(triple_canonical(t)) != 0;
  }
  const PP2Point& at(const Triple& t) const {
    return table.at(triple_canonical(t));
  }
  void seed(const Triple& t, const PP2Point& p) {
    table.emplace(triple_canonical(t), p);
  }

  // Derive the target from two independent collinearity constraints and
  // check the closed form.  Returns an error message, empty on success.
  std::string establish(const Triple& t, const Decomp& c1, const Decomp& c2) {
    for (const Decomp* c : {&c1, &c2}) {
      for (int i = 0; i < 3; ++i)
        if (t[static_cast<size_t>(i)] !=
            c->u[static_cast<size_t>(i)] +
                c->sign * c->v[static_cast<size_t>(i)])
          return "decomposition of " + triple_display(t) + " is not exact";
      if (!has(c->u)) return triple_display(c->u) + " not established";
      if (!has(c->v)) return triple_display(c->v) + " not established";
    }
    PP2Line l1 = line_through(at(c1.u), at(c1.v));
    PP2Line l2 = line_through(at(c2.u), at(c2.v));
    if (l1 == l2)
      return "constraint lines for " + triple_display(t) + " coincide";
    PP2Point got = intersect_lines(l1, l2);
    PP2Point want = psi_value(t);
    if (got != want)
      return triple_display(t) + " resolved to " + got.display() +
             ", closed form " + want.display();
    table.emplace(triple_canonical(t), got);
    return "";
  }
};

inline Triple lattice_elem(long long a, long long b, long long c) {
  // The class whose image is the affine point (a/c, b/c).
  return {a + b - c, a, b};
}

// Shift rules available to the closure sweeps.  Each pins the target from
// one established neighbor and one of the five pinned anchor classes; the
// anchor's image direction makes the two candidate lines independent.
enum class Rule { HL, HR, VD, VU, DD, DU, AD, AU, RI, RO };

inline bool rule_decomp(Rule r, long long a, long long b, long long c,
                        long long cmax, Decomp* out) {
  const Triple one{1, 0, 0}, xin{1, 1, 0}, yin{1, 0, 1}, diag{2, 1, 1},
      anti{0, 1, -1};
  switch (r) {
    case Rule::HL: *out = {lattice_elem(a - 1, b, c), xin, +1}; return true;
    case Rule::HR: *out = {lattice_elem(a + 1, b, c), xin, -1}; return true;
    case Rule::VD: *out = {lattice_elem(a, b - 1, c), yin, +1}; return true;
    case Rule::VU: *out = {lattice_elem(a, b + 1, c), yin, -1}; return true;
    case Rule::DD: *out = {lattice_elem(a - 1, b - 1, c), diag, +1}; return true;
    case Rule::DU: *out = {lattice_elem(a + 1, b + 1, c), diag, -1}; return true;
    case Rule::AD: *out = {lattice_elem(a - 1, b + 1, c), anti, +1}; return true;
    case Rule::AU: *out = {lattice_elem(a + 1, b - 1, c), anti, -1}; return true;
    case Rule::RI:
      if (c <= 1) return false;
      *out = {lattice_elem(a, b, c - 1), one, -1};
      return true;
    case Rule::RO:
      if (c >= cmax) return false;
      *out = {lattice_elem(a, b, c + 1), one, +1};
      return true;
  }
  return false;
}

struct SweepScope {
  long long amin, amax, bmin, bmax, cmin, cmax;
  bool use_ray;
};

// Row-major fixpoint sweep: establish every class in the scope from already
// established neighbors.  Returns false (with detail) on a verification
// failure; unreached cells fail the coverage check afterwards.
inline bool closure_sweep(ReplayState& st, const SweepScope& sc,
                          StepRecord* rec) {
  std::vector<Rule> rules = {Rule::HL, Rule::HR, Rule::VD, Rule::VU,
                             Rule::DD, Rule::DU, Rule::AD, Rule::AU};
  if (sc.use_ray) {
    rules.push_back(Rule::RI);
    rules.push_back(Rule::RO);
  }
  bool failed = false;
  auto visit = [&](long long a, long long b, long long c) -> bool {
    Triple t = lattice_elem(a, b, c);
    if (st.has(t)) return false;
    std::vector<Decomp> avail;
    for (Rule r : rules) {
      Decomp d;
      if (!rule_decomp(r, a, b, c, sc.cmax, &d)) continue;
      if (st.has(d.u) && st.has(d.v)) avail.push_back(d);
    }
    for (size_t i = 0; i < avail.size(); ++i)
      for (size_t j = i + 1; j < avail.size(); ++j) {
        if (line_through(st.at(avail[i].u), st.at(avail[i].v)) ==
            line_through(st.at(avail[j].u), st.at(avail[j].v)))
          continue;
        std::string err = st.establish(t, avail[i], avail[j]);
        if (!err.empty()) {
          rec->pass = false;
          if (rec->detail.empty()) rec->detail = err;
          failed = true;
          return false;
        }
        ++rec->instances;
        return true;
      }
    return false;
  };
  bool grew = true;
  while (grew && !failed) {
    grew = false;
    // Two sweep directions per pass, so chains growing either way away
    // from the seeded cells close in a bounded number of passes.
    for (long long c = sc.cmin; c <= sc.cmax && !failed; ++c)
      for (long long b = sc.bmin; b <= sc.bmax && !failed; ++b)
        for (long long a = sc.amin; a <= sc.amax && !failed; ++a)
          grew = visit(a, b, c) || grew;
    for (long long c = sc.cmin; c <= sc.cmax && !failed; ++c)
      for (long long b = sc.bmax; b >= sc.bmin && !failed; --b)
        for (long long a = sc.amax; a >= sc.amin && !failed; --a)
          grew = visit(a, b, c) || grew;
  }
  if (failed) return false;
  // Coverage: the sweep must have reached the whole scope.
  for (long long c = sc.cmin; c <= sc.cmax; ++c)
    for (long long b = sc.bmin; b <= sc.bmax; ++b)
      for (long long a = sc.amin; a <= sc.amax; ++a)
        if (!st.has(lattice_elem(a, b, c))) {
          rec->pass = false;
          if (rec->detail.empty())
            rec->detail = "unreached class " +
                          triple_display(lattice_elem(a, b, c));
          return false;
        }
  return true;
}

inline void run_step(ReplayState& st, StepRecord* rec, const Triple& t,
                     const Decomp& c1, const Decomp& c2) {
  std::string err = st.establish(t, c1, c2);
  ++rec->instances;
  if (!err.empty()) {
    rec->pass = false;
    if (rec->detail.empty()) rec->detail = err;
  }
}

}  // namespace detail

// Replays the whole inductive construction out to the given range: every
// explicitly stated image, the parameterized ladders up to the range, and
// the lattice-closure sweeps, each value re-derived geometrically and
// checked against the closed form.
inline ReplayReport replay_claim(int range = 25) {
  if (range < 2 || range > 200)
    fail(Errc::TooLarge, "replay range must be between 2 and 200");
  using detail::Decomp;
  using detail::lattice_elem;
  const long long M = range;
  const long long B = M + 1;  // sweep box pads the range by one

  ReplayReport rep;
  rep.range = range;
  detail::ReplayState st;

  // Pinned images: the identity class, the two coordinate classes, and the
  // two one-unit classes sent to the coordinate directions at infinity.
  const Triple one{1, 0, 0}, ex{0, 1, 0}, ey{0, 0, 1}, xin{1, 1, 0},
      yin{1, 0, 1};
  for (const Triple& t : {one, ex, ey, xin, yin}) st.seed(t, psi_value(t));

  auto step = [&](int idx, const Triple& headline) -> StepRecord* {
    rep.steps.push_back(
        {idx, triple_display(headline), psi_value(headline).display(), 0,
         true, ""});
    return &rep.steps.back();
  };

  // 1: the first doubly-decomposable class.
  {
    StepRecord* r = step(1, {1, 1, 1});
    detail::run_step(st, r, {1, 1, 1}, {xin, ey, +1}, {yin, ex, +1});
  }
  // 2: its one-unit shift lands at infinity on the diagonal.
  {
    StepRecord* r = step(2, {2, 1, 1});
    detail::run_step(st, r, {2, 1, 1}, {one, {1, 1, 1}, +1}, {xin, yin, +1});
  }
  // 3: the antidiagonal direction.
  {
    StepRecord* r = step(3, {0, 1, -1});
    detail::run_step(st, r, {0, 1, -1}, {xin, yin, -1}, {ex, ey, -1});
  }
  // 4: first interior lattice point.
  {
    StepRecord* r = step(4, {2, 2, 1});
    detail::run_step(st, r, {2, 2, 1}, {ex, {2, 1, 1}, +1},
                     {xin, {1, 1, 1}, +1});
  }
  // 5: first doubled coordinate.
  {
    StepRecord* r = step(5, {1, 2, 0});
    detail::run_step(st, r, {1, 2, 0}, {{2, 2, 1}, yin, -1}, {ex, xin, +1});
  }
  // 6/7: the ladder up the first axis row.
  {
    StepRecord* r6 = step(6, {2, 2, 1});
    StepRecord* r7 = step(7, {1, 2, 0});
    for (long long m = 1; m <= M; ++m) {
      detail::run_step(st, r6, {m + 1, m + 1, 1},
                       {{2, 1, 1}, {m - 1, m, 0}, +1},
                       {{m, m, 1}, xin, +1});
      detail::run_step(st, r7, {m, m + 1, 0},
                       {{m + 1, m + 1, 1}, yin, -1},
                       {{m - 1, m, 0}, xin, +1});
    }
  }
  // 8: the mirrored ladder along the other axis.
  {
    StepRecord* r = step(8, {1, 0, 2});
    for (long long m = 1; m <= M; ++m) {
      detail::run_step(st, r, {m + 1, 1, m + 1},
                       {{2, 1, 1}, {m - 1, 0, m}, +1},
                       {{m, 1, m}, yin, +1});
      detail::run_step(st, r, {m, 0, m + 1},
                       {{m + 1, 1, m + 1}, xin, -1},
                       {{m - 1, 0, m}, yin, +1});
    }
  }
  // 9: second rows, then the whole first-quadrant integer lattice.
  {
    StepRecord* r = step(9, {3, 2, 2});
    for (long long m = 1; m <= M; ++m) {
      detail::run_step(st, r, {m + 2, m + 1, 2},
                       {{m, m, 1}, {2, 1, 1}, +1},
                       {{m + 1, m + 1, 1}, yin, +1});
      detail::run_step(st, r, {m + 2, 2, m + 1},
                       {{m, 1, m}, {2, 1, 1}, +1},
                       {{m + 1, 1, m + 1}, xin, +1});
    }
    detail::closure_sweep(st, {0, B, 0, B, 1, 1, false}, r);
  }
  // 10: the first negative-direction images.
  {
    StepRecord* r = step(10, {2, 1, 0});
    detail::run_step(st, r, {2, 1, 0}, {{2, 1, 1}, ey, -1}, {one, xin, +1});
    detail::run_step(st, r, {2, 0, 1}, {{2, 1, 1}, ex, -1}, {one, yin, +1});
  }
  // 11: the whole integer lattice.
  {
    StepRecord* r = step(11, {-1, 1, 1});
    detail::closure_sweep(st, {-B, B, -B, B, 1, 1, false}, r);
  }
  // 12: first halved images.
  {
    StepRecord* r = step(12, {0, 1, 1});
    detail::run_step(st, r, {0, 1, 1}, {{1, 1, 1}, one, -1}, {ex, ey, +1});
    detail::run_step(st, r, {-1, 1, 0}, {{0, 1, 1}, yin, -1}, {ex, one, -1});
    detail::run_step(st, r, {-1, 0, 1}, {{0, 1, 1}, xin, -1}, {ey, one, -1});
  }
  // 13: halved negative directions, then the half-integer layer.
  {
    StepRecord* r = step(13, {3, 1, 0});
    detail::run_step(st, r, {3, 1, 0}, {{2, 1, 0}, one, +1},
                     {{1, 0, -1}, {2, 1, 1}, +1});
    detail::run_step(st, r, {3, 0, 1}, {{2, 0, 1}, one, +1},
                     {{1, -1, 0}, {2, 1, 1}, +1});
    detail::closure_sweep(st, {-B, B, -B, B, 2, 2, true}, r);
  }
  // 14: first third-scale images.
  {
    StepRecord* r = step(14, {-1, 1, 1});
    detail::run_step(st, r, {-1, 1, 1}, {{-1, 1, 0}, ey, +1},
                     {{-1, 0, 1}, ex, +1});
    detail::run_step(st, r, {-2, 1, 0}, {{-1, 1, 1}, yin, -1},
                     {{-1, 1, 0}, one, -1});
    detail::run_step(st, r, {-2, 0, 1}, {{-1, 1, 1}, xin, -1},
                     {{-1, 0, 1}, one, -1});
  }
  // 15: the axis ladder of all reciprocal scales, then the positive
  // rational quadrant.
  {
    StepRecord* r = step(15, {-2, 1, 1});
    for (long long m = 1; m <= M; ++m) {
      detail::run_step(st, r, {-m, 1, 0},
                       {{-(m - 1), 1, 1}, yin, -1},
                       {{-(m - 1), 1, 0}, one, -1});
      detail::run_step(st, r, {-m, 0, 1},
                       {{-(m - 1), 1, 1}, xin, -1},
                       {{-(m - 1), 0, 1}, one, -1});
      detail::run_step(st, r, {-m, 1, 1}, {{-m, 0, 1}, ex, +1},
                       {{-m, 1, 0}, ey, +1});
    }
    detail::closure_sweep(st, {0, B, 0, B, 1, M, true}, r);
  }
  // 16: negative reciprocal scales, then every bounded rational point.
  {
    StepRecord* r = step(16, {3, 1, 0});
    for (long long m = 2; m <= M; ++m) {
      detail::run_step(st, r, {m + 1, 1, 0}, {{m, 1, 0}, one, +1},
                       {{m - 1, 0, -1}, {2, 1, 1}, +1});
      detail::run_step(st, r, {m + 1, 0, 1}, {{m, 0, 1}, one, +1},
                       {{m - 1, -1, 0}, {2, 1, 1}, +1});
    }
    detail::closure_sweep(st, {-B, B, -B, B, 1, M, true}, r);
  }
  // 17/18: rulings of the line at infinity through each one-unit class.
  {
    StepRecord* r17 = step(17, {2, 1, 1});
    StepRecord* r18 = step(18, {2, 1, 1});
    // Outward from 0 in both directions, each rung anchored on the last.
    for (long long k = 1; k <= B; ++k)
      for (long long n : {k, -k}) {
        Decomp a17 = n > 0 ? Decomp{{n, 1, n - 1}, yin, +1}
                           : Decomp{{n + 2, 1, n + 1}, yin, -1};
        detail::run_step(st, r17, {n + 1, 1, n}, a17, {{n, 1, n}, one, +1});
        Decomp a18 = n > 0 ? Decomp{{n, n - 1, 1}, xin, +1}
                           : Decomp{{n + 2, n + 1, 1}, xin, -1};
        detail::run_step(st, r18, {n + 1, n, 1}, a18, {{n, n, 1}, one, +1});
      }
  }
  // 19: every rational direction at infinity.
  {
    StepRecord* r = step(19, {5, 2, 3});
    for (long long m = -M; m <= M; ++m)
      for (long long n = -M; n <= M; ++n) {
        if (std::gcd(std::llabs(m), std::llabs(n)) != 1) continue;
        detail::run_step(st, r, {m + n, m, n},
                         {{n, 1, n - 1}, {m, m - 1, 1}, +1},
                         {{m + n - 1, m, n}, one, +1});
      }
  }

  rep.established = st.table.size();
  for (long long c = 1; c <= M; ++c)
    for (long long b = -M; b <= M; ++b)
      for (long long a = -M; a <= M; ++a) {
        if (std::gcd(std::gcd(std::llabs(a), std::llabs(b)), c) != 1)
          continue;
        ++rep.lattice_targets;
        if (st.has(lattice_elem(a, b, c))) ++rep.lattice_reached;
      }
  return rep;
}

}  // namespace valdetect
