#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "splitsim/rational.hpp"

namespace splitsim {

// Mass value of the form a + b*h, exact in both coefficients. The update
// rule is linear with constant coefficients, so the set of masses reachable
// from an affine-in-h initial configuration stays affine in h; this is what
// lets one run certify a whole interval of backgrounds.
struct AffineMass {
  Rational a;  // constant term
  Rational b;  // coefficient of h

  AffineMass() = default;
  AffineMass(Rational a_, Rational b_) : a(std::move(a_)), b(std::move(b_)) {}
  static AffineMass constant(Rational v) { return {std::move(v), Rational(0)}; }
  static AffineMass background_unit() { return {Rational(0), Rational(1)}; }
  static AffineMass zero() { return {}; }

  Rational eval(const Rational& h) const { return a + b * h; }

  bool is_zero() const { return a.is_zero() && b.is_zero(); }

  AffineMass operator+(const AffineMass& o) const { return {a + o.a, b + o.b}; }
  AffineMass operator-(const AffineMass& o) const { return {a - o.a, b - o.b}; }
  AffineMass& operator+=(const AffineMass& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  AffineMass operator*(const Rational& s) const { return {a * s, b * s}; }
  bool operator==(const AffineMass& o) const { return a == o.a && b == o.b; }
  bool operator!=(const AffineMass& o) const { return !(*this == o); }

  // Share sent to each neighbor when this mass splits in dimension d.
  AffineMass split_share(int d) const {
    Rational inv(1, 2LL * d);
    return {a * inv, b * inv};
  }

  // Canonical text form "a_num/a_den + b_num/b_den*h".
  std::string str() const {
    std::string bs = b.str();
    if (bs[0] == '-') return a.str() + " - " + bs.substr(1) + "*h";
    return a.str() + " + " + bs + "*h";
  }

  // Accepts the canonical form plus shorthands: "3", "3/4", "h", "2*h",
  // "3 - 1/2*h". Whitespace around '+'/'-' is optional.
  static AffineMass parse(std::string_view s);
};

inline AffineMass operator*(const Rational& s, const AffineMass& m) {
  return m * s;
}

inline AffineMass AffineMass::parse(std::string_view s) {
  auto fail = [&] {
    throw std::invalid_argument("bad affine mass: '" + std::string(s) + "'");
  };
  std::string t;
  t.reserve(s.size());
  for (char c : s)
    if (c != ' ' && c != '\t') t.push_back(c);
  if (t.empty()) fail();
  // Split into at most two signed terms.
  AffineMass out;
  size_t pos = 0;
  int n_terms = 0;
  while (pos < t.size()) {
    if (++n_terms > 2) fail();
    int sign = 1;
    if (t[pos] == '+' || t[pos] == '-') {
      sign = t[pos] == '-' ? -1 : 1;
      ++pos;
    }
    size_t end = pos;
    while (end < t.size() && t[end] != '+' && t[end] != '-') ++end;
    std::string_view term(t.data() + pos, end - pos);
    if (term.empty()) fail();
    bool has_h = term.back() == 'h';
    Rational coef(1);
    if (has_h) {
      term.remove_suffix(1);
      if (!term.empty() && term.back() == '*') term.remove_suffix(1);
      if (!term.empty()) coef = Rational::parse(term);
    } else {
      coef = Rational::parse(term);
    }
    if (sign < 0) coef = -coef;
    if (has_h)
      out.b += coef;
    else
      out.a += coef;
    pos = end;
  }
  return out;
}

// Interval of background values. Non-degenerate intervals are half-open
// [lo, hi); lo == hi denotes the single point {lo}.
struct HInterval {
  Rational lo;
  Rational hi;

  static HInterval point(Rational h) { return {h, h}; }
  static HInterval half_open(Rational lo, Rational hi) {
    if (!(lo < hi)) throw std::invalid_argument("empty background interval");
    return {std::move(lo), std::move(hi)};
  }

  bool is_point() const { return lo == hi; }
  bool contains(const Rational& h) const {
    return is_point() ? h == lo : (lo <= h && h < hi);
  }
  std::string str() const {
    if (is_point()) return lo.str();
    return "[" + lo.str() + "," + hi.str() + ")";
  }
};

enum class DecisionKind { AlwaysTrue, AlwaysFalse, Mixed };

// Uniform verdict of an affine predicate over an HInterval. Mixed carries
// the h-value where the truth value changes, so callers can bisect there;
// this layer never bisects on its own.
struct IntervalDecision {
  DecisionKind kind = DecisionKind::AlwaysFalse;
  std::optional<Rational> crossing;

  static IntervalDecision always(bool v) {
    return {v ? DecisionKind::AlwaysTrue : DecisionKind::AlwaysFalse, {}};
  }
  static IntervalDecision mixed(Rational c) {
    return {DecisionKind::Mixed, std::move(c)};
  }
  bool always_true() const { return kind == DecisionKind::AlwaysTrue; }
  bool always_false() const { return kind == DecisionKind::AlwaysFalse; }
  bool is_mixed() const { return kind == DecisionKind::Mixed; }
};

struct DegenerateInterval : std::runtime_error {
  explicit DegenerateInterval(const std::string& what)
      : std::runtime_error(what) {}
};

// Subset of the h-line on which some affine condition holds: a (possibly
// unbounded, possibly degenerate) interval with individually open or closed
// finite endpoints. Used both for membership decisions and for reporting
// exact validity ranges of rule arithmetic.
struct RationalInterval {
  struct Bound {
    Rational value;
    bool strict = false;
  };
  std::optional<Bound> lo;  // nullopt: unbounded below
  std::optional<Bound> hi;  // nullopt: unbounded above
  bool empty = false;

  static RationalInterval all() { return {}; }
  static RationalInterval none() {
    RationalInterval r;
    r.empty = true;
    return r;
  }
  static RationalInterval at_least(Rational v, bool strict = false) {
    RationalInterval r;
    r.lo = Bound{std::move(v), strict};
    return r;
  }
  static RationalInterval at_most(Rational v, bool strict = false) {
    RationalInterval r;
    r.hi = Bound{std::move(v), strict};
    return r;
  }
  static RationalInterval single(Rational v) {
    RationalInterval r;
    r.lo = Bound{v, false};
    r.hi = Bound{std::move(v), false};
    return r;
  }

  bool contains(const Rational& h) const {
    if (empty) return false;
    if (lo && (h < lo->value || (lo->strict && h == lo->value))) return false;
    if (hi && (h > hi->value || (hi->strict && h == hi->value))) return false;
    return true;
  }

  RationalInterval intersect(const RationalInterval& o) const {
    if (empty || o.empty) return none();
    RationalInterval r;
    r.lo = lo;
    if (o.lo && (!r.lo || o.lo->value > r.lo->value ||
                 (o.lo->value == r.lo->value && o.lo->strict)))
      r.lo = o.lo;
    r.hi = hi;
    if (o.hi && (!r.hi || o.hi->value < r.hi->value ||
                 (o.hi->value == r.hi->value && o.hi->strict)))
      r.hi = o.hi;
    if (r.lo && r.hi) {
      if (r.lo->value > r.hi->value ||
          (r.lo->value == r.hi->value && (r.lo->strict || r.hi->strict)))
        return none();
    }
    return r;
  }

  bool operator==(const RationalInterval& o) const {
    if (empty != o.empty) return false;
    if (empty) return true;
    auto beq = [](const std::optional<Bound>& x, const std::optional<Bound>& y) {
      if (x.has_value() != y.has_value()) return false;
      return !x || (x->value == y->value && x->strict == y->strict);
    };
    return beq(lo, o.lo) && beq(hi, o.hi);
  }

  std::string str() const {
    if (empty) return "(empty)";
    auto pretty = [](const Rational& r) {
      return r.is_integer() ? r.num().str() : r.str();
    };
    std::string s = lo ? (lo->strict ? "(" : "[") + pretty(lo->value) : "(-inf";
    s += ", ";
    s += hi ? pretty(hi->value) + (hi->strict ? ")" : "]") : "+inf)";
    return s;
  }
};

// Solution set of a + b*h >= 0 (or > 0 with `strict`).
inline RationalInterval affine_nonneg_set(const Rational& a, const Rational& b,
                                          bool strict = false) {
  if (b.is_zero()) {
    bool ok = strict ? a > Rational(0) : a >= Rational(0);
    return ok ? RationalInterval::all() : RationalInterval::none();
  }
  Rational root = -a / b;
  if (b > Rational(0)) return RationalInterval::at_least(root, strict);
  return RationalInterval::at_most(root, strict);
}

namespace detail {

// Classifies interval I against the truth set J of an affine condition and
// produces the uniform decision. The crossing reported for Mixed is the
// smallest finite boundary of J lying strictly inside I.
inline IntervalDecision decide_against_set(const HInterval& I,
                                           const RationalInterval& J) {
  if (I.is_point())
    return IntervalDecision::always(J.contains(I.lo));
  // Half-open [lo, hi): truth at lo, plus "truth near hi from the left",
  // which for an interval J reduces to endpoint tests.
  // Truth set J is an interval, so containment of [lo, hi) reduces to the
  // left endpoint being in J and hi not exceeding J's upper bound (hi itself
  // is excluded, which makes the test the same for open and closed bounds).
  bool true_everywhere = !J.empty && J.contains(I.lo);
  if (true_everywhere && J.hi && I.hi > J.hi->value) true_everywhere = false;
  if (true_everywhere) return IntervalDecision::always(true);

  // False everywhere iff I and J do not overlap on [lo, hi).
  bool disjoint = J.empty;
  if (!disjoint && J.hi) {
    if (J.hi->value < I.lo || (J.hi->strict && J.hi->value == I.lo))
      disjoint = true;
  }
  if (!disjoint && J.lo) {
    if (J.lo->value >= I.hi) disjoint = true;
  }
  if (disjoint) return IntervalDecision::always(false);

  // Mixed: find a boundary of J strictly inside (lo, hi).
  std::optional<Rational> cross;
  auto consider = [&](const Rational& v) {
    if (v > I.lo && v < I.hi && (!cross || v < *cross)) cross = v;
  };
  if (J.lo) consider(J.lo->value);
  if (J.hi) consider(J.hi->value);
  if (!cross) {
    // The only remaining change point is at I.lo itself (e.g. truth holds
    // exactly at the left endpoint). Report it; callers treat a crossing at
    // the left endpoint as non-bisectable.
    cross = I.lo;
  }
  return IntervalDecision::mixed(*cross);
}

}  // namespace detail

// Uniform instability test: is a + b*h >= 1 for all h in I, for none, or
// does the answer flip at a crossing inside I?
inline IntervalDecision decide_ge_one_over_interval(const AffineMass& x,
                                                    const HInterval& I) {
  RationalInterval truth = affine_nonneg_set(x.a - Rational(1), x.b);
  return detail::decide_against_set(I, truth);
}

// Uniform membership of x(h) in the half-open mass window [lo(h), hi(h)).
// Throws DegenerateInterval if the window is inverted somewhere on I.
inline IntervalDecision affine_in_halfopen_over_interval(const AffineMass& x,
                                                         const AffineMass& lo,
                                                         const AffineMass& hi,
                                                         const HInterval& I) {
  AffineMass width = hi - lo;
  if (width.eval(I.lo) < Rational(0) || width.eval(I.hi) < Rational(0))
    throw DegenerateInterval("mass window [" + lo.str() + ", " + hi.str() +
                             ") is inverted on h-range " + I.str());
  AffineMass f = x - lo;   // need >= 0
  AffineMass g = hi - x;   // need > 0
  RationalInterval truth = affine_nonneg_set(f.a, f.b)
                               .intersect(affine_nonneg_set(g.a, g.b, true));
  return detail::decide_against_set(I, truth);
}

// Uniform membership of x(h) in the closed singleton {v(h)}: exact equality
// of the two affine functions on I.
inline IntervalDecision affine_equals_over_interval(const AffineMass& x,
                                                    const AffineMass& v,
                                                    const HInterval& I) {
  AffineMass f = x - v;
  if (I.is_point())
    return IntervalDecision::always(f.eval(I.lo).is_zero());
  if (f.a.is_zero() && f.b.is_zero()) return IntervalDecision::always(true);
  if (f.b.is_zero()) return IntervalDecision::always(false);
  Rational root = -f.a / f.b;
  if (root > I.lo && root < I.hi) return IntervalDecision::mixed(root);
  return IntervalDecision::always(false);
}

}  // namespace splitsim
