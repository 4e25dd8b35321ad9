#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "splitsim/affine.hpp"

using namespace splitsim;

namespace {

Rational rq(long long n, long long d = 1) { return Rational(n, d); }

std::mt19937_64 rng(0x5eed00d1ull);

Rational random_rational(long long num_range = 1 << 20,
                         long long den_range = 1 << 12) {
  std::uniform_int_distribution<long long> num(-num_range, num_range);
  std::uniform_int_distribution<long long> den(1, den_range);
  return Rational(num(rng), den(rng));
}

// Random h strictly inside [lo, hi).
Rational random_inside(const HInterval& I) {
  std::uniform_int_distribution<long long> pick(0, 999);
  return I.lo + (I.hi - I.lo) * Rational(pick(rng), 1000);
}

}  // namespace

TEST_CASE("rational canonical form") {
  CHECK(rq(4, 8) == rq(1, 2));
  CHECK(rq(-4, 8) == rq(-1, 2));
  CHECK(Rational(BigInt(3), BigInt(-6)) == rq(-1, 2));
  CHECK(rq(0, 7).den() == 1);
  CHECK(rq(786, 65536) == rq(393, 32768));
  CHECK(rq(217160, 65536) == rq(27145, 8192));
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  CHECK(rq(3, 4).str() == "3/4");
  CHECK(rq(-3, 4).str() == "-3/4");
  CHECK(Rational::parse("3/4") == rq(3, 4));
  CHECK(Rational::parse("-12") == rq(-12));
  CHECK(Rational::parse("0.667") == rq(667, 1000));
  CHECK(Rational::parse("-0.25") == rq(-1, 4));
  CHECK_THROWS(Rational::parse("3/0"));
  CHECK_THROWS(Rational::parse("x"));
}

TEST_CASE("rational arithmetic and order") {
  CHECK(rq(1, 2) + rq(1, 3) == rq(5, 6));
  CHECK(rq(1, 2) - rq(2, 3) == rq(-1, 6));
  CHECK(rq(3, 7) * rq(7, 9) == rq(1, 3));
  CHECK(rq(3, 7) / rq(6, 7) == rq(1, 2));
  CHECK(rq(1, 3) < rq(1, 2));
  CHECK(rq(-1, 2) < rq(-1, 3));
  CHECK(rq(165, 32).floor() == 5);
  CHECK(rq(-7, 2).floor() == -4);
  CHECK(rq(1, 2).to_double() == 0.5);
  for (int i = 0; i < 200; ++i) {
    Rational a = random_rational(), b = random_rational();
    Rational s = a + b;
    CHECK(boost::multiprecision::gcd(
              s.num() < 0 ? BigInt(-s.num()) : s.num(), s.den()) == 1);
    CHECK(s - b == a);
    Rational p = a * b;
    if (!b.is_zero()) CHECK(p / b == a);
  }
}

TEST_CASE("affine mass arithmetic") {
  AffineMass x(rq(3, 4), rq(0));
  AffineMass bg = AffineMass::background_unit();
  CHECK((x + bg) == AffineMass(rq(3, 4), rq(1)));
  CHECK((AffineMass::zero() + x) == x);
  AffineMass f1(rq(111, 65536), rq(88388, 65536));
  AffineMass f2(rq(675, 65536), rq(128772, 65536));
  CHECK((f1 + f2) == AffineMass(rq(393, 32768), rq(27145, 8192)));

  CHECK(AffineMass(rq(4), rq(0)).split_share(1) == AffineMass(rq(2), rq(0)));
  CHECK(AffineMass::zero().split_share(3) == AffineMass::zero());
  CHECK(AffineMass(rq(3), rq(0)).split_share(2) == AffineMass(rq(3, 4), rq(0)));

  AffineMass origin8(rq(14592, 65536), rq(96512, 65536));
  CHECK(origin8.eval(rq(23, 32)) == rq(10495, 8192));
  CHECK(AffineMass(rq(5, 9), rq(0)).eval(rq(17)) == rq(5, 9));
  CHECK(bg.eval(rq(5, 7)) == rq(5, 7));
}

TEST_CASE("affine mass text form") {
  AffineMass m(rq(3, 4), rq(1, 4));
  CHECK(m.str() == "3/4 + 1/4*h");
  CHECK(AffineMass::parse("3/4 + 1/4*h") == m);
  CHECK(AffineMass::parse("3 + 0*h") == AffineMass(rq(3), rq(0)));
  CHECK(AffineMass::parse("3") == AffineMass(rq(3), rq(0)));
  CHECK(AffineMass::parse("h") == AffineMass::background_unit());
  CHECK(AffineMass::parse("5-5*h") == AffineMass(rq(5), rq(-5)));
  CHECK(AffineMass::parse("5 - 5*h").str() == "5/1 - 5/1*h");
  CHECK_THROWS(AffineMass::parse(""));
  CHECK_THROWS(AffineMass::parse("1 + 2*h + 3"));
}

TEST_CASE("instability decision over an interval") {
  auto I = HInterval::half_open(rq(3, 4), rq(1));
  CHECK(decide_ge_one_over_interval(AffineMass(rq(3, 4), rq(1, 4)), I)
            .always_false());
  CHECK(decide_ge_one_over_interval(AffineMass(rq(1), rq(0)), I).always_true());
  auto dec = decide_ge_one_over_interval(AffineMass(rq(1, 4), rq(1)),
                                         HInterval::half_open(rq(1, 2), rq(1)));
  REQUIRE(dec.is_mixed());
  CHECK(*dec.crossing == rq(3, 4));

  // Point intervals decide by direct evaluation.
  CHECK(decide_ge_one_over_interval(AffineMass(rq(1, 4), rq(1)),
                                    HInterval::point(rq(3, 4)))
            .always_true());
  CHECK(decide_ge_one_over_interval(AffineMass(rq(1, 4), rq(1)),
                                    HInterval::point(rq(23, 32)))
            .always_false());
}

TEST_CASE("instability decision agrees with pointwise evaluation") {
  for (int trial = 0; trial < 100; ++trial) {
    AffineMass x(random_rational(8, 4), random_rational(8, 4));
    auto I = HInterval::half_open(rq(-1), rq(1));
    IntervalDecision dec = decide_ge_one_over_interval(x, I);
    for (int s = 0; s < 20; ++s) {
      Rational h = random_inside(I);
      bool ge1 = x.eval(h) >= rq(1);
      if (dec.always_true()) CHECK(ge1);
      if (dec.always_false()) CHECK(!ge1);
      if (dec.is_mixed()) {
        // Samples on each side of the crossing must disagree with each other.
        bool below = x.eval(*dec.crossing - rq(1, 1000000)) >= rq(1);
        bool above = x.eval(*dec.crossing + rq(1, 1000000)) >= rq(1);
        CHECK(below != above);
      }
    }
  }
}

TEST_CASE("membership in half-open affine windows") {
  // Background mass h always sits in the singleton window {h}.
  CHECK(affine_equals_over_interval(AffineMass::background_unit(),
                                    AffineMass::background_unit(),
                                    HInterval::half_open(rq(0), rq(1)))
            .always_true());

  AffineMass lo(rq(1), rq(0));
  AffineMass hi(rq(4), rq(-4));
  CHECK(affine_in_halfopen_over_interval(
            AffineMass(rq(1), rq(0)), lo, hi,
            HInterval::half_open(rq(7, 10), rq(40, 57)))
            .always_true());
  CHECK(affine_in_halfopen_over_interval(
            AffineMass(rq(2), rq(0)), lo, hi,
            HInterval::half_open(rq(7, 10), rq(3, 4)))
            .always_false());
  // Inverted window: 4 - 4h < 1 for h > 3/4.
  CHECK_THROWS_AS(affine_in_halfopen_over_interval(
                      AffineMass(rq(1), rq(0)), lo, hi,
                      HInterval::half_open(rq(4, 5), rq(9, 10))),
                  DegenerateInterval);

  // Mixed membership: x = 2 lies in [4-4h, 16-20h) only for h >= 1/2.
  auto dec = affine_in_halfopen_over_interval(
      AffineMass(rq(2), rq(0)), AffineMass(rq(4), rq(-4)),
      AffineMass(rq(16), rq(-20)), HInterval::half_open(rq(1, 4), rq(7, 10)));
  REQUIRE(dec.is_mixed());
  CHECK(*dec.crossing == rq(1, 2));
}

TEST_CASE("eval distributes over addition, exactly") {
  for (int trial = 0; trial < 100; ++trial) {
    AffineMass x(random_rational(), random_rational());
    AffineMass y(random_rational(), random_rational());
    Rational h = random_rational();
    CHECK((x + y).eval(h) == x.eval(h) + y.eval(h));
  }
}

TEST_CASE("rational interval algebra") {
  auto a = RationalInterval::at_least(rq(1, 2));
  auto b = RationalInterval::at_most(rq(3, 4));
  auto c = a.intersect(b);
  CHECK(c.contains(rq(1, 2)));
  CHECK(c.contains(rq(3, 4)));
  CHECK(!c.contains(rq(4, 5)));
  CHECK(c.str() == "[1/2, 3/4]");
  CHECK(a.intersect(RationalInterval::at_most(rq(1, 4))).empty);
  auto strict = RationalInterval::at_most(rq(1), true);
  CHECK(!strict.contains(rq(1)));
  CHECK(strict.contains(rq(99, 100)));
}
