#pragma once

#include <stdexcept>

#include "splitsim/rational.hpp"

namespace splitsim {

// Constants of the diagonal-front explosion argument. On the main diagonal,
// the mass forwarded to the next diagonal site after a full sweep through
// stages 2..d is q + p*h; h_star is where that forwarded mass first keeps
// the front alive, i.e. the root of q + p*h = 2d*(1-h). c_prime combines it
// with the rectangle threshold 1 - 1/d.
struct TheoryConstants {
  int d = 0;
  Rational p;
  Rational q;
  Rational h_star;
  Rational c_prime;
};

inline TheoryConstants theory_constants(int d) {
  if (d < 2) throw std::invalid_argument("theory_constants: need d >= 2");
  BigInt fact = 1;
  for (int l = 2; l <= d; ++l) fact *= l;  // d!
  BigInt two_d = 2 * d;
  BigInt pow_2d = 1;
  for (int l = 0; l < d; ++l) pow_2d *= two_d;  // (2d)^d
  // p = d!/(2d)^d * sum_{l=2..d} (2d)^l / l!
  Rational sum(0);
  BigInt lfact = 1;
  BigInt pw = two_d;
  for (int l = 2; l <= d; ++l) {
    pw *= two_d;  // (2d)^l
    lfact *= l;   // l!
    sum += Rational(pw, lfact);
  }
  TheoryConstants out;
  out.d = d;
  out.p = Rational(fact, pow_2d) * sum;
  out.q = Rational(fact * two_d, pow_2d);  // d!/(2d)^(d-1)
  // Solve q + p*h = 2d*(1-h) for h.
  Rational twod(2LL * d);
  out.h_star = (twod - out.q) / (out.p + twod);
  Rational rect = Rational(1) - Rational(1, d);
  out.c_prime = std::max(rect, out.h_star,
                         [](const Rational& x, const Rational& y) { return x < y; });
  return out;
}

}  // namespace splitsim
