#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace splitsim {

using BigInt = boost::multiprecision::mpz_int;

// Exact arbitrary-precision rational. Canonical form is maintained after
// every operation: denominator > 0 and gcd(|num|, den) == 1. No rounding
// anywhere; comparisons are exact cross multiplications.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT: implicit by design
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    normalize();
  }
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

  Rational operator-() const { return Rational(unchecked{}, -num_, den_); }

  Rational operator+(const Rational& o) const {
    if (den_ == o.den_) return Rational(num_ + o.num_, den_);
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    if (den_ == o.den_) return Rational(num_ - o.num_, den_);
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return num_ * o.den_ < o.num_ * den_;
  }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  // Largest integer <= value.
  BigInt floor() const {
    BigInt q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
  }

  double to_double() const {
    mpq_t q;
    mpq_init(q);
    mpq_set_num(q, num_.backend().data());
    mpq_set_den(q, den_.backend().data());
    double r = mpq_get_d(q);
    mpq_clear(q);
    return r;
  }

  // Canonical text form "num/den", e.g. "3/4", "-1/1".
  std::string str() const {
    return num_.str() + "/" + den_.str();
  }

  // Accepts "p", "p/q" and plain decimals like "-0.667".
  static Rational parse(std::string_view s);

 private:
  struct unchecked {};
  Rational(unchecked, BigInt n, BigInt d)
      : num_(std::move(n)), den_(std::move(d)) {}

  void normalize() {
    using boost::multiprecision::gcd;
    using boost::multiprecision::lsb;
    using boost::multiprecision::msb;
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    if (den_ == 1) return;
    // Splitting divides by powers of two (for d <= 2) far more often than by
    // anything else, so strip shared factors of two first; for a power-of-two
    // denominator that is the whole reduction. mpz_scan1 counts trailing
    // zeros and, unlike lsb(), is defined for negative values too.
    unsigned long dl = mpz_scan1(den_.backend().data(), 0);
    if (dl > 0) {
      unsigned long s = std::min(dl, mpz_scan1(num_.backend().data(), 0));
      if (s > 0) {
        num_ >>= s;
        den_ >>= s;
      }
    }
    if (den_ == 1) return;
    if (msb(den_) == lsb(den_)) return;  // power of two, already reduced
    BigInt g = gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

inline Rational Rational::parse(std::string_view s) {
  auto fail = [&] {
    throw std::invalid_argument("bad rational: '" + std::string(s) + "'");
  };
  if (s.empty()) fail();
  auto slash = s.find('/');
  try {
    if (slash != std::string_view::npos) {
      BigInt n(std::string(s.substr(0, slash)));
      BigInt d(std::string(s.substr(slash + 1)));
      return Rational(std::move(n), std::move(d));
    }
    auto dot = s.find('.');
    if (dot == std::string_view::npos) return Rational(BigInt(std::string(s)));
    std::string digits(s.substr(0, dot));
    std::string frac(s.substr(dot + 1));
    if (frac.empty()) fail();
    bool neg = !digits.empty() && digits[0] == '-';
    BigInt scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt n = BigInt(digits.empty() || digits == "-" || digits == "+"
                          ? std::string("0")
                          : digits);
    BigInt whole = n < 0 ? BigInt(-n) : n;
    BigInt num = whole * scale + BigInt(frac);
    if (neg) num = -num;
    return Rational(std::move(num), std::move(scale));
  } catch (const std::runtime_error&) {
    fail();
  }
  return Rational();  // unreachable
}

inline Rational abs(const Rational& r) { return r.abs(); }

}  // namespace splitsim
