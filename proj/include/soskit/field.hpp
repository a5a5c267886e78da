#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sos {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& s);
std::string rational_str(const Rational& r);

// Double factorial (2m-1)!! = 1*3*5*...*(2m-1); m = 0 gives 1.
Integer odd_double_factorial(unsigned m);

// Element of Q[sqrt(3)]: a + b*sqrt(3), both rationals in canonical form.
// Sign and comparisons are exact (compare a^2 against 3 b^2).
class FieldElem {
 public:
  FieldElem() : a_(0), b_(0) {}
  FieldElem(const Rational& a) : a_(a), b_(0) {}  // NOLINT(google-explicit-constructor)
  FieldElem(long v) : a_(v), b_(0) {}             // NOLINT(google-explicit-constructor)
  FieldElem(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

  static FieldElem sqrt3() { return FieldElem(Rational(0), Rational(1)); }
  // sqrt(3)^k for k >= 0: rational 3^(k/2) when k even, else 3^((k-1)/2)*sqrt3.
  static FieldElem sqrt3_pow(unsigned k);
  // (1/sqrt(3))^k.
  static FieldElem inv_sqrt3_pow(unsigned k);

  const Rational& rat_part() const { return a_; }
  const Rational& rt3_part() const { return b_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }
  const Rational& as_rational() const {
    if (!is_rational()) throw std::domain_error("FieldElem: not rational: " + str());
    return a_;
  }

  FieldElem operator-() const { return FieldElem(-a_, -b_); }
  FieldElem& operator+=(const FieldElem& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  FieldElem& operator-=(const FieldElem& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  FieldElem& operator*=(const FieldElem& o);
  FieldElem& operator/=(const FieldElem& o) { return *this *= o.inverse(); }

  friend FieldElem operator+(FieldElem x, const FieldElem& y) { return x += y; }
  friend FieldElem operator-(FieldElem x, const FieldElem& y) { return x -= y; }
  friend FieldElem operator*(FieldElem x, const FieldElem& y) { return x *= y; }
  friend FieldElem operator/(FieldElem x, const FieldElem& y) { return x /= y; }

  friend bool operator==(const FieldElem& x, const FieldElem& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend bool operator!=(const FieldElem& x, const FieldElem& y) { return !(x == y); }

  FieldElem inverse() const;
  FieldElem pow(unsigned e) const;

  // Exact sign of a + b*sqrt(3): -1, 0, +1.
  int sign() const;
  bool is_nonneg() const { return sign() >= 0; }
  bool is_positive() const { return sign() > 0; }

  friend bool operator<(const FieldElem& x, const FieldElem& y) { return (x - y).sign() < 0; }
  friend bool operator<=(const FieldElem& x, const FieldElem& y) { return (x - y).sign() <= 0; }
  friend bool operator>(const FieldElem& x, const FieldElem& y) { return (x - y).sign() > 0; }
  friend bool operator>=(const FieldElem& x, const FieldElem& y) { return (x - y).sign() >= 0; }

  double to_double() const;

  // Canonical text form: "p/q" or "p/q+r/s*rt3" ("p/q-r/s*rt3" for negative b).
  std::string str() const;
  static FieldElem parse(const std::string& s);

  size_t hash() const;

 private:
  static int cmp_abs_sq(const Rational& a, const Rational& b);

  Rational a_, b_;
};

inline FieldElem abs(const FieldElem& x) { return x.sign() < 0 ? -x : x; }

}  // namespace sos
