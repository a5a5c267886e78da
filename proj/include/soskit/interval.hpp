#pragma once

#include <mpfr.h>

#include <string>

#include "soskit/field.hpp"

namespace sos {

// Closed interval [lo, hi] with MPFR endpoints and directed rounding.
// Default precision 128 bits; all operations produce enclosures.
class Interval {
 public:
  static constexpr mpfr_prec_t kPrec = 128;

  Interval() { init(0.0, 0.0); }
  explicit Interval(double v) { init(v, v); }
  Interval(double lo, double hi) { init(lo, hi); }
  explicit Interval(const Rational& r);
  explicit Interval(const FieldElem& x);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  static Interval exact_long(long v);
  static Interval pi();
  static Interval hull(const Interval& x, const Interval& y);

  double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double width() const;
  double mid() const { return 0.5 * (lo_d() + hi_d()); }

  bool contains_zero() const;
  bool is_positive() const { return mpfr_sgn(lo_) > 0; }
  bool is_nonneg() const { return mpfr_sgn(lo_) >= 0; }

  // Certified comparisons (true only when provable from the enclosure).
  bool certainly_le(const Interval& o) const { return mpfr_cmp(hi_, o.lo_) <= 0; }
  bool certainly_lt(const Interval& o) const { return mpfr_cmp(hi_, o.lo_) < 0; }

  Interval operator-() const;
  friend Interval operator+(const Interval& x, const Interval& y);
  friend Interval operator-(const Interval& x, const Interval& y);
  friend Interval operator*(const Interval& x, const Interval& y);
  friend Interval operator/(const Interval& x, const Interval& y);

  friend Interval sqrt(const Interval& x);
  friend Interval log(const Interval& x);   // natural log, requires lo > 0
  friend Interval exp(const Interval& x);
  friend Interval abs(const Interval& x);
  friend Interval max(const Interval& x, const Interval& y);
  // x^y for x > 0 via exp(y log x); integer powers exact-ish for any sign.
  friend Interval pow(const Interval& x, const Interval& y);
  friend Interval pow_int(const Interval& x, long e);
  // 2^e scaling (exact).
  friend Interval ldexp2(const Interval& x, long e);

  std::string str(int digits = 8) const;

 private:
  void init(double lo, double hi);
  mpfr_t lo_, hi_;
};

}  // namespace sos
