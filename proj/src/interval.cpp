#include "soskit/interval.hpp"

#include <algorithm>
#include <cstdio>

namespace sos {

void Interval::init(double lo, double hi) {
  mpfr_init2(lo_, kPrec);
  mpfr_init2(hi_, kPrec);
  mpfr_set_d(lo_, lo, MPFR_RNDD);
  mpfr_set_d(hi_, hi, MPFR_RNDU);
}

Interval::Interval(const Rational& r) {
  mpfr_init2(lo_, kPrec);
  mpfr_init2(hi_, kPrec);
  mpfr_set_q(lo_, r.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, r.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const FieldElem& x) {
  Interval a(x.rat_part());
  Interval b(x.rt3_part());
  Interval r = a + b * sqrt(Interval::exact_long(3));
  mpfr_init2(lo_, kPrec);
  mpfr_init2(hi_, kPrec);
  mpfr_set(lo_, r.lo_, MPFR_RNDD);
  mpfr_set(hi_, r.hi_, MPFR_RNDU);
}

Interval::Interval(const Interval& o) {
  mpfr_init2(lo_, kPrec);
  mpfr_init2(hi_, kPrec);
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept {
  mpfr_init2(lo_, kPrec);
  mpfr_init2(hi_, kPrec);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this != &o) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  if (this != &o) {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::exact_long(long v) {
  Interval r;
  mpfr_set_si(r.lo_, v, MPFR_RNDD);
  mpfr_set_si(r.hi_, v, MPFR_RNDU);
  return r;
}

Interval Interval::pi() {
  Interval r;
  mpfr_const_pi(r.lo_, MPFR_RNDD);
  mpfr_const_pi(r.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& x, const Interval& y) {
  Interval r;
  mpfr_min(r.lo_, x.lo_, y.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, x.hi_, y.hi_, MPFR_RNDU);
  return r;
}

double Interval::width() const {
  mpfr_t w;
  mpfr_init2(w, kPrec);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

Interval Interval::operator-() const {
  Interval r;
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval operator+(const Interval& x, const Interval& y) {
  Interval r;
  mpfr_add(r.lo_, x.lo_, y.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, x.hi_, y.hi_, MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& x, const Interval& y) {
  Interval r;
  mpfr_sub(r.lo_, x.lo_, y.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, x.hi_, y.lo_, MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& x, const Interval& y) {
  mpfr_t cand[4];
  for (auto& c : cand) mpfr_init2(c, Interval::kPrec);
  Interval r;
  // Lower bound: min of products rounded down.
  mpfr_mul(cand[0], x.lo_, y.lo_, MPFR_RNDD);
  mpfr_mul(cand[1], x.lo_, y.hi_, MPFR_RNDD);
  mpfr_mul(cand[2], x.hi_, y.lo_, MPFR_RNDD);
  mpfr_mul(cand[3], x.hi_, y.hi_, MPFR_RNDD);
  mpfr_set(r.lo_, cand[0], MPFR_RNDD);
  for (int i = 1; i < 4; ++i)
    if (mpfr_cmp(cand[i], r.lo_) < 0) mpfr_set(r.lo_, cand[i], MPFR_RNDD);
  mpfr_mul(cand[0], x.lo_, y.lo_, MPFR_RNDU);
  mpfr_mul(cand[1], x.lo_, y.hi_, MPFR_RNDU);
  mpfr_mul(cand[2], x.hi_, y.lo_, MPFR_RNDU);
  mpfr_mul(cand[3], x.hi_, y.hi_, MPFR_RNDU);
  mpfr_set(r.hi_, cand[0], MPFR_RNDU);
  for (int i = 1; i < 4; ++i)
    if (mpfr_cmp(cand[i], r.hi_) > 0) mpfr_set(r.hi_, cand[i], MPFR_RNDU);
  for (auto& c : cand) mpfr_clear(c);
  return r;
}

Interval operator/(const Interval& x, const Interval& y) {
  if (y.contains_zero()) throw std::domain_error("Interval: division by interval containing 0");
  Interval inv;
  mpfr_ui_div(inv.lo_, 1, y.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, y.lo_, MPFR_RNDU);
  return x * inv;
}

Interval sqrt(const Interval& x) {
  if (mpfr_sgn(x.lo_) < 0) throw std::domain_error("Interval: sqrt of negative");
  Interval r;
  mpfr_sqrt(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_sqrt(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval log(const Interval& x) {
  if (mpfr_sgn(x.lo_) <= 0) throw std::domain_error("Interval: log needs positive interval");
  Interval r;
  mpfr_log(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_log(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval exp(const Interval& x) {
  Interval r;
  mpfr_exp(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval abs(const Interval& x) {
  if (mpfr_sgn(x.lo_) >= 0) return x;
  if (mpfr_sgn(x.hi_) <= 0) return -x;
  Interval r;
  mpfr_set_zero(r.lo_, 1);
  mpfr_t neglo;
  mpfr_init2(neglo, Interval::kPrec);
  mpfr_neg(neglo, x.lo_, MPFR_RNDU);
  mpfr_max(r.hi_, neglo, x.hi_, MPFR_RNDU);
  mpfr_clear(neglo);
  return r;
}

Interval max(const Interval& x, const Interval& y) {
  Interval r;
  mpfr_max(r.lo_, x.lo_, y.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, x.hi_, y.hi_, MPFR_RNDU);
  return r;
}

Interval pow(const Interval& x, const Interval& y) { return exp(y * log(x)); }

Interval pow_int(const Interval& x, long e) {
  if (e < 0) return Interval::exact_long(1) / pow_int(x, -e);
  Interval acc = Interval::exact_long(1);
  Interval base = x;
  unsigned long u = static_cast<unsigned long>(e);
  while (u) {
    if (u & 1) acc = acc * base;
    base = base * base;
    u >>= 1;
  }
  return acc;
}

Interval ldexp2(const Interval& x, long e) {
  Interval r;
  mpfr_mul_2si(r.lo_, x.lo_, e, MPFR_RNDD);
  mpfr_mul_2si(r.hi_, x.hi_, e, MPFR_RNDU);
  return r;
}

std::string Interval::str(int digits) const {
  char buf[128];
  std::string out = "[";
  mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, lo_);
  out += buf;
  out += ", ";
  mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, hi_);
  out += buf;
  out += "]";
  return out;
}

}  // namespace sos
