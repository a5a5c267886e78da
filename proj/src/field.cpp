#include "soskit/field.hpp"

#include <functional>

namespace sos {

Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  r.canonicalize();
  return r;
}

std::string rational_str(const Rational& r) { return r.get_str(); }

Integer odd_double_factorial(unsigned m) {
  Integer p = 1;
  for (unsigned j = 1; j <= m; ++j) p *= 2 * j - 1;
  return p;
}

FieldElem FieldElem::sqrt3_pow(unsigned k) {
  Integer three_pow;
  mpz_ui_pow_ui(three_pow.get_mpz_t(), 3, k / 2);
  Rational r(three_pow);
  if (k % 2 == 0) return FieldElem(r);
  return FieldElem(Rational(0), r);
}

FieldElem FieldElem::inv_sqrt3_pow(unsigned k) { return sqrt3_pow(k).inverse(); }

FieldElem& FieldElem::operator*=(const FieldElem& o) {
  // (a + b rt3)(c + d rt3) = ac + 3bd + (ad + bc) rt3
  Rational na = a_ * o.a_ + 3 * b_ * o.b_;
  Rational nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  return *this;
}

FieldElem FieldElem::inverse() const {
  // 1/(a + b rt3) = (a - b rt3)/(a^2 - 3 b^2); denominator zero only for 0.
  Rational den = a_ * a_ - 3 * b_ * b_;
  if (den == 0) throw std::domain_error("FieldElem: division by zero");
  return FieldElem(a_ / den, -b_ / den);
}

FieldElem FieldElem::pow(unsigned e) const {
  FieldElem acc(Rational(1));
  FieldElem base = *this;
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

int FieldElem::sign() const {
  int sa = sgn(a_);
  int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: compare |a| vs sqrt(3)|b|, i.e. a^2 vs 3 b^2.
  int cmp = cmp_abs_sq(a_, b_);
  if (cmp == 0) return 0;  // impossible: sqrt3 irrational, but keep exact
  return cmp > 0 ? sa : sb;
}

int FieldElem::cmp_abs_sq(const Rational& a, const Rational& b) {
  Rational lhs = a * a;
  Rational rhs = 3 * b * b;
  return cmp(lhs, rhs);
}

double FieldElem::to_double() const {
  static const double rt3 = 1.7320508075688772;
  return a_.get_d() + b_.get_d() * rt3;
}

std::string FieldElem::str() const {
  if (b_ == 0) return a_.get_str();
  std::string out;
  if (a_ != 0) out = a_.get_str();
  Rational ab = ::abs(b_);
  std::string bs = ab.get_str() + "*rt3";
  if (out.empty()) {
    return sgn(b_) < 0 ? "-" + bs : bs;
  }
  return out + (sgn(b_) < 0 ? "-" : "+") + bs;
}

FieldElem FieldElem::parse(const std::string& s) {
  // Split at the last '+'/'-' that is not the leading sign and not inside a fraction.
  // Grammar: [rat][(+|-)rat*rt3] | rat*rt3
  auto strip = [](std::string t) {
    size_t b = t.find_first_not_of(" \t");
    size_t e = t.find_last_not_of(" \t");
    if (b == std::string::npos) return std::string();
    return t.substr(b, e - b + 1);
  };
  std::string t = strip(s);
  if (t.empty()) throw std::invalid_argument("FieldElem::parse: empty");
  size_t star = t.find("*rt3");
  if (star == std::string::npos) return FieldElem(parse_rational(t));
  // Find the split point: scan for '+'/'-' after position 0 that separates the parts.
  size_t split = std::string::npos;
  for (size_t i = 1; i < star; ++i) {
    if (t[i] == '+' || t[i] == '-') split = i;  // last sign before the rt3 term
  }
  if (split == std::string::npos) {
    // Pure rt3 term.
    return FieldElem(Rational(0), parse_rational(t.substr(0, star)));
  }
  Rational a = parse_rational(t.substr(0, split));
  Rational b = parse_rational(t.substr(split + 1, star - split - 1));
  if (t[split] == '-') b = -b;
  return FieldElem(a, b);
}

size_t FieldElem::hash() const {
  std::hash<std::string> h;
  return h(str());
}

}  // namespace sos
