#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soskit/field.hpp"
#include "soskit/interval.hpp"
#include "soskit/poly.hpp"

namespace sos {

class UniPoly;

// One factor of a square-free decomposition.
struct SqfFactor {
  std::vector<Rational> coeffs;  // the square-free factor, ascending degree
  int multiplicity;
};

// Dense univariate polynomial over Q, coefficients ascending by degree.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
  static UniPoly constant(const Rational& c) { return UniPoly({c}); }
  static UniPoly t() { return UniPoly({Rational(0), Rational(1)}); }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Rational& coeff(size_t k) const;
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& leading() const;

  UniPoly operator-() const;
  UniPoly operator+(const UniPoly& o) const;
  UniPoly operator-(const UniPoly& o) const;
  UniPoly operator*(const UniPoly& o) const;
  UniPoly scale(const Rational& s) const;
  bool operator==(const UniPoly& o) const { return c_ == o.c_; }

  UniPoly derivative() const;
  UniPoly integral() const;  // antiderivative with zero constant term

  Rational eval(const Rational& t) const;
  double eval_double(double t) const;
  Interval eval_interval(const Interval& t) const;  // Horner enclosure

  // Quotient/remainder over Q (exact division algorithm).
  static void divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r);
  static UniPoly gcd(UniPoly a, UniPoly b);  // monic gcd
  UniPoly monic() const;
  // Positive-scalar normalization to a primitive integer polynomial; keeps
  // coefficient sizes bounded inside gcd and Sturm chains.
  UniPoly primitive_part() const;

  // Yun square-free decomposition: p = lc * prod factor_i ^ multiplicity_i.
  std::vector<SqfFactor> squarefree_decomposition() const;

  // Number of distinct real roots in (a, b] by Sturm chains; whole line if no
  // bounds given.
  int count_real_roots(const std::optional<Rational>& a = std::nullopt,
                       const std::optional<Rational>& b = std::nullopt) const;

  // Exact check: p(t) >= 0 for all real t. Leading coefficient positive, even
  // degree, and every real root has even multiplicity (square-free odd parts
  // have no real roots).
  bool is_nonneg_on_reals() const;
  // Exact check: p(t) >= 0 on [a, b].
  bool is_nonneg_on_interval(const Rational& a, const Rational& b) const;

  // Compose with c * t (variable scaling) and with t + c (shift).
  UniPoly scale_var(const Rational& c) const;

  // Even/odd part extraction and evenness test.
  bool is_even() const;
  // For even p(t) = q(t^2): returns q. Throws if not even.
  UniPoly even_part_as_poly_in_t2() const;

  std::string str(const std::string& var = "t") const;

  // Bridge to the multivariate layer (single scalar variable v).
  Polynomial to_polynomial(const RegistryPtr& reg, VarId v) const;
  static UniPoly from_polynomial(const Polynomial& p);  // must be univariate, rational

 private:
  void trim();
  std::vector<Rational> c_;
};

// E[p(s g)] as a polynomial in s^2 when p is even (g standard Gaussian):
// substitutes the Gaussian moment (2k-1)!! for g^{2k}. Returns q with
// E[p(s g)] = q(u) under u = s^2.
UniPoly gaussian_expectation_in_s2(const UniPoly& p_even);

}  // namespace sos
