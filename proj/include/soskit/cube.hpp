#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "soskit/poly.hpp"

namespace sos {

// Symbolic function on {-1,1}^n whose point values / Fourier coefficients are
// polynomials. Mask convention: bit i set in x means x_i = -1, so the character
// chi_S(x) = prod_{i in S} x_i equals (-1)^popcount(S & x).
//
// Point values are stored densely (2^n entries); Fourier coefficients sparsely.
class CubeFunction {
 public:
  CubeFunction(RegistryPtr reg, int n, bool fourier);

  // Fresh atomic functions over newly interned indeterminates.
  static CubeFunction atomic_points(const RegistryPtr& reg, const std::string& fn, int n);
  static CubeFunction atomic_fourier(const RegistryPtr& reg, const std::string& fn, int n,
                                     std::optional<int> degree_bound = std::nullopt);

  int n() const { return n_; }
  bool is_fourier() const { return fourier_; }
  const RegistryPtr& registry() const { return reg_; }

  const Polynomial& point(uint32_t x_mask) const;
  void set_point(uint32_t x_mask, Polynomial p);
  Polynomial fourier_coeff(uint32_t s_mask) const;  // zero when absent
  void set_fourier_coeff(uint32_t s_mask, Polynomial p);
  const std::map<uint32_t, Polynomial>& fourier_coeffs() const;

  // Representation toggle; exact, and a round trip is the identity.
  CubeFunction to_fourier() const;
  CubeFunction to_points() const;

  // T_rho: multiplies the S coefficient by rho^|S|.
  CubeFunction noise(const FieldElem& rho) const;

  // Discrete derivative D_i f(x) = (f(x^(i->1)) - f(x^(i->-1)))/2, a function
  // on the cube over the remaining n-1 coordinates (point representation).
  CubeFunction derivative(int i) const;

  Polynomial expectation() const;         // E_x[f(x)]
  Polynomial expectation_sq() const;      // E_x[f(x)^2]
  Polynomial influence(int i) const;      // sum_{S ni i} fhat(S)^2
  Polynomial total_influence() const;     // sum_S |S| fhat(S)^2
  Polynomial variance() const;            // sum_{S != empty} fhat(S)^2
  Polynomial stability(const FieldElem& rho) const;  // sum_S rho^|S| fhat(S)^2
  Polynomial level_weight(int level) const;          // sum_{|S|=level} fhat(S)^2

  // f scaled/combined pointwise.
  CubeFunction scale(const FieldElem& c) const;
  CubeFunction operator+(const CubeFunction& o) const;
  CubeFunction operator-(const CubeFunction& o) const;

 private:
  RegistryPtr reg_;
  int n_;
  bool fourier_;
  std::vector<Polynomial> point_;           // size 2^n when !fourier_
  std::map<uint32_t, Polynomial> fhat_;     // sparse when fourier_
};

}  // namespace sos
