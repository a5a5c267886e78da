#pragma once

#include "soskit/claim.hpp"
#include "soskit/moments.hpp"

namespace sos {

// Weighted-square form of E_z[r^2] over the stochastic variables in `profiles`
// (all other variables of r are treated as coefficients). Unit-square
// variables (z^2 = 1 pointwise) are handled by enumerating the +-1 assignments
// with uniform weights; the remaining variables by an exact LDL^T factorization
// of their (PSD) moment matrix over the z-monomials appearing in r.
//
// The returned witness W satisfies value(W) = expect(r^2, profiles) exactly.
SosWitness expected_square_witness(const Polynomial& r, const ProfileMap& profiles,
                                   const std::string& label = "");

// Same for r = a*b - c*d without materializing the product over the discrete
// assignments: factors are substituted per assignment first, which keeps the
// intermediate polynomials small when the coefficients are wide.
SosWitness expected_square_witness_of_product(const Polynomial& a, const Polynomial& b,
                                              const Polynomial& c, const Polynomial& d,
                                              const ProfileMap& profiles,
                                              const std::string& label = "");

// Exact LDL^T of a symmetric PSD matrix over the field: A = L D L^T with unit
// lower-triangular L and nonnegative diagonal D. Throws if A is not PSD.
struct FieldLdl {
  std::vector<std::vector<FieldElem>> L;  // unit lower triangular
  std::vector<FieldElem> D;
};
FieldLdl field_ldl(const std::vector<std::vector<FieldElem>>& A);

}  // namespace sos
