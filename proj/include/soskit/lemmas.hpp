#pragma once

#include <map>
#include <string>

#include "soskit/claim.hpp"

namespace sos {

// A polynomial identity "lhs = sum_i mult_i * axiom_i" used to discharge a
// derived equality through existing equality axioms (no SOS part).
struct EqIdentity {
  Polynomial lhs;
  std::vector<std::pair<Polynomial, Polynomial>> parts;  // (multiplier, axiom)
  bool check(const RegistryPtr& reg) const;
};

// The basic inequality library. Lemmas are instantiated over caller-supplied
// polynomials; substitution into the stored decompositions keeps claims exact.
namespace lemmas {

// 1 - Y = 1/2 (1-Y)^2 + 1/2 (1-Y^2), from the axiom 1 - Y^2 >= 0.
Claim fact33_upper(const Polynomial& y);
// 1 + Y >= 0 from the same axiom (Y replaced by -Y).
Claim fact33_lower(const Polynomial& y);

// 1 - Y^2 = 1/2 (1+Y)^2 (1-Y) + 1/2 (1-Y)^2 (1+Y), from {1-Y >= 0, 1+Y >= 0}.
Claim fact34(const Polynomial& y);

// (Y-Z)/2 - ((Y-Z)/2)^3 expressed through the equalities Y^2-1 = 0, Z^2-1 = 0.
EqIdentity fact35(const Polynomial& y, const Polynomial& z);

// Z - Y W = 1/2 (Z-W)(1+Y) + 1/2 (Z+W)(1-Y): claim over the four axioms plus
// the two pairwise products, each with multiplier 1/2.
Claim fact36(const Polynomial& y, const Polynomial& z, const Polynomial& w);

// Y'Z' - YZ = Y'(Z'-Z) + Z(Y'-Y): claim over {Y'-Y, Z'-Z, Y', Z >= 0} plus the
// two products used.
Claim fact37(const Polynomial& yp, const Polynomial& y, const Polynomial& zp,
             const Polynomial& z);

// eps/2 Y^2 + 1/(2 eps) Z^2 - YZ >= 0 (pure SOS).
Claim fact39(const Polynomial& y, const Polynomial& z, const Rational& eps);
inline Claim fact38(const Polynomial& y, const Polynomial& z) { return fact39(y, z, 1); }

// 3 eps/4 Y^4 + 1/(4 eps^3) Z^4 - Y^3 Z >= 0 (pure SOS).
Claim fact311(const Polynomial& y, const Polynomial& z, const Rational& eps);
inline Claim fact310(const Polynomial& y, const Polynomial& z) { return fact311(y, z, 1); }

// Z^2 - Y^2 = (Z-Y)^2 + 2 Y(Z-Y): claim over {Y >= 0, Z-Y >= 0, Y(Z-Y) >= 0}.
Claim fact312(const Polynomial& y, const Polynomial& z);

// avg_i w_i X_i^2 - (avg_i w_i X_i)^2 = sum_{i<j} w_i w_j (X_i - X_j)^2 for
// nonnegative weights summing to 1 (Fact 3.13 is the uniform case).
Claim fact313(const std::vector<Polynomial>& xs, const std::vector<Rational>& weights = {});

// Prop 2.7: {Y^4 >= 1, Y^2 <= 1-eps} |-4 -1 >= 0 for eps > 0 (both the c in
// (0,1) branch and the stated reader case eps >= 1).
Claim prop27(const Polynomial& y, const Rational& eps);

}  // namespace lemmas

// Named lemma instantiation over fresh scalar indeterminates, for the CLI and
// the identity suite: "fact3.3", ..., "fact3.13", "prop2.7".
// Parameters: "eps" for 3.9/3.11/2.7, "n" for 3.13.
Claim instantiate_lemma(const std::string& name, const std::map<std::string, Rational>& params,
                        const RegistryPtr& reg);
std::vector<std::string> lemma_names();

}  // namespace sos
