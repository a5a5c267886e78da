#pragma once

#include "soskit/claim.hpp"
#include "soskit/unipoly.hpp"

namespace sos {

enum class UniSosMode { Exact, Numeric };

// Weighted-square certificate of a univariate p with p(t) >= 0 on R.
// The pipeline peels the even-multiplicity part exactly (p = A^2 B with B
// strictly positive), solves a Gram SDP for B at 256-bit-equivalent care,
// rationalizes by continued fractions (denominators <= 2^64), re-balances the
// coefficient equations exactly, and certifies PSD-ness by exact LDL^T. In
// numeric mode a nonzero residual r is allowed when Sturm counting certifies
// r >= 0 on R; the result is then (witness, r) with p = value(witness) + r.
struct UniSosResult {
  SosWitness witness;   // in the variable `var` of `reg`
  UniPoly residual;     // zero in exact mode
  bool residual_nonneg_certified = true;
};
UniSosResult univariate_sos(const UniPoly& p, const RegistryPtr& reg, VarId var,
                            UniSosMode mode = UniSosMode::Numeric);

// Fact-3.2 interval nonnegativity: p >= 0 on [a, b] as a verified claim.
// Odd degree: axioms {Y - a >= 0, b - Y >= 0}; even degree: {(b-Y)(Y-a) >= 0}.
Claim univariate_interval_sos(const UniPoly& p, const Rational& a, const Rational& b,
                              const RegistryPtr& reg, VarId var);

}  // namespace sos
