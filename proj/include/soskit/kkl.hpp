#pragma once

#include <optional>

#include "soskit/cube.hpp"
#include "soskit/hyperc.hpp"
#include "soskit/ledger.hpp"
#include "soskit/lemmas.hpp"

namespace sos {

// Parameters of the KKL certificate. Exact mode needs K an odd integer >= 3
// so sqrt(3)^(K-1) stays rational, and a rational eps > 0.
struct KklParams {
  int n = 2;
  Rational eps = Rational(1);
  long K = 3;
};

// Small-set expansion in the noisy hypercube (weakened special case):
//   {f(x) = f(x)^3 for all x} |-4
//     Stab_{1/sqrt3}[f] <= E[f^2] (3 eps/4 + (1/(4 eps^3)) E[f^2]).
// `f` must be in point representation; its values may be any polynomials, and
// the cube-value axioms are stated on those value polynomials.
// materialize=false skips the per-point conclusion bookkeeping (used when the
// claim is only verified after substitution into a smaller variable set).
Claim build_sse(const CubeFunction& f, const Rational& eps, bool materialize = true);
Claim build_sse(int n, const Rational& eps);  // fresh atomic point function

// The KKL certificate:
//   {f(x)^2 = 1} u {Inf_i[f] <= tau} |-4
//     Var[f] <= (sqrt3^{K-1}/K (3 eps/4 + tau/(4 eps^3)) + 1/K) I[f].
// tau is a polynomial: an indeterminate in the theorem statement, or a value.
Claim build_kkl(const CubeFunction& f, const Rational& eps, long K, const Polynomial& tau);
Claim build_kkl(const KklParams& params);  // tau a fresh scalar indeterminate

// Equal-influence refutation (two-block form). Symbolic mode returns a claim
// deriving -1 >= 0 from {f(x)^2=1} u {equal influences within each block}
// u {Var >= 3/4} u {I <= bound}; bound defaults to a rational lower
// approximation of (1/20) ln(dim). Ledger mode certifies the scalar chain at
// the asymptotic parameter choice K = log9(9 sqrt n), eps = n^{-1/8}.
struct KklRefutation {
  std::optional<Claim> claim;
  ScalarLedger ledger;
  Rational margin;  // 3/4 minus the derived constant (symbolic mode)
};
KklRefutation build_kkl_refutation_symbolic(const CubeFunction& f, const Rational& eps, long K,
                                            std::optional<Rational> influence_bound = {});
KklRefutation build_kkl_refutation_symbolic(int n);
ScalarLedger build_kkl_refutation_ledger(unsigned long n);

// Recomputes the actual max summand degree of a claim's decomposition and
// tightens the stated bound to it (never loosens).
void tighten_degree(Claim& c);

// Nonnegative-weighted square witness whose value is Inf_i[f] (edge form).
SosWitness influence_witness(const CubeFunction& f, int i);

}  // namespace sos
