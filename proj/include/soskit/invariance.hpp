#pragma once

#include <optional>

#include "soskit/claim.hpp"
#include "soskit/cube.hpp"
#include "soskit/interval.hpp"
#include "soskit/unisos.hpp"

namespace sos {

// Even polynomial approximator of |t| with its certificates: P(t) >= |t| is
// witnessed by SOS certificates of P -+ t, and the measured overshoots
//   delta_sqrt = sup_{0<=s<=1} E[P(s g)] - sqrt(2/pi) s,
//   delta_quad = sup_{0<=u<=1} R(u) - u/2 - 1/pi     (R(u) = E[P(sqrt(u) g)])
// are interval-certified. delta_hat_* are rational upper bounds including the
// rational-pi slack used by downstream claims.
struct AbsApproximator {
  UniPoly P;
  UniPoly R;  // E[P(s g)] as a polynomial in u = s^2
  int degree = 0;
  Interval delta_sqrt, delta_quad;
  Rational delta_hat_sqrt, delta_hat_quad;
  SosWitness wit_minus, wit_plus;  // certificates of P - t and P + t
  RegistryPtr reg;
  VarId tvar = 0;
  Rational coeff_bound;  // certified bound sup_{|t|<=1} |P| * (4e)^(deg+1)
};

// Rational directional stand-ins for 1/pi and sqrt(2/pi) (upper bounds,
// slack <= 1e-4).
Rational inv_pi_upper();
Rational sqrt_2_over_pi_upper();

AbsApproximator validate_abs_approx(const UniPoly& P);
// Constructive pipeline: odd smooth-step kernels (1 - u^2)^m integrated and
// rescaled, shifted until P >= |t| certifies exactly, smallest measured delta
// first. Fails if no family member reaches the target.
AbsApproximator construct_abs_approx(double delta_target);

// Invariance for powers of the linear form l = a_1 z_1 + ... + a_n z_n:
//   upper:  E_G[l^k] - E_x[l^k] >= 0                      (no axioms)
//   lower:  E_x[l^k] - E_G[l^k] + C(k) sum a_i^4 >= 0     from {sum a_i^2 <= 1}
// C(k) = sum_{j=2}^{k/2} binom(k, 2j) ((2j-1)!! - 1) (k-2j-1)!!.
struct InvariancePair {
  Claim upper;
  Claim lower;
  Rational C;
  std::vector<VarId> a;  // the coefficient indeterminates
};
InvariancePair build_invariance(int n, int k);
Rational invariance_constant(int k);

// Degree-4 lower bound for |t|-approximators.
struct Deg4LowerReport {
  bool symbolic_ok = false;    // the M-parameterized convex combination checks
  double numeric_infimum = 0;  // grid LP lower bound on E[P(g)]
  std::string detail;
};
Deg4LowerReport check_deg4_lower();

enum class BForm { Sqrt, Quadratic };

// Theorem-7.7-style claim over a supplied cube function and coefficient
// polynomials: from {f(x) in [-1,1]} and a claim proving 1 - sum a_i^2 >= 0,
//   E_x[f(x) l(x)] <= bbar + delta_hat + C_hat sum a_i^4.
struct BerryEsseen {
  Claim claim;
  Rational delta_hat;
  Rational C_hat;
};
BerryEsseen build_berry_esseen(const AbsApproximator& P, const CubeFunction& f,
                               const std::vector<Polynomial>& a, const Claim& sum_sq_bound,
                               BForm form);
// Fresh atomic instance: f and a_1..a_n are new indeterminates, the bound
// 1 - sum a^2 >= 0 is taken as an axiom.
BerryEsseen build_berry_esseen(const AbsApproximator& P, int n, BForm form);

// Corollary-7.8: from {f(x) in [-1,1]},
//   sum fhat(i)^2 <= 2/pibar + delta_hat + C_hat sum fhat(i)^4
// and with tau: ... <= 2/pibar + delta_hat + C_hat tau.
struct TwoOverPi {
  Claim claim;
  Rational delta_hat;
  Rational C_hat;
};
TwoOverPi build_two_over_pi(const AbsApproximator& P, int n,
                            std::optional<Rational> tau = std::nullopt);

// Corollary-8.8: from {f(x) in [-1,1]}, for rational rho in (-1, 0),
//   Stab_rho[f] >= (2/pibar) rho + (1 - 2/pibar) rho^3 - delta_hat
//                  - C_hat sum fhat(i)^4.
struct StabBound {
  Claim claim;
  Rational delta_hat;
  Rational C_hat;
};
StabBound build_stab_bound(const AbsApproximator& P, const Rational& rho, int n);
StabBound build_stab_bound(const AbsApproximator& P, const Rational& rho,
                           const CubeFunction& f);

// Certified supremum of a univariate rational-coefficient expression over an
// interval by adaptive interval subdivision: returns an upper bound interval.
Interval certified_sup(const std::function<Interval(const Interval&)>& f, const Rational& lo,
                       const Rational& hi, double width_target = 1e-8, int budget = 20000);

}  // namespace sos
