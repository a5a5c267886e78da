#pragma once

#include <map>

#include "soskit/claim.hpp"
#include "soskit/cube.hpp"
#include "soskit/expsq.hpp"

namespace sos {

// Caps on the Fourier registry blow-up; configuration, not hard-coded limits.
struct HcOptions {
  int pair_dim_cap = 6;
  int single_dim_cap = 10;
};

// Sparse Fourier-side view of a function of stochastic coordinates: mask over
// the coordinates -> coefficient polynomial in the claim indeterminates.
using FourierMap = std::map<uint32_t, Polynomial>;

// Shared context for the builders: one stochastic scalar per coordinate plus
// its moment profile.
class HcContext {
 public:
  HcContext(RegistryPtr reg, std::vector<MomentProfile> profiles);
  int dim() const { return static_cast<int>(z_.size()); }
  const RegistryPtr& registry() const { return reg_; }
  const ProfileMap& profile_map() const { return pmap_; }
  const MomentProfile& profile(int i) const { return profiles_.at(i); }
  VarId z(int i) const { return z_.at(i); }

  // sum_S coef_S * rho^|S| * z^S with rho = 1/sqrt3 when noise is set.
  Polynomial realize(const FourierMap& f, bool noise) const;
  Polynomial expect_poly(const Polynomial& p) const;
  // Multilinear product (z^2 = 1 reduction); all coordinates must be
  // unit-square for this to be an exact identity.
  static FourierMap multilinear_product(const FourierMap& a, const FourierMap& b);

 private:
  RegistryPtr reg_;
  std::vector<VarId> z_;
  std::vector<MomentProfile> profiles_;
  ProfileMap pmap_;
};

// Theorem-4.4 two-function q=4 gap witness (empty axiom set):
//   E[f1^2] E[f2^2] - E[(T_{1/sqrt3} f1)^2 (T_{1/sqrt3} f2)^2] = value(witness).
// Built by the coordinate induction; cross terms via the Fact 3.8 square and
// the fourth-moment slack via (9 - E[z^4])/9 times an expected-square witness.
SosWitness hc4_pair_gap_witness(const HcContext& ctx, const FourierMap& f1, const FourierMap& f2);

// Claims. Each verifies with empty axioms.
Claim build_hc4_pair(const HcContext& ctx, const FourierMap& f1, const FourierMap& f2);
// Fresh atomic indeterminates; identical = true reuses f for both slots.
Claim build_hc4_pair(int n, const MomentProfile& profile, bool identical = false,
                     const HcOptions& opt = {});

// Corollary-4.5 bounded-degree version:
//   E[f1^2 f2^2] <= 3^{k1+k2} E[f1^2] E[f2^2].
Claim build_hc4_bounded(const HcContext& ctx, const FourierMap& f1, const FourierMap& f2, int k1,
                        int k2);
Claim build_hc4_bounded(int n, int k1, int k2, const MomentProfile& profile,
                        const HcOptions& opt = {});

// Theorem-4.6 product version:
//   E[prod_j f_j^2] <= 3^{r (k_1+...+k_{2^r})} prod_j E[f_j^2].
// At r >= 2, non-unit-square coordinate profiles are handled by a diagonal
// even-monomial certificate of the gap when one exists (see README notes).
Claim build_hc_2r(const HcContext& ctx, const std::vector<FourierMap>& fs,
                  const std::vector<int>& ks, int r);

// Corollary-4.7: E[f^q] <= sqrt3^{(q ceil(log2 q) - q) k} E[f^2]^{q/2}.
Claim build_hc_q(int n, int k, int q, const MomentProfile& profile, const HcOptions& opt = {});

// The weakened-constant exponent of the q-norm bound (resolved from Theorem
// 4.6 with r = ceil(log2 q) - 1): sqrt3 exponent (q ceil(log2 q) - q) k.
unsigned hc_q_sqrt3_exponent(int q, int k);

}  // namespace sos
