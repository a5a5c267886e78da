#pragma once

#include <map>
#include <variant>
#include <vector>

#include "soskit/poly.hpp"

namespace sos {

// Raw-moment source for one stochastic variable. Rademacher: E[z^r] = 1 for
// even r, 0 for odd. Gaussian: E[z^r] = (r-1)!! for even r, 0 for odd.
// Explicit profiles list E[z^1], E[z^2], ... directly.
class MomentProfile {
 public:
  enum class Kind { Rademacher, Gaussian, Explicit };

  static MomentProfile rademacher() { return MomentProfile(Kind::Rademacher, {}); }
  static MomentProfile gaussian() { return MomentProfile(Kind::Gaussian, {}); }
  static MomentProfile explicit_moments(std::vector<FieldElem> m) {
    return MomentProfile(Kind::Explicit, std::move(m));
  }

  Kind kind() const { return kind_; }
  // z^2 = 1 holds pointwise (enables multilinear reduction of products).
  bool unit_square() const { return kind_ == Kind::Rademacher; }

  FieldElem moment(uint32_t r) const;

  // Theorem-4.4 hypotheses: E[z] = E[z^3] = 0, E[z^2] = 1, E[z^4] <= 9.
  bool satisfies_hc4_hypotheses() const;
  FieldElem fourth_moment() const { return moment(4); }

 private:
  MomentProfile(Kind k, std::vector<FieldElem> m) : kind_(k), explicit_(std::move(m)) {}
  Kind kind_;
  std::vector<FieldElem> explicit_;
};

// Assignment of profiles to (disjointly tagged) stochastic variables.
using ProfileMap = std::map<VarId, MomentProfile>;

// Replaces every power z^r of each stochastic variable by its raw moment,
// assuming independence across the stochastic variables. Linear in p.
Polynomial expect(const Polynomial& p, const ProfileMap& profiles);

// Splits p by its stochastic monomial part: z-monomial -> coefficient poly.
std::map<Monomial, Polynomial> collect_stochastic(const Polynomial& p,
                                                  const ProfileMap& profiles);

}  // namespace sos
