#include "soskit/moments.hpp"

#include <stdexcept>

namespace sos {

FieldElem MomentProfile::moment(uint32_t r) const {
  if (r == 0) return FieldElem(1);
  switch (kind_) {
    case Kind::Rademacher:
      return (r % 2 == 0) ? FieldElem(1) : FieldElem(0);
    case Kind::Gaussian:
      if (r % 2 == 1) return FieldElem(0);
      return FieldElem(Rational(odd_double_factorial(r / 2)));
    case Kind::Explicit:
      if (r > explicit_.size())
        throw std::out_of_range("MomentProfile: missing moment of order " + std::to_string(r));
      return explicit_[r - 1];
  }
  throw std::logic_error("MomentProfile: bad kind");
}

bool MomentProfile::satisfies_hc4_hypotheses() const {
  try {
    return moment(1).is_zero() && moment(3).is_zero() && moment(2) == FieldElem(1) &&
           moment(4) <= FieldElem(9);
  } catch (const std::out_of_range&) {
    return false;
  }
}

Polynomial expect(const Polynomial& p, const ProfileMap& profiles) {
  std::unordered_map<Monomial, FieldElem, MonomialHash> acc;
  for (auto& [m, c] : p.terms()) {
    FieldElem coef = c;
    std::vector<std::pair<VarId, uint32_t>> rest;
    for (auto& [v, e] : m.factors()) {
      auto it = profiles.find(v);
      if (it == profiles.end()) {
        rest.emplace_back(v, e);
      } else {
        coef *= it->second.moment(e);
        if (coef.is_zero()) break;
      }
    }
    if (coef.is_zero()) continue;
    acc[Monomial::from_factors(std::move(rest))] += coef;
  }
  return Polynomial::from_map(p.registry(), std::move(acc));
}

std::map<Monomial, Polynomial> collect_stochastic(const Polynomial& p,
                                                  const ProfileMap& profiles) {
  std::map<Monomial, std::unordered_map<Monomial, FieldElem, MonomialHash>> split;
  for (auto& [m, c] : p.terms()) {
    std::vector<std::pair<VarId, uint32_t>> stoch, rest;
    for (auto& [v, e] : m.factors()) {
      if (profiles.count(v))
        stoch.emplace_back(v, e);
      else
        rest.emplace_back(v, e);
    }
    split[Monomial::from_factors(stoch)][Monomial::from_factors(rest)] += c;
  }
  std::map<Monomial, Polynomial> out;
  for (auto& [zmono, coeffs] : split) {
    auto mm = std::move(coeffs);
    Polynomial q = Polynomial::from_map(p.registry(), std::move(mm));
    if (!q.is_zero()) out.emplace(zmono, std::move(q));
  }
  return out;
}

}  // namespace sos
