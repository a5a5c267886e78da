#pragma once

#include <map>
#include <optional>

#include "soskit/claim.hpp"

namespace sos {

enum class Sense { Min, Max };

// inf/sup { p(x) : q_i(x) >= 0, r_j(x) = 0 }. Boolean structure (X^2 = X or
// f^2 = 1 equalities) is carried explicitly and drives multilinear reduction.
struct PolyProgram {
  RegistryPtr reg;
  Polynomial objective;
  Sense sense = Sense::Min;
  std::vector<Polynomial> ineqs;
  std::vector<Polynomial> eqs;  // general equalities (not the boolean ones)

  enum class BoolKind { None, ZeroOne, PlusMinus };
  std::map<VarId, BoolKind> boolean_vars;

  void declare_boolean01(VarId v) { boolean_vars[v] = BoolKind::ZeroOne; }
  void declare_boolean_pm1(VarId v) { boolean_vars[v] = BoolKind::PlusMinus; }
  // The boolean equalities as polynomials (x^2 - x or x^2 - 1).
  std::vector<Polynomial> boolean_eqs() const;
};

// Multilinear reduction modulo the boolean ideal, with quotient tracking:
// p = reduced + sum_v multiplier_v * (boolean equality of v).
struct ReducedPoly {
  Polynomial reduced;
  std::map<VarId, Polynomial> multipliers;
};
ReducedPoly reduce_boolean(const Polynomial& p, const PolyProgram& prog);

}  // namespace sos
