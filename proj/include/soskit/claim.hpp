#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soskit/poly.hpp"

namespace sos {

// Nonnegative-weighted sum of squares: value = sum_i weight_i * root_i^2.
// Weights live in Q[sqrt3] and are checked exactly.
struct WeightedSquare {
  FieldElem weight;
  Polynomial root;
  std::string label;  // optional provenance tag ("slack", "cross", ...)
};

class SosWitness {
 public:
  SosWitness() = default;
  explicit SosWitness(std::vector<WeightedSquare> terms) : terms_(std::move(terms)) { prune(); }
  static SosWitness constant(const RegistryPtr& reg, const FieldElem& c,
                             const std::string& label = "");
  static SosWitness square(Polynomial root, FieldElem weight = FieldElem(1),
                           const std::string& label = "");

  bool empty() const { return terms_.empty(); }
  const std::vector<WeightedSquare>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }

  void append(const SosWitness& o);
  void append_square(FieldElem weight, Polynomial root, const std::string& label = "");
  SosWitness scaled(const FieldElem& c) const;  // c must be >= 0

  Polynomial value(const RegistryPtr& reg) const;
  void add_value_into(PolyAccum& acc, const FieldElem& scale = FieldElem(1)) const;
  int degree() const;  // 2 * max deg(root); 0 when empty
  bool weights_nonneg() const;

  // All pairwise products: value(product) = value(a) * value(b).
  static SosWitness product(const SosWitness& a, const SosWitness& b);
  SosWitness substituted(const std::unordered_map<VarId, Polynomial>& images) const;

 private:
  void prune();
  std::vector<WeightedSquare> terms_;
};

// A = {q_1 >= 0, ...} united with {r_1 = 0, ...}, stored canonically with
// deduplicating union.
class AxiomSet {
 public:
  size_t add_ineq(Polynomial q);  // returns index; dedups by canonical form
  size_t add_eq(Polynomial r);
  std::optional<size_t> find_ineq(const Polynomial& q) const;
  std::optional<size_t> find_eq(const Polynomial& r) const;

  const std::vector<Polynomial>& ineqs() const { return ineqs_; }
  const std::vector<Polynomial>& eqs() const { return eqs_; }
  bool empty() const { return ineqs_.empty() && eqs_.empty(); }

 private:
  std::vector<Polynomial> ineqs_, eqs_;
};

// A statement "A |-_k p >= 0" together with its explicit decomposition
//   p = u0 + sum_i u_i q_i + sum_j v_j r_j
// with SOS u's, unrestricted-sign polynomials v_j, and per-summand degree <= k.
struct Claim {
  RegistryPtr reg;
  AxiomSet axioms;
  Polynomial conclusion;
  int degree = 0;
  SosWitness u0;
  std::vector<SosWitness> ineq_mult;  // parallel to axioms.ineqs()
  std::vector<Polynomial> eq_mult;    // parallel to axioms.eqs()

  SosWitness& mult_for_ineq(size_t idx);
  Polynomial& mult_for_eq(size_t idx);
  // Ensures multiplier vectors match axiom counts (fills with empties).
  void sync_multipliers();
};

struct VerifyReport {
  bool ok = false;
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

// Exact verification: decomposition identity holds, weights are nonnegative,
// and every summand respects the degree bound.
VerifyReport verify_claim(const Claim& c);

// Fact 2.2: A union A' |-_max(k,k') p + p' >= 0.
Claim combine_sum(const Claim& a, const Claim& b);
// Scaling by a nonnegative constant (degree unchanged).
Claim claim_scale(const Claim& c, const FieldElem& lambda);
// Adds a nonnegative constant gamma to the conclusion.
Claim claim_add_nonneg_const(const Claim& c, const FieldElem& gamma);

// Fact 2.3: inline base claims proving the top claim's inequality axioms.
// Top inequality axioms without a matching base are kept as axioms.
Claim compose(const std::vector<Claim>& bases, const Claim& top);

// Fact 2.4: A union A' union (A.A') |-_{k+k'} p p' >= 0, pairwise products of
// inequality axioms added as axioms.
Claim combine_product(const Claim& a, const Claim& b);

// Substitutes variables everywhere (conclusion, axioms, decomposition); the
// identity is preserved. Axioms are substituted images.
Claim claim_substitute(const Claim& c, const std::unordered_map<VarId, Polynomial>& images);

// Derivation DAG: claims with the combinator that produced each node.
class Derivation {
 public:
  size_t add_leaf(Claim c, const std::string& rule = "leaf");
  size_t add(Claim c, const std::string& rule, std::vector<size_t> parents);
  const Claim& claim(size_t idx) const { return nodes_.at(idx).claim; }
  size_t size() const { return nodes_.size(); }
  // Re-verifies every node; returns first failing index or nullopt.
  std::optional<size_t> verify_all() const;

 private:
  struct Node {
    Claim claim;
    std::string rule;
    std::vector<size_t> parents;
  };
  std::vector<Node> nodes_;
};

}  // namespace sos
