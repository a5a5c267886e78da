#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "soskit/field.hpp"

namespace sos {

using VarId = uint32_t;

enum class VarRole : uint8_t { Scalar, PointValue, FourierCoeff, UGVar };

struct VarInfo {
  VarRole role;
  std::string name;  // unique display name, stable across serialization
};

// Ordered families of indeterminates. Ids are assigned in creation order and
// are stable under save/load (files store the registry block in id order).
class VarRegistry {
 public:
  VarId scalar(const std::string& name) { return intern(VarRole::Scalar, name); }
  VarId point_value(const std::string& fn, uint32_t x_mask) {
    return intern(VarRole::PointValue, fn + "@" + std::to_string(x_mask));
  }
  VarId fourier_coeff(const std::string& fn, uint32_t s_mask) {
    return intern(VarRole::FourierCoeff, fn + "^" + std::to_string(s_mask));
  }
  VarId ug_var(const std::string& u, int label) {
    return intern(VarRole::UGVar, "X[" + u + "," + std::to_string(label) + "]");
  }
  VarId intern(VarRole role, const std::string& name);

  std::optional<VarId> find(const std::string& name) const;
  const VarInfo& info(VarId v) const { return vars_.at(v); }
  const std::string& name(VarId v) const { return vars_.at(v).name; }
  size_t size() const { return vars_.size(); }

 private:
  std::vector<VarInfo> vars_;
  std::unordered_map<std::string, VarId> by_name_;
};

using RegistryPtr = std::shared_ptr<VarRegistry>;

inline RegistryPtr make_registry() { return std::make_shared<VarRegistry>(); }

// Power product: sorted (var, exponent) pairs, exponents positive.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(VarId v, uint32_t e = 1) {
    if (e) factors_.emplace_back(v, e);
  }
  static Monomial from_factors(std::vector<std::pair<VarId, uint32_t>> f);

  bool is_one() const { return factors_.empty(); }
  uint32_t degree() const;
  uint32_t exponent(VarId v) const;
  const std::vector<std::pair<VarId, uint32_t>>& factors() const { return factors_; }

  Monomial operator*(const Monomial& o) const;
  Monomial pow(uint32_t e) const;

  // Graded lexicographic order over variable ids.
  bool operator<(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return factors_ == o.factors_; }
  bool operator!=(const Monomial& o) const { return !(*this == o); }

  size_t hash() const;
  std::string str(const VarRegistry& reg) const;

 private:
  std::vector<std::pair<VarId, uint32_t>> factors_;
};

struct MonomialHash {
  size_t operator()(const Monomial& m) const { return m.hash(); }
};

// Sparse exact-coefficient multivariate polynomial over Q[sqrt3].
// Terms are kept sorted by graded-lex monomial order with nonzero coefficients,
// which fixes a canonical form. Values are immutable in spirit: all operations
// return new polynomials.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(RegistryPtr reg) : reg_(std::move(reg)) {}
  Polynomial(RegistryPtr reg, const FieldElem& c);

  static Polynomial var(const RegistryPtr& reg, VarId v);
  static Polynomial constant(const RegistryPtr& reg, const FieldElem& c) {
    return Polynomial(reg, c);
  }

  const RegistryPtr& registry() const { return reg_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
  FieldElem constant_term() const;
  size_t term_count() const { return terms_.size(); }
  int degree() const;  // -1 for the zero polynomial
  const std::vector<std::pair<Monomial, FieldElem>>& terms() const { return terms_; }

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial scale(const FieldElem& c) const;
  Polynomial pow(uint32_t e) const;

  // Exact composition; in strict mode every variable of *this must be mapped.
  Polynomial substitute(const std::unordered_map<VarId, Polynomial>& images,
                        bool strict = false) const;

  FieldElem eval(const std::unordered_map<VarId, FieldElem>& point) const;
  double eval_double(const std::unordered_map<VarId, double>& point) const;

  std::vector<VarId> variables() const;

  // Canonical text form, terms in descending graded-lex order.
  std::string str() const;
  static Polynomial parse(const RegistryPtr& reg, const std::string& text);

  size_t hash() const;

  // Internal: adopt a coefficient map (normalizes).
  static Polynomial from_map(RegistryPtr reg,
                             std::unordered_map<Monomial, FieldElem, MonomialHash>&& m);

 private:
  void check_same_registry(const Polynomial& o) const;

  RegistryPtr reg_;
  std::vector<std::pair<Monomial, FieldElem>> terms_;
};

// Accumulator for building large sums/products without intermediate copies.
class PolyAccum {
 public:
  explicit PolyAccum(RegistryPtr reg) : reg_(std::move(reg)) {}
  void add(const Polynomial& p, const FieldElem& scale = FieldElem(1));
  // Adds scale * a * b.
  void add_product(const Polynomial& a, const Polynomial& b,
                   const FieldElem& scale = FieldElem(1));
  Polynomial take();
  bool is_zero_so_far() const;

 private:
  RegistryPtr reg_;
  std::unordered_map<Monomial, FieldElem, MonomialHash> acc_;
};

}  // namespace sos
