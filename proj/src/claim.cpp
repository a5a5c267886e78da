#include "soskit/claim.hpp"

#include <algorithm>
#include <stdexcept>

namespace sos {

SosWitness SosWitness::constant(const RegistryPtr& reg, const FieldElem& c,
                                const std::string& label) {
  SosWitness w;
  w.append_square(c, Polynomial::constant(reg, FieldElem(1)), label);
  return w;
}

SosWitness SosWitness::square(Polynomial root, FieldElem weight, const std::string& label) {
  SosWitness w;
  w.append_square(std::move(weight), std::move(root), label);
  return w;
}

void SosWitness::append(const SosWitness& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
}

void SosWitness::append_square(FieldElem weight, Polynomial root, const std::string& label) {
  if (weight.is_zero() || root.is_zero()) return;
  terms_.push_back(WeightedSquare{std::move(weight), std::move(root), label});
}

SosWitness SosWitness::scaled(const FieldElem& c) const {
  if (c.sign() < 0) throw std::invalid_argument("SosWitness: negative scale");
  SosWitness w;
  if (c.is_zero()) return w;
  w.terms_ = terms_;
  for (auto& t : w.terms_) t.weight *= c;
  return w;
}

Polynomial SosWitness::value(const RegistryPtr& reg) const {
  PolyAccum acc(reg);
  add_value_into(acc);
  return acc.take();
}

void SosWitness::add_value_into(PolyAccum& acc, const FieldElem& scale) const {
  for (auto& t : terms_) acc.add_product(t.root, t.root, t.weight * scale);
}

int SosWitness::degree() const {
  int d = 0;
  for (auto& t : terms_) d = std::max(d, 2 * t.root.degree());
  return d;
}

bool SosWitness::weights_nonneg() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const WeightedSquare& t) { return t.weight.is_nonneg(); });
}

SosWitness SosWitness::product(const SosWitness& a, const SosWitness& b) {
  SosWitness w;
  w.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (auto& x : a.terms_)
    for (auto& y : b.terms_)
      w.append_square(x.weight * y.weight, x.root * y.root,
                      x.label.empty() ? y.label : x.label);
  return w;
}

SosWitness SosWitness::substituted(const std::unordered_map<VarId, Polynomial>& images) const {
  SosWitness w;
  for (auto& t : terms_) w.append_square(t.weight, t.root.substitute(images), t.label);
  return w;
}

void SosWitness::prune() {
  terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                              [](const WeightedSquare& t) {
                                return t.weight.is_zero() || t.root.is_zero();
                              }),
               terms_.end());
}

size_t AxiomSet::add_ineq(Polynomial q) {
  if (auto idx = find_ineq(q)) return *idx;
  ineqs_.push_back(std::move(q));
  return ineqs_.size() - 1;
}

size_t AxiomSet::add_eq(Polynomial r) {
  if (auto idx = find_eq(r)) return *idx;
  eqs_.push_back(std::move(r));
  return eqs_.size() - 1;
}

std::optional<size_t> AxiomSet::find_ineq(const Polynomial& q) const {
  for (size_t i = 0; i < ineqs_.size(); ++i)
    if (ineqs_[i] == q) return i;
  return std::nullopt;
}

std::optional<size_t> AxiomSet::find_eq(const Polynomial& r) const {
  for (size_t i = 0; i < eqs_.size(); ++i)
    if (eqs_[i] == r) return i;
  return std::nullopt;
}

SosWitness& Claim::mult_for_ineq(size_t idx) {
  sync_multipliers();
  return ineq_mult.at(idx);
}

Polynomial& Claim::mult_for_eq(size_t idx) {
  sync_multipliers();
  return eq_mult.at(idx);
}

void Claim::sync_multipliers() {
  ineq_mult.resize(axioms.ineqs().size());
  while (eq_mult.size() < axioms.eqs().size()) eq_mult.emplace_back(Polynomial(reg));
}

VerifyReport verify_claim(const Claim& c) {
  Claim& mut = const_cast<Claim&>(c);
  mut.sync_multipliers();
  if (!c.u0.weights_nonneg()) return {false, "u0 has a negative weight"};
  if (c.u0.degree() > c.degree)
    return {false, "deg(u0) = " + std::to_string(c.u0.degree()) + " exceeds bound " +
                       std::to_string(c.degree)};
  for (size_t i = 0; i < c.axioms.ineqs().size(); ++i) {
    if (!c.ineq_mult[i].weights_nonneg())
      return {false, "multiplier for inequality axiom " + std::to_string(i) +
                         " has a negative weight"};
    if (c.ineq_mult[i].empty()) continue;
    int d = c.ineq_mult[i].degree() + c.axioms.ineqs()[i].degree();
    if (d > c.degree)
      return {false, "deg(u_" + std::to_string(i) + " q_" + std::to_string(i) + ") = " +
                         std::to_string(d) + " exceeds bound " + std::to_string(c.degree)};
  }
  for (size_t j = 0; j < c.axioms.eqs().size(); ++j) {
    if (c.eq_mult[j].is_zero()) continue;
    int d = c.eq_mult[j].degree() + c.axioms.eqs()[j].degree();
    if (d > c.degree)
      return {false, "deg(v_" + std::to_string(j) + " r_" + std::to_string(j) + ") = " +
                         std::to_string(d) + " exceeds bound " + std::to_string(c.degree)};
  }
  PolyAccum acc(c.reg);
  acc.add(c.conclusion);
  c.u0.add_value_into(acc, FieldElem(-1));
  for (size_t i = 0; i < c.axioms.ineqs().size(); ++i) {
    if (c.ineq_mult[i].empty()) continue;
    Polynomial ui = c.ineq_mult[i].value(c.reg);
    acc.add_product(ui, c.axioms.ineqs()[i], FieldElem(-1));
  }
  for (size_t j = 0; j < c.axioms.eqs().size(); ++j) {
    if (c.eq_mult[j].is_zero()) continue;
    acc.add_product(c.eq_mult[j], c.axioms.eqs()[j], FieldElem(-1));
  }
  Polynomial residual = acc.take();
  if (!residual.is_zero()) {
    auto& t = residual.terms().front();
    return {false, "nonzero residual, first term (" + t.second.str() + ")*" +
                       t.first.str(*c.reg) + " of " + std::to_string(residual.term_count()) +
                       " terms"};
  }
  return {true, ""};
}

namespace {

// Maps axioms of `src` into `dst`, returning index maps.
void merge_axioms(const Claim& src, Claim& dst, std::vector<size_t>& ineq_map,
                  std::vector<size_t>& eq_map) {
  for (auto& q : src.axioms.ineqs()) ineq_map.push_back(dst.axioms.add_ineq(q));
  for (auto& r : src.axioms.eqs()) eq_map.push_back(dst.axioms.add_eq(r));
  dst.sync_multipliers();
}

}  // namespace

Claim combine_sum(const Claim& a, const Claim& b) {
  Claim out;
  out.reg = a.reg ? a.reg : b.reg;
  out.degree = std::max(a.degree, b.degree);
  out.conclusion = a.conclusion + b.conclusion;
  out.u0 = a.u0;
  out.u0.append(b.u0);
  std::vector<size_t> ia, ea, ib, eb;
  merge_axioms(a, out, ia, ea);
  merge_axioms(b, out, ib, eb);
  const_cast<Claim&>(a).sync_multipliers();
  const_cast<Claim&>(b).sync_multipliers();
  for (size_t i = 0; i < ia.size(); ++i) out.ineq_mult[ia[i]].append(a.ineq_mult[i]);
  for (size_t i = 0; i < ib.size(); ++i) out.ineq_mult[ib[i]].append(b.ineq_mult[i]);
  for (size_t j = 0; j < ea.size(); ++j) out.eq_mult[ea[j]] += a.eq_mult[j];
  for (size_t j = 0; j < eb.size(); ++j) out.eq_mult[eb[j]] += b.eq_mult[j];
  return out;
}

Claim claim_scale(const Claim& c, const FieldElem& lambda) {
  if (lambda.sign() < 0) throw std::invalid_argument("claim_scale: negative scale");
  Claim out = c;
  out.sync_multipliers();
  out.conclusion = c.conclusion.scale(lambda);
  out.u0 = c.u0.scaled(lambda);
  for (auto& w : out.ineq_mult) w = w.scaled(lambda);
  for (auto& v : out.eq_mult) v = v.scale(lambda);
  return out;
}

Claim claim_add_nonneg_const(const Claim& c, const FieldElem& gamma) {
  if (gamma.sign() < 0) throw std::invalid_argument("claim_add_nonneg_const: negative constant");
  Claim out = c;
  out.conclusion = c.conclusion + Polynomial::constant(c.reg, gamma);
  out.u0.append_square(gamma, Polynomial::constant(c.reg, FieldElem(1)));
  return out;
}

Claim compose(const std::vector<Claim>& bases, const Claim& top) {
  Claim out;
  out.reg = top.reg;
  out.conclusion = top.conclusion;
  out.u0 = top.u0;
  const_cast<Claim&>(top).sync_multipliers();

  int max_base_degree = 0;
  std::vector<int> base_for_axiom(top.axioms.ineqs().size(), -1);
  for (size_t i = 0; i < top.axioms.ineqs().size(); ++i) {
    for (size_t b = 0; b < bases.size(); ++b) {
      if (bases[b].conclusion == top.axioms.ineqs()[i]) {
        base_for_axiom[i] = static_cast<int>(b);
        break;
      }
    }
  }

  // Unmatched top inequality axioms and all top equality axioms survive.
  std::vector<size_t> kept_ineq(top.axioms.ineqs().size(), SIZE_MAX);
  for (size_t i = 0; i < top.axioms.ineqs().size(); ++i) {
    if (base_for_axiom[i] < 0) kept_ineq[i] = out.axioms.add_ineq(top.axioms.ineqs()[i]);
  }
  std::vector<size_t> kept_eq;
  for (auto& r : top.axioms.eqs()) kept_eq.push_back(out.axioms.add_eq(r));
  out.sync_multipliers();
  for (size_t i = 0; i < top.axioms.ineqs().size(); ++i)
    if (kept_ineq[i] != SIZE_MAX) out.ineq_mult[kept_ineq[i]].append(top.ineq_mult[i]);
  for (size_t j = 0; j < top.axioms.eqs().size(); ++j)
    out.eq_mult[kept_eq[j]] += top.eq_mult[j];

  for (size_t i = 0; i < top.axioms.ineqs().size(); ++i) {
    if (base_for_axiom[i] < 0) continue;
    const Claim& base = bases[base_for_axiom[i]];
    const_cast<Claim&>(base).sync_multipliers();
    max_base_degree = std::max(max_base_degree, base.degree);
    const SosWitness& u_top = top.ineq_mult[i];
    if (u_top.empty()) continue;
    // u_top * (u0_base + sum u_a q_a + sum v_b r_b)
    out.u0.append(SosWitness::product(u_top, base.u0));
    Polynomial u_top_val = u_top.value(out.reg);
    std::vector<size_t> imap, emap;
    Claim tmp;  // reuse merge helper on the base axiom set
    for (size_t a = 0; a < base.axioms.ineqs().size(); ++a) {
      if (base.ineq_mult[a].empty()) continue;
      size_t idx = out.axioms.add_ineq(base.axioms.ineqs()[a]);
      out.sync_multipliers();
      out.ineq_mult[idx].append(SosWitness::product(u_top, base.ineq_mult[a]));
    }
    for (size_t b = 0; b < base.axioms.eqs().size(); ++b) {
      if (base.eq_mult[b].is_zero()) continue;
      size_t idx = out.axioms.add_eq(base.axioms.eqs()[b]);
      out.sync_multipliers();
      out.eq_mult[idx] += u_top_val * base.eq_mult[b];
    }
  }
  out.degree = top.degree + max_base_degree;
  return out;
}

Claim combine_product(const Claim& a, const Claim& b) {
  const_cast<Claim&>(a).sync_multipliers();
  const_cast<Claim&>(b).sync_multipliers();
  Claim out;
  out.reg = a.reg ? a.reg : b.reg;
  out.degree = a.degree + b.degree;
  out.conclusion = a.conclusion * b.conclusion;

  // p = U + V with U = u0 + sum u_i q_i, V = sum v_j r_j; likewise p' = U' + V'.
  // p p' = [u0 u0' + sum_i (u_i u0') q_i + sum_j (u0 u'_j) q'_j
  //         + sum_{i,j} (u_i u'_j) (q_i q'_j)]  +  V p' + U V'.
  out.u0 = SosWitness::product(a.u0, b.u0);

  PolyAccum ua(a.reg);
  a.u0.add_value_into(ua);
  for (size_t i = 0; i < a.axioms.ineqs().size(); ++i)
    if (!a.ineq_mult[i].empty())
      ua.add_product(a.ineq_mult[i].value(a.reg), a.axioms.ineqs()[i]);
  Polynomial U = ua.take();

  for (size_t i = 0; i < a.axioms.ineqs().size(); ++i) {
    if (a.ineq_mult[i].empty()) continue;
    size_t idx = out.axioms.add_ineq(a.axioms.ineqs()[i]);
    out.sync_multipliers();
    out.ineq_mult[idx].append(SosWitness::product(a.ineq_mult[i], b.u0));
  }
  for (size_t j = 0; j < b.axioms.ineqs().size(); ++j) {
    if (b.ineq_mult[j].empty()) continue;
    size_t idx = out.axioms.add_ineq(b.axioms.ineqs()[j]);
    out.sync_multipliers();
    out.ineq_mult[idx].append(SosWitness::product(a.u0, b.ineq_mult[j]));
  }
  for (size_t i = 0; i < a.axioms.ineqs().size(); ++i) {
    if (a.ineq_mult[i].empty()) continue;
    for (size_t j = 0; j < b.axioms.ineqs().size(); ++j) {
      if (b.ineq_mult[j].empty()) continue;
      Polynomial prod_axiom = a.axioms.ineqs()[i] * b.axioms.ineqs()[j];
      size_t idx = out.axioms.add_ineq(prod_axiom);
      out.sync_multipliers();
      out.ineq_mult[idx].append(SosWitness::product(a.ineq_mult[i], b.ineq_mult[j]));
    }
  }
  // Equality parts: V p' lands on a's equalities, U V' on b's.
  for (size_t j = 0; j < a.axioms.eqs().size(); ++j) {
    if (a.eq_mult[j].is_zero()) continue;
    size_t idx = out.axioms.add_eq(a.axioms.eqs()[j]);
    out.sync_multipliers();
    out.eq_mult[idx] += a.eq_mult[j] * b.conclusion;
  }
  for (size_t j = 0; j < b.axioms.eqs().size(); ++j) {
    if (b.eq_mult[j].is_zero()) continue;
    size_t idx = out.axioms.add_eq(b.axioms.eqs()[j]);
    out.sync_multipliers();
    out.eq_mult[idx] += U * b.eq_mult[j];
  }
  // Also keep non-multiplied axioms visible in the set (harmless, informative).
  for (auto& q : a.axioms.ineqs()) out.axioms.add_ineq(q);
  for (auto& q : b.axioms.ineqs()) out.axioms.add_ineq(q);
  out.sync_multipliers();
  return out;
}

Claim claim_substitute(const Claim& c, const std::unordered_map<VarId, Polynomial>& images) {
  const_cast<Claim&>(c).sync_multipliers();
  Claim out;
  out.reg = c.reg;
  for (auto& [v, img] : images)
    if (img.registry()) {
      out.reg = img.registry();
      break;
    }
  out.degree = c.degree;
  out.conclusion = c.conclusion.substitute(images);
  out.u0 = c.u0.substituted(images);
  for (size_t i = 0; i < c.axioms.ineqs().size(); ++i) {
    Polynomial q = c.axioms.ineqs()[i].substitute(images);
    if (q.is_zero()) continue;  // axiom collapsed; multiplier term vanishes
    size_t idx = out.axioms.add_ineq(std::move(q));
    out.sync_multipliers();
    out.ineq_mult[idx].append(c.ineq_mult[i].substituted(images));
  }
  for (size_t j = 0; j < c.axioms.eqs().size(); ++j) {
    Polynomial r = c.axioms.eqs()[j].substitute(images);
    if (r.is_zero()) continue;
    size_t idx = out.axioms.add_eq(std::move(r));
    out.sync_multipliers();
    out.eq_mult[idx] += c.eq_mult[j].substitute(images);
  }
  return out;
}

size_t Derivation::add_leaf(Claim c, const std::string& rule) {
  nodes_.push_back(Node{std::move(c), rule, {}});
  return nodes_.size() - 1;
}

size_t Derivation::add(Claim c, const std::string& rule, std::vector<size_t> parents) {
  for (size_t p : parents)
    if (p >= nodes_.size()) throw std::out_of_range("Derivation: bad parent");
  nodes_.push_back(Node{std::move(c), rule, std::move(parents)});
  return nodes_.size() - 1;
}

std::optional<size_t> Derivation::verify_all() const {
  for (size_t i = 0; i < nodes_.size(); ++i)
    if (!verify_claim(nodes_[i].claim)) return i;
  return std::nullopt;
}

}  // namespace sos
