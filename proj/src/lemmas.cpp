#include "soskit/lemmas.hpp"

#include <stdexcept>

namespace sos {

bool EqIdentity::check(const RegistryPtr& reg) const {
  PolyAccum acc(reg);
  acc.add(lhs);
  for (auto& [m, ax] : parts) acc.add_product(m, ax, FieldElem(-1));
  return acc.take().is_zero();
}

namespace lemmas {

namespace {

Polynomial one_minus(const Polynomial& p) {
  return Polynomial::constant(p.registry(), FieldElem(1)) - p;
}
Polynomial one_plus(const Polynomial& p) {
  return Polynomial::constant(p.registry(), FieldElem(1)) + p;
}

}  // namespace

Claim fact33_upper(const Polynomial& y) {
  Claim c;
  c.reg = y.registry();
  c.degree = 2 * std::max(1, y.degree());
  c.conclusion = one_minus(y);
  c.u0 = SosWitness::square(one_minus(y), FieldElem(rat(1, 2)));
  size_t ax = c.axioms.add_ineq(one_minus(y * y));
  c.sync_multipliers();
  c.ineq_mult[ax] = SosWitness::constant(c.reg, FieldElem(rat(1, 2)));
  return c;
}

Claim fact33_lower(const Polynomial& y) { return fact33_upper(-y); }

Claim fact34(const Polynomial& y) {
  Claim c;
  c.reg = y.registry();
  c.degree = 3 * std::max(1, y.degree());
  c.conclusion = one_minus(y * y);
  size_t a1 = c.axioms.add_ineq(one_minus(y));
  size_t a2 = c.axioms.add_ineq(one_plus(y));
  c.sync_multipliers();
  c.ineq_mult[a1] = SosWitness::square(one_plus(y), FieldElem(rat(1, 2)));
  c.ineq_mult[a2] = SosWitness::square(one_minus(y), FieldElem(rat(1, 2)));
  return c;
}

EqIdentity fact35(const Polynomial& y, const Polynomial& z) {
  auto reg = y.registry();
  FieldElem half(rat(1, 2));
  Polynomial d = (y - z).scale(half);
  EqIdentity id;
  id.lhs = d - d * d * d;
  // (3/8 Z - 1/8 Y)(Y^2-1) + (1/8 Z - 3/8 Y)(Z^2-1)
  Polynomial m1 = z.scale(FieldElem(rat(3, 8))) - y.scale(FieldElem(rat(1, 8)));
  Polynomial m2 = z.scale(FieldElem(rat(1, 8))) - y.scale(FieldElem(rat(3, 8)));
  id.parts.emplace_back(m1, y * y - Polynomial::constant(reg, FieldElem(1)));
  id.parts.emplace_back(m2, z * z - Polynomial::constant(reg, FieldElem(1)));
  return id;
}

Claim fact36(const Polynomial& y, const Polynomial& z, const Polynomial& w) {
  Claim c;
  c.reg = y.registry();
  c.conclusion = z - y * w;
  Polynomial zmw = z - w, zpw = z + w;
  Polynomial opy = one_plus(y), omy = one_minus(y);
  c.degree = std::max(zmw.degree() + opy.degree(), zpw.degree() + omy.degree());
  c.axioms.add_ineq(zmw);
  c.axioms.add_ineq(zpw);
  c.axioms.add_ineq(opy);
  c.axioms.add_ineq(omy);
  size_t p1 = c.axioms.add_ineq(zmw * opy);
  size_t p2 = c.axioms.add_ineq(zpw * omy);
  c.sync_multipliers();
  c.ineq_mult[p1] = SosWitness::constant(c.reg, FieldElem(rat(1, 2)));
  c.ineq_mult[p2] = SosWitness::constant(c.reg, FieldElem(rat(1, 2)));
  return c;
}

Claim fact37(const Polynomial& yp, const Polynomial& y, const Polynomial& zp,
             const Polynomial& z) {
  Claim c;
  c.reg = y.registry();
  c.conclusion = yp * zp - y * z;
  Polynomial dy = yp - y, dz = zp - z;
  c.degree = std::max(yp.degree() + dz.degree(), z.degree() + dy.degree());
  c.axioms.add_ineq(dy);
  c.axioms.add_ineq(dz);
  c.axioms.add_ineq(yp);
  c.axioms.add_ineq(z);
  size_t p1 = c.axioms.add_ineq(yp * dz);
  size_t p2 = c.axioms.add_ineq(z * dy);
  c.sync_multipliers();
  c.ineq_mult[p1] = SosWitness::constant(c.reg, FieldElem(1));
  c.ineq_mult[p2] = SosWitness::constant(c.reg, FieldElem(1));
  return c;
}

Claim fact39(const Polynomial& y, const Polynomial& z, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("fact39: eps must be positive");
  Claim c;
  c.reg = y.registry();
  FieldElem e{eps};
  c.conclusion = (y * y).scale(e * FieldElem(rat(1, 2))) +
                 (z * z).scale(FieldElem(rat(1, 2)) / e) - y * z;
  // eps/2 (Y - Z/eps)^2
  c.u0 = SosWitness::square(y - z.scale(e.inverse()), e * FieldElem(rat(1, 2)));
  c.degree = c.u0.degree();
  return c;
}

Claim fact311(const Polynomial& y, const Polynomial& z, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("fact311: eps must be positive");
  Claim c;
  c.reg = y.registry();
  FieldElem e{eps};
  Polynomial y2 = y * y, z2 = z * z;
  c.conclusion = (y2 * y2).scale(e * FieldElem(rat(3, 4))) +
                 (z2 * z2).scale(FieldElem(rat(1, 4)) / e.pow(3)) - y2 * y * z;
  // eps/2 (Y(Y - Z/eps))^2 + eps/4 (Y^2 - Z^2/eps^2)^2
  c.u0 = SosWitness::square(y * (y - z.scale(e.inverse())), e * FieldElem(rat(1, 2)));
  c.u0.append_square(e * FieldElem(rat(1, 4)), y2 - z2.scale(e.pow(2).inverse()));
  c.degree = c.u0.degree();
  return c;
}

Claim fact312(const Polynomial& y, const Polynomial& z) {
  Claim c;
  c.reg = y.registry();
  c.conclusion = z * z - y * y;
  Polynomial d = z - y;
  c.degree = 2 * std::max(y.degree(), z.degree());
  c.axioms.add_ineq(y);
  c.axioms.add_ineq(d);
  size_t pr = c.axioms.add_ineq(y * d);
  c.sync_multipliers();
  c.ineq_mult[pr] = SosWitness::constant(c.reg, FieldElem(2));
  c.u0 = SosWitness::square(d);
  return c;
}

Claim fact313(const std::vector<Polynomial>& xs, const std::vector<Rational>& weights) {
  if (xs.empty()) throw std::invalid_argument("fact313: empty family");
  auto reg = xs[0].registry();
  size_t n = xs.size();
  std::vector<Rational> w = weights;
  if (w.empty()) w.assign(n, Rational(1, long(n)));
  if (w.size() != n) throw std::invalid_argument("fact313: weight count mismatch");
  Rational total(0);
  for (auto& wi : w) {
    if (wi < 0) throw std::invalid_argument("fact313: negative weight");
    total += wi;
  }
  if (total != 1) throw std::invalid_argument("fact313: weights must sum to 1");
  Claim c;
  c.reg = reg;
  PolyAccum concl(reg);
  PolyAccum mean(reg);
  for (size_t i = 0; i < n; ++i) {
    concl.add_product(xs[i], xs[i], FieldElem(w[i]));
    mean.add(xs[i], FieldElem(w[i]));
  }
  Polynomial m = mean.take();
  PolyAccum c2(reg);
  c2.add(concl.take());
  c2.add_product(m, m, FieldElem(-1));
  c.conclusion = c2.take();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      c.u0.append_square(FieldElem(w[i] * w[j]), xs[i] - xs[j]);
  c.degree = std::max(2, c.u0.degree());
  return c;
}

Claim prop27(const Polynomial& y, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("prop27: eps must be positive");
  auto reg = y.registry();
  Rational cval = 1 - eps;
  Polynomial y2 = y * y, y4 = y * y * y * y;
  Polynomial one = Polynomial::constant(reg, FieldElem(1));
  Claim c;
  c.reg = reg;
  c.degree = 4 * std::max(1, y.degree());
  c.conclusion = Polynomial::constant(reg, FieldElem(-1));
  size_t ax_quartic = c.axioms.add_ineq(y4 - one);                                  // Y^4 >= 1
  size_t ax_sq = c.axioms.add_ineq(Polynomial::constant(reg, FieldElem(cval)) - y2);  // Y^2 <= c
  c.sync_multipliers();
  if (cval > 0) {
    // -1 = 1/(1-c^2) (c + Y^2)(c - Y^2) + 1/(1-c^2) (Y^4 - 1)
    FieldElem inv{Rational(1) / (1 - cval * cval)};
    c.ineq_mult[ax_quartic] = SosWitness::constant(reg, inv);
    SosWitness m;
    m.append_square(inv * FieldElem(cval), one);
    m.append_square(inv, y);
    c.ineq_mult[ax_sq] = m;
  } else {
    // Reader case eps >= 1 (c <= 0): -1 = (Y^4 - 1) + Y^2 (c - Y^2) + (-c) Y^2.
    c.ineq_mult[ax_quartic] = SosWitness::constant(reg, FieldElem(1));
    c.ineq_mult[ax_sq] = SosWitness::square(y);
    c.u0 = SosWitness::square(y, FieldElem(-cval));
  }
  return c;
}

}  // namespace lemmas

Claim instantiate_lemma(const std::string& name, const std::map<std::string, Rational>& params,
                        const RegistryPtr& reg) {
  auto var = [&](const char* nm) { return Polynomial::var(reg, reg->scalar(nm)); };
  auto eps = [&]() -> Rational {
    auto it = params.find("eps");
    return it == params.end() ? Rational(1) : it->second;
  };
  if (name == "fact3.3") return lemmas::fact33_upper(var("Y"));
  if (name == "fact3.4") return lemmas::fact34(var("Y"));
  if (name == "fact3.5") {
    // Packaged as the claim "d - d^3 - (multiplier combination) == 0 >= 0":
    // expose the identity as a degree-3 claim with zero conclusion residual.
    EqIdentity id = lemmas::fact35(var("Y"), var("Z"));
    if (!id.check(reg)) throw std::logic_error("fact3.5 identity failed");
    Claim c;
    c.reg = reg;
    c.degree = 3;
    c.conclusion = id.lhs;
    for (auto& [m, ax] : id.parts) {
      size_t idx = c.axioms.add_eq(ax);
      c.sync_multipliers();
      c.eq_mult[idx] += m;
    }
    return c;
  }
  if (name == "fact3.6") return lemmas::fact36(var("Y"), var("Z"), var("W"));
  if (name == "fact3.7") return lemmas::fact37(var("Yp"), var("Y"), var("Zp"), var("Z"));
  if (name == "fact3.8") return lemmas::fact38(var("Y"), var("Z"));
  if (name == "fact3.9") return lemmas::fact39(var("Y"), var("Z"), eps());
  if (name == "fact3.10") return lemmas::fact310(var("Y"), var("Z"));
  if (name == "fact3.11") return lemmas::fact311(var("Y"), var("Z"), eps());
  if (name == "fact3.12") return lemmas::fact312(var("Y"), var("Z"));
  if (name == "fact3.13") {
    long n = 2;
    if (auto it = params.find("n"); it != params.end()) n = it->second.get_num().get_si();
    if (n < 1) throw std::invalid_argument("fact3.13: n must be >= 1");
    std::vector<Polynomial> xs;
    for (long i = 1; i <= n; ++i)
      xs.push_back(Polynomial::var(reg, reg->scalar("X" + std::to_string(i))));
    return lemmas::fact313(xs);
  }
  if (name == "prop2.7") {
    auto it = params.find("eps");
    return lemmas::prop27(var("Y"), it == params.end() ? Rational(1, 2) : it->second);
  }
  throw std::invalid_argument("unknown lemma: " + name);
}

std::vector<std::string> lemma_names() {
  return {"fact3.3", "fact3.4", "fact3.5", "fact3.6",  "fact3.7",  "fact3.8",
          "fact3.9", "fact3.10", "fact3.11", "fact3.12", "fact3.13", "prop2.7"};
}

}  // namespace sos
