#include "soskit/kkl.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace sos {

void tighten_degree(Claim& c) {
  c.sync_multipliers();
  int d = std::max(0, std::max(c.u0.degree(), c.conclusion.degree()));
  for (size_t i = 0; i < c.axioms.ineqs().size(); ++i)
    if (!c.ineq_mult[i].empty())
      d = std::max(d, c.ineq_mult[i].degree() + c.axioms.ineqs()[i].degree());
  for (size_t j = 0; j < c.axioms.eqs().size(); ++j)
    if (!c.eq_mult[j].is_zero())
      d = std::max(d, c.eq_mult[j].degree() + c.axioms.eqs()[j].degree());
  c.degree = std::min(c.degree, d);
}

SosWitness influence_witness(const CubeFunction& f, int i) {
  CubeFunction fp = f.to_points();
  SosWitness w;
  FieldElem weight(Rational(1, long(1) << f.n()));
  FieldElem half(rat(1, 2));
  for (uint32_t x = 0; x < (1u << f.n()); ++x) {
    if (x & (1u << i)) continue;  // one endpoint per edge, doubled weight
    Polynomial d = (fp.point(x) - fp.point(x | (1u << i))).scale(half);
    w.append_square(weight * FieldElem(2), d, "inf");
  }
  return w;
}

Claim build_sse(const CubeFunction& f, const Rational& eps, bool materialize) {
  if (eps <= 0) throw std::invalid_argument("build_sse: eps must be positive");
  CubeFunction fp = f.to_points();
  const RegistryPtr& reg = fp.registry();
  int n = fp.n();
  FieldElem inv_rt3 = FieldElem::inv_sqrt3_pow(1);
  CubeFunction tf = fp.noise(inv_rt3).to_points();
  FieldElem e{eps};
  FieldElem w(Rational(1, long(1) << n));
  FieldElem hc_scale = FieldElem(rat(1, 4)) / e.pow(3);

  Claim total;
  total.reg = reg;
  total.degree = 4;

  // Pointwise: (3 eps/4) Y^2 + (1/(4 eps^3)) Z^4 - Y Z
  //   = [Fact 3.11 SOS](Y, Z) + (Z - (3 eps/4) Y) (Y^3 - Y),
  // with Y = f(x), Z = (T_{1/sqrt3} f)(x), averaged over x. The Fact 3.11
  // squares are eps/2 (Y(Y - Z/eps))^2 + eps/4 (Y^2 - Z^2/eps^2)^2.
  PolyAccum concl(reg);
  for (uint32_t x = 0; x < (1u << n); ++x) {
    const Polynomial& y = fp.point(x);
    const Polynomial& z = tf.point(x);
    size_t eq = total.axioms.add_eq(y * y * y - y);
    total.sync_multipliers();
    total.u0.append_square(w * e * FieldElem(rat(1, 2)), y * (y - z.scale(e.inverse())));
    total.u0.append_square(w * e * FieldElem(rat(1, 4)),
                           y * y - (z * z).scale(e.pow(2).inverse()));
    total.eq_mult[eq] += (z - y.scale(e * FieldElem(rat(3, 4)))).scale(w);
    if (materialize) {
      concl.add_product(y, y, w * e * FieldElem(rat(3, 4)));
      Polynomial z2 = z * z;
      concl.add_product(z2, z2, w * hc_scale);
      concl.add_product(y, z, -w);
    }
  }

  // Theorem 4.4 single-function step, scaled by 1/(4 eps^3):
  //   E[f^2]^2 - E[(T f)^4] >= 0 over the Fourier coefficients of f.
  CubeFunction ff = fp.to_fourier();
  FourierMap fmap(ff.fourier_coeffs().begin(), ff.fourier_coeffs().end());
  HcContext ctx(reg, std::vector<MomentProfile>(n, MomentProfile::rademacher()));
  total.u0.append(hc4_pair_gap_witness(ctx, fmap, fmap).scaled(hc_scale));

  // Conclusion: the E[(T f)^4] contributions cancel between the pointwise sum
  // and the Theorem 4.4 gap, leaving E[f^2](3 eps/4 + E[f^2]/(4 eps^3)) - Stab.
  Polynomial e2 = fp.expectation_sq();
  Polynomial want = e2.scale(e * FieldElem(rat(3, 4))) + (e2 * e2).scale(hc_scale) -
                    fp.stability(inv_rt3);
  if (materialize) {
    Polynomial t = ctx.realize(fmap, true);
    Polynomial et4 = ctx.expect_poly(t * t * t * t);
    concl.add(e2 * e2, hc_scale);
    concl.add(et4, -hc_scale);
    if (concl.take() != want) throw std::logic_error("build_sse: conclusion shape mismatch");
  }
  total.conclusion = std::move(want);
  return total;
}

Claim build_sse(int n, const Rational& eps) {
  auto reg = make_registry();
  return build_sse(CubeFunction::atomic_points(reg, "f", n), eps);
}

namespace {

// Rewrites the SSE claim on D_i f so its cube-value equalities (D^3 - D = 0)
// are discharged through {f(x)^2 - 1 = 0} via Fact 3.5.
void inline_derivative_axioms(const Claim& sse, const CubeFunction& f, int i, Claim& out,
                              const FieldElem& scale) {
  const RegistryPtr& reg = f.registry();
  CubeFunction fp = f.to_points();
  CubeFunction d = fp.derivative(i);
  out.u0.append(sse.u0.scaled(scale));
  const_cast<Claim&>(sse).sync_multipliers();
  // Map each equality axiom of the SSE claim to its derivative point.
  for (size_t j = 0; j < sse.axioms.eqs().size(); ++j) {
    const Polynomial& v = sse.eq_mult[j];
    if (v.is_zero()) continue;
    // Identify which derivative point this axiom came from.
    bool matched = false;
    for (uint32_t y = 0; y < (1u << (d.n())) && !matched; ++y) {
      const Polynomial& dy = d.point(y);
      if (sse.axioms.eqs()[j] != dy * dy * dy - dy) continue;
      matched = true;
      uint32_t low = (1u << i) - 1;
      uint32_t x = (y & low) | ((y & ~low) << 1);
      const Polynomial& ypt = fp.point(x);              // f at coordinate i -> +1
      const Polynomial& zpt = fp.point(x | (1u << i));  // f at coordinate i -> -1
      EqIdentity id = lemmas::fact35(ypt, zpt);
      // D - D^3 = m1 (Y^2-1) + m2 (Z^2-1)  =>  D^3 - D = (-m1)(Y^2-1) + (-m2)(Z^2-1).
      for (auto& [m, ax] : id.parts) {
        size_t idx = out.axioms.add_eq(ax);
        out.sync_multipliers();
        out.eq_mult[idx] += (v * (-m)).scale(scale);
      }
    }
    if (!matched) throw std::logic_error("inline_derivative_axioms: unmatched axiom");
  }
}

FieldElem inv_sqrt3_int_pow(long e) {
  if (e < 0) return FieldElem::sqrt3_pow(static_cast<unsigned>(-e));
  return FieldElem::inv_sqrt3_pow(static_cast<unsigned>(e));
}

}  // namespace

Claim build_kkl(const CubeFunction& f, const Rational& eps, long K, const Polynomial& tau) {
  if (eps <= 0) throw std::invalid_argument("build_kkl: eps must be positive");
  if (K < 3 || K % 2 == 0)
    throw std::invalid_argument("build_kkl: exact mode needs odd integer K >= 3");
  CubeFunction fp = f.to_points();
  const RegistryPtr& reg = fp.registry();
  int n = fp.n();
  FieldElem e{eps};
  FieldElem inv4e3 = FieldElem(rat(1, 4)) / e.pow(3);

  Claim total;
  total.reg = reg;
  total.degree = 4;
  PolyAccum concl(reg);

  for (int i = 0; i < n; ++i) {
    CubeFunction di = fp.derivative(i);
    Claim sse = build_sse(di, eps, /*materialize=*/di.n() <= 4);
    inline_derivative_axioms(sse, fp, i, total, FieldElem(1));
    concl.add(sse.conclusion);

    // tau step: Inf_i (tau - Inf_i) / (4 eps^3) >= 0 via the SOS multiplier
    // Inf_i/(4 eps^3) on the axiom tau - Inf_i >= 0.
    Polynomial inf_i = fp.influence(i);
    size_t ax = total.axioms.add_ineq(tau - inf_i);
    total.sync_multipliers();
    SosWitness infw = influence_witness(fp, i).scaled(inv4e3);
    total.ineq_mult[ax].append(infw);
    concl.add((tau - inf_i) * inf_i, inv4e3);
  }

  // Spectral step: sum_S |S| (1/sqrt3)^{|S|-1} fhat(S)^2
  //   >= (K/sqrt3^{K-1}) Var[f] - (1/sqrt3^{K-1}) I[f],
  // realized termwise by the scalar family
  //   c_s = s (1/sqrt3)^{s-1} - K (1/sqrt3)^{K-1} + s (1/sqrt3)^{K-1} >= 0.
  FieldElem invK{Rational(1, K)};
  FieldElem rho_pow_K = inv_sqrt3_int_pow(K - 1);
  CubeFunction ff = fp.to_fourier();
  for (int s = 1; s <= n; ++s) {
    FieldElem c_s = FieldElem(Rational(s)) * inv_sqrt3_int_pow(s - 1) -
                    FieldElem(Rational(K)) * rho_pow_K + FieldElem(Rational(s)) * rho_pow_K;
    if (c_s.sign() < 0)
      throw std::logic_error("build_kkl: spectral scalar family failed at level " +
                             std::to_string(s));
  }
  for (auto& [mask, coef] : ff.fourier_coeffs()) {
    int s = std::popcount(mask);
    if (s == 0) continue;
    FieldElem c_s = FieldElem(Rational(s)) * inv_sqrt3_int_pow(s - 1) -
                    FieldElem(Rational(K)) * rho_pow_K + FieldElem(Rational(s)) * rho_pow_K;
    total.u0.append_square(c_s, coef, "spectral");
    concl.add_product(coef, coef, c_s);
  }

  total.conclusion = concl.take();

  // Shape check against the stated bound, after scaling by sqrt3^{K-1}/K >= 0.
  Claim scaled = claim_scale(total, rho_pow_K.inverse() * invK);
  Polynomial bound = fp.total_influence().scale(
      rho_pow_K.inverse() * invK * (e * FieldElem(rat(3, 4))) + invK);
  PolyAccum rhs(reg);
  rhs.add(bound);
  rhs.add_product(tau * fp.total_influence(), Polynomial(reg, FieldElem(1)),
                  rho_pow_K.inverse() * invK * inv4e3);
  rhs.add(fp.variance(), FieldElem(-1));
  if (scaled.conclusion != rhs.take())
    throw std::logic_error("build_kkl: conclusion shape mismatch");
  tighten_degree(scaled);
  return scaled;
}

Claim build_kkl(const KklParams& params) {
  auto reg = make_registry();
  Polynomial tau = Polynomial::var(reg, reg->scalar("tau"));
  return build_kkl(CubeFunction::atomic_points(reg, "f", params.n), params.eps, params.K, tau);
}

KklRefutation build_kkl_refutation_symbolic(const CubeFunction& f, const Rational& eps, long K,
                                            std::optional<Rational> influence_bound) {
  CubeFunction fp = f.to_points();
  const RegistryPtr& reg = fp.registry();
  int n = fp.n();
  if (n % 2 != 0)
    throw std::invalid_argument("build_kkl_refutation_symbolic: two-block form needs even n");

  // Influence-bound default: rational lower approximation of (1/20) ln n.
  Rational B;
  if (influence_bound) {
    B = *influence_bound;
  } else {
    double v = std::log(double(n)) / 20.0;
    B = rat(static_cast<long>(v * 1000000.0) - 1, 1000000);
    if (B <= 0) B = Rational(1, 1000000);
  }

  Polynomial I = fp.total_influence();
  Polynomial tau = I.scale(FieldElem(rat(2, n)));
  Claim core = build_kkl(fp, eps, K, tau);

  // Discharge (2/n) I - Inf_i >= 0 through the two-block equalities.
  std::vector<Claim> bases;
  for (int i = 0; i < n; ++i) {
    bool first_block = i < n / 2;
    int lo = first_block ? 0 : n / 2;
    int hi = first_block ? n / 2 : n;
    Claim b;
    b.reg = reg;
    b.conclusion = tau - fp.influence(i);
    b.degree = 2;
    // (2/n) sum_{j in other block} Inf_j is SOS; within the block use
    // (2/n) sum_j (Inf_j - Inf_i) as equality multipliers.
    for (int j = 0; j < n; ++j) {
      if (j >= lo && j < hi) continue;
      b.u0.append(influence_witness(fp, j).scaled(FieldElem(rat(2, n))));
    }
    for (int j = lo; j < hi; ++j) {
      if (j == i) continue;
      int a = std::min(i, j), c2 = std::max(i, j);
      Polynomial eq = fp.influence(a) - fp.influence(c2);
      size_t idx = b.axioms.add_eq(eq);
      b.sync_multipliers();
      // (2/n)(Inf_j - Inf_i): sign depends on the stored orientation.
      FieldElem s = (j == a) ? FieldElem(rat(2, n)) : FieldElem(rat(-2, n));
      b.eq_mult[idx] += Polynomial::constant(reg, s);
    }
    if (!verify_claim(b).ok)
      throw std::logic_error("build_kkl_refutation_symbolic: block base failed");
    bases.push_back(std::move(b));
  }
  Claim composed = compose(bases, core);
  tighten_degree(composed);

  // Numeric tail. Constants: conclusion of `composed` is
  //   alpha I + beta I^2 + gamma I - Var  with
  FieldElem rho_pow_K = FieldElem::sqrt3_pow(static_cast<unsigned>(K - 1));
  FieldElem e{eps};
  FieldElem alpha = rho_pow_K * FieldElem(Rational(1, K)) * (e * FieldElem(rat(3, 4)));
  FieldElem beta =
      rho_pow_K * FieldElem(Rational(1, K)) * (FieldElem(rat(1, 4)) / e.pow(3)) *
      FieldElem(rat(2, n));
  FieldElem gamma{Rational(1, K)};

  Claim var_ax;
  var_ax.reg = reg;
  var_ax.conclusion = fp.variance() - Polynomial::constant(reg, FieldElem(rat(3, 4)));
  var_ax.degree = 2;
  var_ax.mult_for_ineq(var_ax.axioms.add_ineq(var_ax.conclusion)) =
      SosWitness::constant(reg, FieldElem(1));

  Claim i_ax;
  i_ax.reg = reg;
  i_ax.conclusion = Polynomial::constant(reg, FieldElem(B)) - I;
  i_ax.degree = 2;
  i_ax.mult_for_ineq(i_ax.axioms.add_ineq(i_ax.conclusion)) =
      SosWitness::constant(reg, FieldElem(1));

  // B^2 - I^2 = (B + I)(B - I): SOS multiplier B + I on the axiom.
  Claim isq;
  isq.reg = reg;
  isq.conclusion = Polynomial::constant(reg, FieldElem(B * B)) - I * I;
  isq.degree = 4;
  {
    size_t ax = isq.axioms.add_ineq(Polynomial::constant(reg, FieldElem(B)) - I);
    isq.sync_multipliers();
    SosWitness m = SosWitness::constant(reg, FieldElem(B));
    for (int j = 0; j < n; ++j) m.append(influence_witness(fp, j));
    isq.ineq_mult[ax] = m;
  }

  Claim sum = combine_sum(composed, var_ax);
  sum = combine_sum(sum, claim_scale(i_ax, alpha + gamma));
  sum = combine_sum(sum, claim_scale(isq, beta));
  // Conclusion is now the rational constant s = (alpha+gamma) B + beta B^2 - 3/4.
  FieldElem s = (alpha + gamma) * FieldElem(B) + beta * FieldElem(B * B) - FieldElem(rat(3, 4));
  if (!sum.conclusion.is_constant() || sum.conclusion.constant_term() != s)
    throw std::logic_error("build_kkl_refutation_symbolic: tail constant mismatch");
  if (s.sign() >= 0)
    throw std::domain_error(
        "build_kkl_refutation_symbolic: derived constant not below 3/4; weaken parameters");
  Claim refutation = claim_scale(sum, (-s).inverse());
  tighten_degree(refutation);

  KklRefutation out;
  out.claim = std::move(refutation);
  out.margin = (-s).rat_part();  // s is rational by construction of the parameters
  // Record the desk-scale scalar chain alongside.
  Rational alpha_r = alpha.rat_part(), beta_r = beta.rat_part(), gamma_r = gamma.rat_part();
  out.ledger.add_le("tail_constant", "(alpha+gamma) B + beta B^2 <= 3/4 strictly",
                    [alpha_r, beta_r, gamma_r, B]() {
                      Interval b{B};
                      Interval lhs = (Interval(alpha_r) + Interval(gamma_r)) * b +
                                     Interval(beta_r) * b * b;
                      return std::make_pair(lhs, Interval(Rational(3, 4)));
                    });
  return out;
}

KklRefutation build_kkl_refutation_symbolic(int n) {
  auto reg = make_registry();
  return build_kkl_refutation_symbolic(CubeFunction::atomic_points(reg, "f", n), Rational(1, 2),
                                       3);
}

ScalarLedger build_kkl_refutation_ledger(unsigned long n) {
  if (n < 81)
    throw std::invalid_argument("build_kkl_refutation_ledger: the statement needs n >= 81");
  ScalarLedger led;
  auto nI = [n]() { return Interval(Rational(static_cast<long>(n))); };
  auto ln3 = []() { return log(Interval::exact_long(3)); };
  auto L2 = [nI, ln3]() {  // log9(81 n) = ln(81 n)/ln 9
    return log(Interval::exact_long(81) * nI()) / (Interval::exact_long(2) * ln3());
  };
  auto K = [nI, ln3]() {  // log9(9 sqrt n)
    return log(Interval::exact_long(9) * sqrt(nI())) / (Interval::exact_long(2) * ln3());
  };

  led.add_eq("sqrt3_pow_K", "sqrt3^{K-1} = n^{1/8} at K = log9(9 sqrt n)", [nI, ln3, K]() {
    Interval lhs = exp((K() - Interval::exact_long(1)) * (ln3() / Interval::exact_long(2)));
    Interval rhs = exp(log(nI()) / Interval::exact_long(8));
    return std::make_pair(lhs, rhs);
  });
  led.add_eq("coeff_I", "(n^{1/8}/K)(3/4) n^{-1/8} + 1/K = 7/(2 log9(81 n))", [K, L2]() {
    Interval lhs = Interval(Rational(3, 4)) / K() + Interval::exact_long(1) / K();
    Interval rhs = Interval(Rational(7, 2)) / L2();
    return std::make_pair(lhs, rhs);
  });
  led.add_eq("coeff_I2", "(n^{1/8}/K)(1/2) n^{-5/8} = 1/(sqrt n log9(81 n))", [nI, K, L2]() {
    Interval lhs = exp(log(nI()) * Interval(Rational(-1, 2))) / (Interval::exact_long(2) * K());
    Interval rhs = Interval::exact_long(1) / (sqrt(nI()) * L2());
    return std::make_pair(lhs, rhs);
  });
  led.add_eq("I_squared", "(1/20 ln n)^2 = (1/400) ln^2 n", [nI]() {
    Interval l = log(nI()) * Interval(Rational(1, 20));
    return std::make_pair(l * l, log(nI()) * log(nI()) * Interval(Rational(1, 400)));
  });
  led.add_le("chain_sum",
             "7/(2 L)(1/20) ln n + (1/(sqrt n L))(1/400) ln^2 n <= (7/20) ln 3",
             [nI, L2, ln3]() {
               Interval lnn = log(nI());
               Interval lhs = Interval(Rational(7, 2)) / L2() * (lnn * Interval(Rational(1, 20))) +
                              (lnn * lnn * Interval(Rational(1, 400))) / (sqrt(nI()) * L2());
               return std::make_pair(lhs, Interval(Rational(7, 20)) * ln3());
             });
  led.add_le("final_04", "(7/20) ln 3 <= 0.4", [ln3]() {
    return std::make_pair(Interval(Rational(7, 20)) * ln3(), Interval(Rational(2, 5)));
  });
  led.add_le("margin", "0.4 < 3/4", []() {
    return std::make_pair(Interval(Rational(2, 5)), Interval(Rational(3, 4)));
  });
  return led;
}

}  // namespace sos
