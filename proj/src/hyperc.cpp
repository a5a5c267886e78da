#include "soskit/hyperc.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace sos {

HcContext::HcContext(RegistryPtr reg, std::vector<MomentProfile> profiles)
    : reg_(std::move(reg)), profiles_(std::move(profiles)) {
  for (size_t i = 0; i < profiles_.size(); ++i) {
    VarId v = reg_->scalar("__z" + std::to_string(i));
    z_.push_back(v);
    pmap_.emplace(v, profiles_[i]);
  }
}

Polynomial HcContext::realize(const FourierMap& f, bool noise) const {
  PolyAccum acc(reg_);
  for (auto& [mask, coef] : f) {
    Polynomial zmono(reg_, FieldElem(1));
    for (int i = 0; i < dim(); ++i)
      if (mask & (1u << i)) zmono = zmono * Polynomial::var(reg_, z_[i]);
    FieldElem scale =
        noise ? FieldElem::inv_sqrt3_pow(static_cast<unsigned>(std::popcount(mask)))
              : FieldElem(1);
    acc.add_product(coef, zmono, scale);
  }
  return acc.take();
}

Polynomial HcContext::expect_poly(const Polynomial& p) const { return expect(p, pmap_); }

FourierMap HcContext::multilinear_product(const FourierMap& a, const FourierMap& b) {
  std::map<uint32_t, PolyAccum> acc;
  FourierMap out;
  for (auto& [s, c] : a)
    for (auto& [s2, c2] : b) {
      uint32_t mask = s ^ s2;
      auto it = acc.find(mask);
      if (it == acc.end()) it = acc.emplace(mask, PolyAccum(c.registry())).first;
      it->second.add_product(c, c2);
    }
  for (auto& [mask, pa] : acc) {
    Polynomial p = pa.take();
    if (!p.is_zero()) out.emplace(mask, std::move(p));
  }
  return out;
}

namespace {

void check_profiles(const HcContext& ctx) {
  for (int i = 0; i < ctx.dim(); ++i)
    if (!ctx.profile(i).satisfies_hc4_hypotheses())
      throw std::invalid_argument(
          "hyperc: profile violates E[z]=E[z^3]=0, E[z^2]=1, E[z^4]<=9");
}

// Splits f over coordinates [0, n) at coordinate n-1: f = z_{n-1} d + e.
void split_top(const FourierMap& f, int n, FourierMap& d, FourierMap& e) {
  uint32_t top = 1u << (n - 1);
  for (auto& [mask, coef] : f) {
    if (mask & top)
      d.emplace(mask & ~top, coef);
    else
      e.emplace(mask, coef);
  }
}

void hc4_pair_gap_rec(const HcContext& ctx, const FourierMap& f1, const FourierMap& f2, int n,
                      SosWitness& out) {
  if (n == 0) return;
  FourierMap d1, e1, d2, e2;
  split_top(f1, n, d1, e1);
  split_top(f2, n, d2, e2);
  if (!d1.empty() || !d2.empty()) {
    Polynomial td1 = ctx.realize(d1, true);
    Polynomial te1 = ctx.realize(e1, true);
    Polynomial td2 = ctx.realize(d2, true);
    Polynomial te2 = ctx.realize(e2, true);
    bool identical_pair = (d1 == d2 && e1 == e2);  // cross term vanishes identically
    if (!identical_pair) {
      SosWitness w = expected_square_witness_of_product(td1, te2, td2, te1, ctx.profile_map(),
                                                        "cross");
      out.append(w.scaled(FieldElem(rat(2, 3))));
    }
    FieldElem m4 = ctx.profile(n - 1).fourth_moment();
    FieldElem slack = (FieldElem(9) - m4) / FieldElem(9);
    if (!slack.is_zero() && !td1.is_zero() && !td2.is_zero()) {
      Polynomial zero(ctx.registry());
      SosWitness w = expected_square_witness_of_product(td1, td2, zero, zero, ctx.profile_map(),
                                                        "slack");
      out.append(w.scaled(slack));
    }
    hc4_pair_gap_rec(ctx, d1, d2, n - 1, out);
    hc4_pair_gap_rec(ctx, d1, e2, n - 1, out);
    hc4_pair_gap_rec(ctx, e1, d2, n - 1, out);
  }
  hc4_pair_gap_rec(ctx, e1, e2, n - 1, out);
}

Polynomial pair_gap_conclusion(const HcContext& ctx, const FourierMap& f1, const FourierMap& f2) {
  Polynomial p1 = ctx.realize(f1, false);
  Polynomial p2 = ctx.realize(f2, false);
  Polynomial t1 = ctx.realize(f1, true);
  Polynomial t2 = ctx.realize(f2, true);
  Polynomial lhs = ctx.expect_poly(p1 * p1) * ctx.expect_poly(p2 * p2);
  Polynomial rhs = ctx.expect_poly(t1 * t1 * t2 * t2);
  return lhs - rhs;
}

Claim claim_from_witness(const RegistryPtr& reg, Polynomial conclusion, SosWitness w) {
  Claim c;
  c.reg = reg;
  c.conclusion = std::move(conclusion);
  c.u0 = std::move(w);
  c.degree = std::max(std::max(c.u0.degree(), c.conclusion.degree()), 0);
  return c;
}

FourierMap atomic_map(const RegistryPtr& reg, const std::string& fn, int n, int degree_bound) {
  FourierMap f;
  for (uint32_t s = 0; s < (1u << n); ++s) {
    if (std::popcount(s) > degree_bound) continue;
    f.emplace(s, Polynomial::var(reg, reg->fourier_coeff(fn, s)));
  }
  return f;
}

}  // namespace

SosWitness hc4_pair_gap_witness(const HcContext& ctx, const FourierMap& f1,
                                const FourierMap& f2) {
  check_profiles(ctx);
  SosWitness out;
  hc4_pair_gap_rec(ctx, f1, f2, ctx.dim(), out);
  return out;
}

Claim build_hc4_pair(const HcContext& ctx, const FourierMap& f1, const FourierMap& f2) {
  return claim_from_witness(ctx.registry(), pair_gap_conclusion(ctx, f1, f2),
                            hc4_pair_gap_witness(ctx, f1, f2));
}

Claim build_hc4_pair(int n, const MomentProfile& profile, bool identical, const HcOptions& opt) {
  int cap = identical ? opt.single_dim_cap : opt.pair_dim_cap;
  if (n > cap)
    throw std::invalid_argument("build_hc4_pair: n = " + std::to_string(n) +
                                " exceeds the configured cap " + std::to_string(cap));
  auto reg = make_registry();
  HcContext ctx(reg, std::vector<MomentProfile>(n, profile));
  FourierMap f1 = atomic_map(reg, "f1", n, n);
  FourierMap f2 = identical ? f1 : atomic_map(reg, "f2", n, n);
  return build_hc4_pair(ctx, f1, f2);
}

Claim build_hc4_bounded(const HcContext& ctx, const FourierMap& f1, const FourierMap& f2, int k1,
                        int k2) {
  check_profiles(ctx);
  for (auto& [s, c] : f1)
    if (std::popcount(s) > k1) throw std::invalid_argument("build_hc4_bounded: f1 over degree");
  for (auto& [s, c] : f2)
    if (std::popcount(s) > k2) throw std::invalid_argument("build_hc4_bounded: f2 over degree");
  auto lift = [](const FourierMap& f) {
    FourierMap g;
    for (auto& [s, c] : f)
      g.emplace(s, c.scale(FieldElem::sqrt3_pow(static_cast<unsigned>(std::popcount(s)))));
    return g;
  };
  FourierMap g1 = lift(f1), g2 = lift(f2);
  SosWitness w = hc4_pair_gap_witness(ctx, g1, g2);

  // Level comparison: (3^{k1+k2} - 3^{|S|+|S'|}) (f1hat(S) f2hat(S'))^2 termwise.
  FieldElem top{Rational(1)};
  {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned>(k1 + k2));
    top = FieldElem(Rational(p));
  }
  for (auto& [s, c] : f1)
    for (auto& [s2, c2] : f2) {
      unsigned lv = static_cast<unsigned>(std::popcount(s) + std::popcount(s2));
      Integer p;
      mpz_ui_pow_ui(p.get_mpz_t(), 3, lv);
      FieldElem wgt = top - FieldElem(Rational(p));
      if (!wgt.is_zero()) w.append_square(wgt, c * c2, "level");
    }

  Polynomial p1 = ctx.realize(f1, false);
  Polynomial p2 = ctx.realize(f2, false);
  Polynomial conclusion =
      ctx.expect_poly(p1 * p1).scale(top) * ctx.expect_poly(p2 * p2) -
      ctx.expect_poly(p1 * p1 * p2 * p2);
  return claim_from_witness(ctx.registry(), std::move(conclusion), std::move(w));
}

Claim build_hc4_bounded(int n, int k1, int k2, const MomentProfile& profile,
                        const HcOptions& opt) {
  if (n > opt.pair_dim_cap)
    throw std::invalid_argument("build_hc4_bounded: n exceeds the configured cap");
  auto reg = make_registry();
  HcContext ctx(reg, std::vector<MomentProfile>(n, profile));
  FourierMap f1 = atomic_map(reg, "f1", n, k1);
  FourierMap f2 = atomic_map(reg, "f2", n, k2);
  return build_hc4_bounded(ctx, f1, f2, k1, k2);
}

namespace {

// Diagonal certificate for gaps whose monomials all have even exponents and
// nonnegative coefficients; used at r >= 2 when coordinates are not
// unit-square, where the pairing argument's multilinear re-expression of the
// half-products is unavailable.
SosWitness even_monomial_witness(const Polynomial& gap) {
  SosWitness w;
  for (auto& [m, c] : gap.terms()) {
    if (c.sign() < 0)
      throw std::domain_error(
          "build_hc_2r: gap has a negative coefficient; no diagonal certificate for "
          "non-unit-square profiles at this level");
    std::vector<std::pair<VarId, uint32_t>> half;
    for (auto& [v, e] : m.factors()) {
      if (e % 2)
        throw std::domain_error(
            "build_hc_2r: gap has an odd-power monomial; no diagonal certificate for "
            "non-unit-square profiles at this level");
      half.emplace_back(v, e / 2);
    }
    std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
    mm.emplace(Monomial::from_factors(std::move(half)), FieldElem(1));
    w.append_square(c, Polynomial::from_map(gap.registry(), std::move(mm)), "diag");
  }
  return w;
}

FieldElem pow3(unsigned e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 3, e);
  return FieldElem(Rational(p));
}

}  // namespace

Claim build_hc_2r(const HcContext& ctx, const std::vector<FourierMap>& fs,
                  const std::vector<int>& ks, int r) {
  check_profiles(ctx);
  if (fs.size() != (size_t{1} << r) || ks.size() != fs.size())
    throw std::invalid_argument("build_hc_2r: need 2^r functions and bounds");
  unsigned ktotal = 0;
  for (int k : ks) ktotal += static_cast<unsigned>(k);

  // Conclusion: 3^{r * sum k} * prod E[f_j^2] - E[prod f_j^2].
  Polynomial big_prod(ctx.registry(), FieldElem(1));
  Polynomial e_prod(ctx.registry(), FieldElem(1));
  for (size_t j = 0; j < fs.size(); ++j) {
    Polynomial pj = ctx.realize(fs[j], false);
    big_prod = big_prod * pj * pj;
    e_prod = e_prod * ctx.expect_poly(pj * pj);
  }
  Polynomial conclusion =
      e_prod.scale(pow3(static_cast<unsigned>(r) * ktotal)) - ctx.expect_poly(big_prod);

  if (r == 0) return claim_from_witness(ctx.registry(), std::move(conclusion), SosWitness());
  if (r == 1) return build_hc4_bounded(ctx, fs[0], fs[1], ks[0], ks[1]);

  bool unit = true;
  for (int i = 0; i < ctx.dim(); ++i) unit = unit && ctx.profile(i).unit_square();
  if (!unit)
    return claim_from_witness(ctx.registry(), conclusion, even_monomial_witness(conclusion));

  size_t half = fs.size() / 2;
  std::vector<FourierMap> first(fs.begin(), fs.begin() + half);
  std::vector<FourierMap> second(fs.begin() + half, fs.end());
  std::vector<int> ks1(ks.begin(), ks.begin() + half), ks2(ks.begin() + half, ks.end());
  int K1 = 0, K2 = 0;
  for (int k : ks1) K1 += k;
  for (int k : ks2) K2 += k;

  FourierMap F1 = first[0], F2 = second[0];
  for (size_t j = 1; j < first.size(); ++j) F1 = HcContext::multilinear_product(F1, first[j]);
  for (size_t j = 1; j < second.size(); ++j) F2 = HcContext::multilinear_product(F2, second[j]);

  // Pair step on (F1, F2) with bounds (K1, K2).
  Claim pair = build_hc4_bounded(ctx, F1, F2, K1, K2);

  // Children: c_h * prod E[f^2] - E[F_h^2] with c_h = 3^{(r-1) K_h}.
  Claim child1 = build_hc_2r(ctx, first, ks1, r - 1);
  Claim child2 = build_hc_2r(ctx, second, ks2, r - 1);

  // Fact 3.7 assembly: Y' = c1 prod_1 E, Y = E[F1^2], Z' = c2 prod_2 E, Z = E[F2^2]:
  //   Y'Z' - YZ = Y'(Z' - Z) + Z(Y' - Y), all factors SOS.
  SosWitness yp_w;  // witness for Y'
  {
    SosWitness acc = SosWitness::constant(ctx.registry(), pow3((r - 1) * K1));
    for (auto& fj : first) {
      SosWitness ej = expected_square_witness(ctx.realize(fj, false), ctx.profile_map());
      acc = SosWitness::product(acc, ej);
    }
    yp_w = std::move(acc);
  }
  SosWitness z_w = expected_square_witness(ctx.realize(F2, false), ctx.profile_map());

  SosWitness total = pair.u0.scaled(FieldElem(1));
  total.append(SosWitness::product(yp_w, child2.u0).scaled(pow3(K1 + K2)));
  total.append(SosWitness::product(z_w, child1.u0).scaled(pow3(K1 + K2)));
  return claim_from_witness(ctx.registry(), std::move(conclusion), std::move(total));
}

unsigned hc_q_sqrt3_exponent(int q, int k) {
  int lg = 0;
  while ((1 << lg) < q) ++lg;
  return static_cast<unsigned>(q * lg - q) * static_cast<unsigned>(k);
}

Claim build_hc_q(int n, int k, int q, const MomentProfile& profile, const HcOptions& opt) {
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("build_hc_q: q must be even, >= 2");
  if (n > opt.single_dim_cap)
    throw std::invalid_argument("build_hc_q: n exceeds the configured cap");
  auto reg = make_registry();
  HcContext ctx(reg, std::vector<MomentProfile>(n, profile));
  FourierMap f = atomic_map(reg, "f", n, k);
  if (q == 2) {
    Polynomial p = ctx.realize(f, false);
    return claim_from_witness(reg, Polynomial(reg), SosWitness());
  }
  int lg = 0;
  while ((1 << lg) < q) ++lg;
  int r = lg - 1;
  std::vector<FourierMap> fs;
  std::vector<int> ks;
  FourierMap ones{{0u, Polynomial::constant(reg, FieldElem(1))}};
  for (int j = 0; j < (1 << r); ++j) {
    bool is_f = j < q / 2;
    fs.push_back(is_f ? f : ones);
    ks.push_back(is_f ? k : 0);
  }
  return build_hc_2r(ctx, fs, ks, r);
}

}  // namespace sos
