#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "soskit/expsq.hpp"
#include "soskit/lemmas.hpp"

using namespace sos;

namespace {
Polynomial P(const RegistryPtr& reg, const std::string& s) { return Polynomial::parse(reg, s); }
}  // namespace

TEST_CASE("verify_claim: Fact 3.3, Prop 2.7, trivial square") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Polynomial z = Polynomial::var(reg, reg->scalar("Z"));

  Claim f33 = lemmas::fact33_upper(y);
  CHECK(verify_claim(f33).ok);
  CHECK(f33.conclusion == P(reg, "1 - Y"));

  Claim p27 = lemmas::prop27(y, rat(1, 2));
  CHECK(verify_claim(p27).ok);
  CHECK(p27.conclusion == P(reg, "-1"));
  CHECK(p27.degree == 4);

  Claim p27big = lemmas::prop27(y, rat(3, 2));  // reader case eps >= 1
  CHECK(verify_claim(p27big).ok);

  Claim sq;
  sq.reg = reg;
  sq.conclusion = P(reg, "(Y-Z)^2");
  sq.u0 = SosWitness::square(y - z);
  sq.degree = 2;
  CHECK(verify_claim(sq).ok);
}

TEST_CASE("negative controls: corrupted decompositions fail with diagnostics") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));

  Claim c = lemmas::fact33_upper(y);
  Claim bad = c;
  bad.u0 = SosWitness::square(c.reg ? Polynomial::constant(reg, FieldElem(1)) - y : y,
                              FieldElem(rat(49, 100)));
  auto rep = verify_claim(bad);
  CHECK_FALSE(rep.ok);
  CHECK(rep.diagnostic.find("residual") != std::string::npos);

  Claim negw = c;
  negw.u0 = SosWitness::square(Polynomial::constant(reg, FieldElem(1)) - y, FieldElem(rat(1, 2)));
  negw.u0.append_square(FieldElem(-1), y);
  CHECK_FALSE(verify_claim(negw).ok);

  Claim degbad = c;
  degbad.degree = 1;
  CHECK_FALSE(verify_claim(degbad).ok);
}

TEST_CASE("all section-3 lemma instantiations verify") {
  for (const auto& name : lemma_names()) {
    auto reg = make_registry();
    std::map<std::string, Rational> params{{"eps", rat(2, 3)}, {"n", rat(3)}};
    Claim c = instantiate_lemma(name, params, reg);
    auto rep = verify_claim(c);
    INFO(name, ": ", rep.diagnostic);
    CHECK(rep.ok);
  }
}

TEST_CASE("Fact 3.9 at eps=1 reduces to Fact 3.8; 3.13 with n=2") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Polynomial z = Polynomial::var(reg, reg->scalar("Z"));
  Claim a = lemmas::fact38(y, z);
  Claim b = lemmas::fact39(y, z, 1);
  CHECK(a.conclusion == b.conclusion);
  CHECK(verify_claim(a).ok);

  Claim f313 = lemmas::fact313({y, z});
  CHECK(verify_claim(f313).ok);
  CHECK(f313.conclusion == P(reg, "(1/2)*Y^2 + (1/2)*Z^2 - ((1/2)*Y + (1/2)*Z)^2"));
}

TEST_CASE("combine_sum: Fact 3.3 halves sum to constant conclusion") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Claim up = lemmas::fact33_upper(y);
  Claim lo = lemmas::fact33_lower(y);
  Claim s = combine_sum(up, lo);
  CHECK(s.conclusion == P(reg, "2"));
  CHECK(s.degree == 2);
  CHECK(verify_claim(s).ok);

  // Sum with a trivial zero claim leaves the conclusion unchanged.
  Claim zero;
  zero.reg = reg;
  zero.conclusion = Polynomial(reg);
  zero.degree = 0;
  Claim same = combine_sum(up, zero);
  CHECK(same.conclusion == up.conclusion);
  CHECK(verify_claim(same).ok);
}

TEST_CASE("compose: inline Fact 3.3 halves into Fact 3.6") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Polynomial z = Polynomial::var(reg, reg->scalar("Z"));
  Polynomial w = Polynomial::var(reg, reg->scalar("W"));

  // Base claims: A |- 1-Y >= 0 and A |- 1+Y >= 0 from Y^2 <= 1.
  Claim b1 = lemmas::fact33_upper(y);
  Claim b2 = lemmas::fact33_lower(y);
  // B |- Z-W >= 0, Z+W >= 0 are axioms here; products come from combine_product.
  Claim zw1;
  zw1.reg = reg;
  zw1.conclusion = z - w;
  zw1.degree = 1;
  zw1.mult_for_ineq(zw1.axioms.add_ineq(z - w)) = SosWitness::constant(reg, FieldElem(1));
  Claim zw2 = zw1;
  zw2 = Claim();
  zw2.reg = reg;
  zw2.conclusion = z + w;
  zw2.degree = 1;
  zw2.mult_for_ineq(zw2.axioms.add_ineq(z + w)) = SosWitness::constant(reg, FieldElem(1));

  // Fact 3.6 via products: Z - YW = 1/2 (Z-W)(1+Y) + 1/2 (Z+W)(1-Y).
  Claim pr1 = combine_product(zw1, b2);  // (Z-W)(1+Y) >= 0
  Claim pr2 = combine_product(zw2, b1);  // (Z+W)(1-Y) >= 0
  CHECK(verify_claim(pr1).ok);
  CHECK(verify_claim(pr2).ok);
  Claim sum = combine_sum(claim_scale(pr1, FieldElem(rat(1, 2))),
                          claim_scale(pr2, FieldElem(rat(1, 2))));
  CHECK(sum.conclusion == z - y * w);
  CHECK(verify_claim(sum).ok);

  // compose with an empty base keeps the top unchanged up to verification.
  Claim top = lemmas::fact34(y);
  Claim composed = compose({}, top);
  CHECK(composed.conclusion == top.conclusion);
  CHECK(verify_claim(composed).ok);

  // Full composition: discharge Fact 3.4's axioms with the Fact 3.3 claims.
  Claim f34 = lemmas::fact34(y);
  Claim whole = compose({b1, b2}, f34);
  CHECK(whole.conclusion == P(reg, "1 - Y^2"));
  CHECK(whole.axioms.ineqs().size() == 1);  // only 1 - Y^2 >= 0 remains
  CHECK(verify_claim(whole).ok);
  CHECK(whole.degree == f34.degree + std::max(b1.degree, b2.degree));
}

TEST_CASE("combine_product: YZ >= 0 via product axiom; product with 1 >= 0") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Polynomial z = Polynomial::var(reg, reg->scalar("Z"));
  Claim cy;
  cy.reg = reg;
  cy.conclusion = y;
  cy.degree = 1;
  cy.mult_for_ineq(cy.axioms.add_ineq(y)) = SosWitness::constant(reg, FieldElem(1));
  Claim cz;
  cz.reg = reg;
  cz.conclusion = z;
  cz.degree = 1;
  cz.mult_for_ineq(cz.axioms.add_ineq(z)) = SosWitness::constant(reg, FieldElem(1));

  Claim prod = combine_product(cy, cz);
  CHECK(prod.conclusion == y * z);
  CHECK(prod.degree == 2);
  CHECK(verify_claim(prod).ok);
  CHECK(prod.axioms.find_ineq(y * z).has_value());

  Claim one;
  one.reg = reg;
  one.conclusion = Polynomial::constant(reg, FieldElem(1));
  one.degree = 0;
  one.u0 = SosWitness::constant(reg, FieldElem(1));
  Claim same = combine_product(cy, one);
  CHECK(same.conclusion == y);
  CHECK(verify_claim(same).ok);
}

TEST_CASE("witness products multiply values") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Polynomial z = Polynomial::var(reg, reg->scalar("Z"));
  SosWitness a = SosWitness::square(y + z, FieldElem(rat(2, 3)));
  a.append_square(FieldElem(rat(1, 5)), y - z);
  SosWitness b = SosWitness::square(y * z, FieldElem(rat(7, 2)));
  b.append_square(FieldElem(1), z);
  SosWitness p = SosWitness::product(a, b);
  CHECK(p.value(reg) == a.value(reg) * b.value(reg));
}

TEST_CASE("claims numerically sound at axiom-satisfying points") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Claim c = lemmas::fact33_upper(y);  // axiom 1 - Y^2 >= 0 ; conclusion 1 - Y >= 0
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    std::unordered_map<VarId, double> pt{{*reg->find("Y"), d(rng)}};
    CHECK(c.conclusion.eval_double(pt) >= -1e-12);
  }
}

TEST_CASE("expected_square_witness: Rademacher, Gaussian, mixed") {
  auto reg = make_registry();
  VarId a = reg->scalar("a"), b = reg->scalar("b");
  VarId z1 = reg->scalar("z1"), z2 = reg->scalar("z2");
  Polynomial pa = Polynomial::var(reg, a), pb = Polynomial::var(reg, b);
  Polynomial p1 = Polynomial::var(reg, z1), p2 = Polynomial::var(reg, z2);

  std::vector<ProfileMap> cases = {
      {{z1, MomentProfile::rademacher()}, {z2, MomentProfile::rademacher()}},
      {{z1, MomentProfile::gaussian()}, {z2, MomentProfile::gaussian()}},
      {{z1, MomentProfile::rademacher()}, {z2, MomentProfile::gaussian()}},
  };
  Polynomial r = pa * p1 + pb * p2 + pa * pb * p1 * p2;
  for (auto& prof : cases) {
    SosWitness w = expected_square_witness(r, prof);
    CHECK(w.weights_nonneg());
    CHECK(w.value(reg) == expect(r * r, prof));
  }

  // Degenerate PSD case: z1^2 has Rademacher moment matrix with dependencies.
  ProfileMap gg{{z1, MomentProfile::gaussian()}};
  Polynomial r2 = pa + pb * p1 * p1;
  SosWitness w2 = expected_square_witness(r2, gg);
  CHECK(w2.value(reg) == expect(r2 * r2, gg));
}

TEST_CASE("field_ldl rejects non-PSD matrices") {
  std::vector<std::vector<FieldElem>> neg{{FieldElem(1), FieldElem(2)},
                                          {FieldElem(2), FieldElem(1)}};
  CHECK_THROWS_AS(field_ldl(neg), std::domain_error);
  std::vector<std::vector<FieldElem>> psd{{FieldElem(2), FieldElem(1)},
                                          {FieldElem(1), FieldElem(2)}};
  auto ldl = field_ldl(psd);
  CHECK(ldl.D[0] == FieldElem(2));
}

TEST_CASE("claim substitution preserves verification") {
  auto reg = make_registry();
  Polynomial y = Polynomial::var(reg, reg->scalar("Y"));
  Polynomial z = Polynomial::var(reg, reg->scalar("Z"));
  Claim c = lemmas::fact311(y, z, rat(1, 2));
  CHECK(verify_claim(c).ok);
  std::unordered_map<VarId, Polynomial> sub{{*reg->find("Y"), y + z},
                                            {*reg->find("Z"), y - z.scale(FieldElem(2))}};
  Claim cs = claim_substitute(c, sub);
  CHECK(verify_claim(cs).ok);
}
