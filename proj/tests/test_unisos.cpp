#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soskit/unisos.hpp"

using namespace sos;

namespace {
UniPoly parse_uni(std::initializer_list<Rational> asc) { return UniPoly(std::vector<Rational>(asc)); }
}

TEST_CASE("Sturm: root counting, nonnegativity on R and intervals") {
  // (t^2 - 2)(t - 1): roots -sqrt2, 1, sqrt2
  UniPoly p = parse_uni({rat(2), rat(-2), rat(-1), rat(1)});
  CHECK(p.count_real_roots() == 3);
  CHECK(p.count_real_roots(rat(0), rat(2)) == 2);
  CHECK(p.count_real_roots(rat(-2), rat(0)) == 1);

  UniPoly sq = parse_uni({rat(1), rat(-2), rat(1)});  // (t-1)^2
  CHECK(sq.count_real_roots() == 1);
  CHECK(sq.is_nonneg_on_reals());
  UniPoly psq = sq * sq * parse_uni({rat(1), rat(0), rat(1)});  // (t-1)^4 (t^2+1)
  CHECK(psq.is_nonneg_on_reals());
  CHECK_FALSE(p.is_nonneg_on_reals());
  CHECK(parse_uni({rat(0), rat(1)}).is_nonneg_on_interval(rat(0), rat(5)));
  CHECK_FALSE(parse_uni({rat(0), rat(1)}).is_nonneg_on_interval(rat(-1), rat(5)));
  // Boundary zero at an endpoint is fine.
  CHECK(parse_uni({rat(0), rat(-1), rat(1)}).is_nonneg_on_interval(rat(1), rat(3)));
}

TEST_CASE("squarefree decomposition reassembles") {
  UniPoly f = parse_uni({rat(1), rat(1)});          // t+1
  UniPoly g = parse_uni({rat(-1), rat(1)});         // t-1
  UniPoly h = parse_uni({rat(2), rat(0), rat(3)});  // 3t^2+2
  UniPoly p = f * f * g * h * h * h;
  auto dec = p.squarefree_decomposition();
  UniPoly re = UniPoly::constant(p.leading());
  for (auto& fac : dec) {
    UniPoly fp{std::vector<Rational>(fac.coeffs)};
    for (int i = 0; i < fac.multiplicity; ++i) re = re * fp;
  }
  CHECK(re == p);
}

TEST_CASE("univariate_sos: t^2 + 1, perfect square, positive sextic") {
  auto reg = make_registry();
  VarId t = reg->scalar("t");

  UniSosResult r1 = univariate_sos(parse_uni({rat(1), rat(0), rat(1)}), reg, t);
  CHECK(r1.residual.is_zero());
  CHECK(r1.witness.value(reg) == Polynomial::parse(reg, "t^2 + 1"));

  // P(t) - t for P = 1/2 + 1/2 t^2: equals 1/2 (t-1)^2, a single square.
  UniSosResult r2 = univariate_sos(parse_uni({rat(1, 2), rat(-1), rat(1, 2)}), reg, t);
  CHECK(r2.residual.is_zero());
  REQUIRE(r2.witness.size() == 1);
  CHECK(r2.witness.terms()[0].weight == FieldElem(rat(1, 2)));

  // 2 + (t^2 - 3 t + 1)^2 + t^4: strictly positive, degree 4+.
  UniPoly q = parse_uni({rat(1), rat(-3), rat(1)});
  UniPoly p = q * q + parse_uni({rat(2)}) + parse_uni({rat(0), rat(0), rat(0), rat(0), rat(1)});
  UniSosResult r3 = univariate_sos(p, reg, t);
  CHECK(r3.residual.is_zero());
  PolyAccum acc(reg);
  r3.witness.add_value_into(acc);
  CHECK(acc.take() == p.to_polynomial(reg, t));

  CHECK_THROWS(univariate_sos(parse_uni({rat(0), rat(1)}), reg, t));          // odd degree
  CHECK_THROWS(univariate_sos(parse_uni({rat(1), rat(0), rat(-1)}), reg, t)); // negative lc
  CHECK_THROWS(univariate_sos(parse_uni({rat(-1), rat(0), rat(1), rat(0), rat(0), rat(0)}),
                              reg, t));  // negative at 0
}

TEST_CASE("Remark 7.5 polynomial: P(t) - t and P(t) + t certify") {
  auto reg = make_registry();
  VarId t = reg->scalar("t");
  // P = .333 + .815 t^2 - .136 t^4 + .01 t^6
  UniPoly P = parse_uni({rat(333, 1000), rat(0), rat(815, 1000), rat(0), rat(-136, 1000),
                         rat(0), rat(10, 1000)});
  UniPoly Pm = P - UniPoly::t();
  UniPoly Pp = P + UniPoly::t();
  REQUIRE(Pm.is_nonneg_on_reals());
  UniSosResult rm = univariate_sos(Pm, reg, t);
  CHECK(rm.residual.is_zero());
  PolyAccum acc(reg);
  rm.witness.add_value_into(acc);
  CHECK(acc.take() == Pm.to_polynomial(reg, t));
  UniSosResult rp = univariate_sos(Pp, reg, t);
  CHECK(rp.residual.is_zero());
}

TEST_CASE("univariate_interval_sos: even and odd paths") {
  auto reg = make_registry();
  VarId t = reg->scalar("t");
  // (1 - Y) Y >= 0 on [0, 1], even path.
  UniPoly p = parse_uni({rat(0), rat(1), rat(-1)});
  Claim c = univariate_interval_sos(p, rat(0), rat(1), reg, t);
  CHECK(verify_claim(c).ok);
  CHECK(c.axioms.ineqs().size() == 1);
  CHECK(c.degree <= 2);

  // Y on [0, 1], odd path: Y = 1 * (Y - 0).
  Claim c2 = univariate_interval_sos(parse_uni({rat(0), rat(1)}), rat(0), rat(1), reg, t);
  CHECK(verify_claim(c2).ok);

  // A strictly positive quartic on [-1, 2].
  UniPoly q = parse_uni({rat(5), rat(-1), rat(1), rat(0), rat(1)});
  Claim c3 = univariate_interval_sos(q, rat(-1), rat(2), reg, t);
  CHECK(verify_claim(c3).ok);
  CHECK(c3.degree <= 4);

  // A cubic nonnegative exactly on the interval: (Y - 0)(Y - 2)^2 on [0, 3].
  UniPoly cub = parse_uni({rat(0), rat(4), rat(-4), rat(1)});
  Claim c4 = univariate_interval_sos(cub, rat(0), rat(3), reg, t);
  CHECK(verify_claim(c4).ok);

  CHECK_THROWS(univariate_interval_sos(parse_uni({rat(0), rat(1)}), rat(-1), rat(1), reg, t));
}
