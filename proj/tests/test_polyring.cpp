#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "soskit/cube.hpp"
#include "soskit/moments.hpp"
#include "soskit/poly.hpp"

using namespace sos;

namespace {

Polynomial P(const RegistryPtr& reg, const std::string& s) { return Polynomial::parse(reg, s); }

}  // namespace

TEST_CASE("field elements: arithmetic and exact sign") {
  FieldElem x(rat(1, 2), rat(1, 3));  // 1/2 + (1/3) rt3
  FieldElem y(rat(-1, 4), rat(2, 5));
  CHECK((x * y) * x.inverse() == y);
  CHECK(x + (-x) == FieldElem(0));
  CHECK(FieldElem::sqrt3() * FieldElem::sqrt3() == FieldElem(3));
  CHECK(FieldElem::sqrt3_pow(5) == FieldElem(Rational(0), Rational(9)));
  CHECK(FieldElem::inv_sqrt3_pow(2) == FieldElem(rat(1, 3)));

  // sign of a + b rt3 with opposing parts: 7/4 - rt3 > 0 since 49/16 < 48/16 false...
  // 7/4 = 1.75 > sqrt3 = 1.732..., so positive.
  CHECK(FieldElem(rat(7, 4), rat(-1)).sign() == 1);
  CHECK(FieldElem(rat(-7, 4), rat(1)).sign() == -1);
  CHECK(FieldElem(rat(12, 7), rat(-1)).sign() == -1);  // 12/7 = 1.714 < sqrt3
  CHECK(FieldElem(0).sign() == 0);

  // round-trip text form
  for (const FieldElem& v : {x, y, -x, FieldElem(rat(-2, 3)), FieldElem(Rational(0), rat(-5, 9))})
    CHECK(FieldElem::parse(v.str()) == v);
}

TEST_CASE("poly_arith: cancellation, difference of squares, quartic identity") {
  auto reg = make_registry();
  reg->scalar("Y");
  reg->scalar("Z");

  CHECK(P(reg, "(1-Y) + (1+Y)") == P(reg, "2"));
  CHECK(P(reg, "(Y-Z)*(Y+Z)") == P(reg, "Y^2 - Z^2"));
  // 1/2 Y^2 (Y-Z)^2 + 1/4 (Y^2-Z^2)^2 = 3/4 Y^4 + 1/4 Z^4 - Y^3 Z
  Polynomial lhs = P(reg, "(1/2)*Y^2*(Y-Z)^2 + (1/4)*(Y^2-Z^2)^2");
  Polynomial rhs = P(reg, "(3/4)*Y^4 + (1/4)*Z^4 - Y^3*Z");
  CHECK(lhs == rhs);
}

TEST_CASE("poly arithmetic laws by randomized evaluation") {
  auto reg = make_registry();
  VarId y = reg->scalar("Y"), z = reg->scalar("Z"), w = reg->scalar("W");
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-5, 5);
  auto rand_poly = [&] {
    Polynomial p(reg);
    for (int t = 0; t < 6; ++t) {
      Polynomial term = Polynomial::constant(reg, FieldElem(rat(d(rng), 1 + std::abs(d(rng)))));
      term = term * Polynomial::var(reg, y).pow(std::abs(d(rng)) % 3);
      term = term * Polynomial::var(reg, z).pow(std::abs(d(rng)) % 3);
      term = term * Polynomial::var(reg, w).pow(std::abs(d(rng)) % 2);
      p += term;
    }
    return p;
  };
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial a = rand_poly(), b = rand_poly(), c = rand_poly();
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    if (!a.is_zero() && !b.is_zero()) CHECK((a * b).degree() == a.degree() + b.degree());
  }
}

TEST_CASE("substitute: constants, epsilon-scaled AM-GM, Prop 2.7 at c=1/2") {
  auto reg = make_registry();
  VarId y = reg->scalar("Y"), z = reg->scalar("Z");
  reg->scalar("g");

  Polynomial gsq = P(reg, "g^2 - 1");
  std::unordered_map<VarId, Polynomial> to_one{{*reg->find("g"), P(reg, "1")}};
  CHECK(gsq.substitute(to_one).is_zero());

  // Fact 3.8 identity under Y -> eps^(1/2) Y, Z -> eps^(-1/2) Z at eps = 4.
  Polynomial f38 = P(reg, "(1/2)*Y^2 + (1/2)*Z^2 - Y*Z");
  std::unordered_map<VarId, Polynomial> sc{{y, P(reg, "2*Y")}, {z, P(reg, "(1/2)*Z")}};
  Polynomial f39 = P(reg, "2*Y^2 + (1/8)*Z^2 - Y*Z");  // eps/2 Y^2 + 1/(2 eps) Z^2 - YZ, eps=4
  CHECK(f38.substitute(sc) == f39);

  // Prop 2.7 with c = 1/2: (4/3)(1/2+Y^2)(1/2-Y^2) + (4/3)(Y^4-1) = -1.
  Polynomial p27 = P(reg, "(4/3)*(1/2+Y^2)*(1/2-Y^2) + (4/3)*(Y^4-1)");
  CHECK(p27 == P(reg, "-1"));
}

TEST_CASE("expect: Rademacher and Gaussian moments") {
  auto reg = make_registry();
  VarId a = reg->scalar("a"), a1 = reg->scalar("a1"), a2 = reg->scalar("a2");
  VarId z1 = reg->scalar("z1"), z2 = reg->scalar("z2");
  ProfileMap rad{{z1, MomentProfile::rademacher()}, {z2, MomentProfile::rademacher()}};
  ProfileMap gau{{z1, MomentProfile::gaussian()}};

  Polynomial p1 = Polynomial::var(reg, a).pow(2) * Polynomial::var(reg, z1).pow(2);
  CHECK(expect(p1, rad) == Polynomial::var(reg, a).pow(2));

  Polynomial p2 = (Polynomial::var(reg, a1) * Polynomial::var(reg, z1)).pow(4);
  CHECK(expect(p2, gau) == Polynomial::var(reg, a1).pow(4).scale(FieldElem(3)));

  Polynomial l = Polynomial::var(reg, a1) * Polynomial::var(reg, z1) +
                 Polynomial::var(reg, a2) * Polynomial::var(reg, z2);
  Polynomial e4 = expect(l.pow(4), rad);
  Polynomial want = P(reg, "a1^4 + 6*a1^2*a2^2 + a2^4");
  CHECK(e4 == want);

  // Oracle: brute-force average over the 4 sign patterns.
  PolyAccum acc(reg);
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) {
      std::unordered_map<VarId, Polynomial> sub{
          {z1, Polynomial::constant(reg, FieldElem(s1))},
          {z2, Polynomial::constant(reg, FieldElem(s2))}};
      acc.add(l.pow(4).substitute(sub), FieldElem(rat(1, 4)));
    }
  CHECK(acc.take() == e4);

  // Missing moment of required order.
  ProfileMap partial{{z1, MomentProfile::explicit_moments({FieldElem(0), FieldElem(1)})}};
  CHECK_THROWS_AS(expect(Polynomial::var(reg, z1).pow(4), partial), std::out_of_range);
}

TEST_CASE("expect agrees with brute-force cube averaging on random sparse polys") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 8; ++trial) {
    int n = 4 + static_cast<int>(rng() % 7);  // up to 10
    auto reg = make_registry();
    std::vector<VarId> z(n);
    ProfileMap prof;
    for (int i = 0; i < n; ++i) {
      z[i] = reg->scalar("z" + std::to_string(i));
      prof.emplace(z[i], MomentProfile::rademacher());
    }
    VarId c0 = reg->scalar("c");
    std::uniform_int_distribution<int> d(-4, 4);
    Polynomial p(reg);
    for (int t = 0; t < 10; ++t) {
      Polynomial term = Polynomial::constant(reg, FieldElem(rat(d(rng), 3)));
      term = term * Polynomial::var(reg, c0).pow(rng() % 2);
      for (int i = 0; i < n; ++i)
        if (rng() % 3 == 0) term = term * Polynomial::var(reg, z[i]).pow(1 + rng() % 3);
      p += term;
    }
    Polynomial via_moments = expect(p, prof);
    PolyAccum brute(reg);
    FieldElem w(Rational(1, long(1) << n));
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::unordered_map<VarId, Polynomial> sub;
      for (int i = 0; i < n; ++i)
        sub.emplace(z[i], Polynomial::constant(reg, FieldElem((mask >> i) & 1 ? -1 : 1)));
      brute.add(p.substitute(sub), w);
    }
    CHECK(brute.take() == via_moments);
  }
}

TEST_CASE("fourier: constants, Maj3, parity, round trip") {
  auto reg = make_registry();

  CubeFunction one(reg, 2, false);
  for (uint32_t x = 0; x < 4; ++x) one.set_point(x, Polynomial::constant(reg, FieldElem(1)));
  CubeFunction onef = one.to_fourier();
  CHECK(onef.fourier_coeff(0) == Polynomial::constant(reg, FieldElem(1)));
  CHECK(onef.fourier_coeff(1).is_zero());
  CHECK(onef.fourier_coeff(3).is_zero());

  // Maj3 point values; mask bit set means coordinate = -1.
  CubeFunction maj(reg, 3, false);
  for (uint32_t x = 0; x < 8; ++x) {
    int ones = 3 - std::popcount(x);
    maj.set_point(x, Polynomial::constant(reg, FieldElem(ones >= 2 ? 1 : -1)));
  }
  CubeFunction majf = maj.to_fourier();
  // Independent oracle: fhat(S) = E[f chi_S] by direct enumeration.
  for (uint32_t s = 0; s < 8; ++s) {
    FieldElem acc(0);
    for (uint32_t x = 0; x < 8; ++x) {
      FieldElem v = maj.point(x).constant_term();
      if (std::popcount(s & x) % 2) v = -v;
      acc += v;
    }
    acc *= FieldElem(rat(1, 8));
    CHECK(majf.fourier_coeff(s) == Polynomial::constant(reg, acc));
  }
  CHECK(majf.fourier_coeff(1) == P(reg, "(1/2)"));
  CHECK(majf.fourier_coeff(2) == P(reg, "(1/2)"));
  CHECK(majf.fourier_coeff(4) == P(reg, "(1/2)"));
  CHECK(majf.fourier_coeff(7) == P(reg, "(-1/2)"));

  // Parity x1 x2.
  CubeFunction par(reg, 2, false);
  for (uint32_t x = 0; x < 4; ++x)
    par.set_point(x, Polynomial::constant(reg, FieldElem(std::popcount(x) % 2 ? -1 : 1)));
  CubeFunction parf = par.to_fourier();
  CHECK(parf.fourier_coeff(3) == Polynomial::constant(reg, FieldElem(1)));
  CHECK(parf.fourier_coeff(0).is_zero());
  CHECK(parf.fourier_coeff(1).is_zero());

  // Round trip on a symbolic function.
  CubeFunction f = CubeFunction::atomic_points(reg, "f", 3);
  CubeFunction back = f.to_fourier().to_points();
  for (uint32_t x = 0; x < 8; ++x) CHECK(back.point(x) == f.point(x));
}

TEST_CASE("noise operator and functionals on Maj3") {
  auto reg = make_registry();
  CubeFunction maj(reg, 3, false);
  for (uint32_t x = 0; x < 8; ++x) {
    int ones = 3 - std::popcount(x);
    maj.set_point(x, Polynomial::constant(reg, FieldElem(ones >= 2 ? 1 : -1)));
  }
  // T_{1/sqrt3}: level-1 coefficients (1/2)(1/sqrt3), level-3 -(1/2)(1/sqrt3)^3.
  FieldElem inv_rt3 = FieldElem::inv_sqrt3_pow(1);
  CubeFunction noised = maj.noise(inv_rt3);
  CHECK(noised.fourier_coeff(1) ==
        Polynomial::constant(reg, FieldElem(rat(1, 2)) * inv_rt3));
  CHECK(noised.fourier_coeff(7) ==
        Polynomial::constant(reg, FieldElem(rat(-1, 2)) * inv_rt3.pow(3)));

  // T_1 f = f.
  CubeFunction same = maj.noise(FieldElem(1)).to_points();
  for (uint32_t x = 0; x < 8; ++x) CHECK(same.point(x) == maj.point(x));

  // Inf_1 = 1/2, I[f] = 3/2, Stab_{1/3} = 7/27.
  CHECK(maj.influence(0) == P(reg, "(1/2)"));
  CHECK(maj.total_influence() == P(reg, "(3/2)"));
  CHECK(maj.stability(FieldElem(rat(1, 3))) == P(reg, "(7/27)"));

  // Stab_rho[x1] = rho (dictator).
  CubeFunction dict(reg, 2, true);
  dict.set_fourier_coeff(1, Polynomial::constant(reg, FieldElem(1)));
  CHECK(dict.stability(FieldElem(rat(2, 7))) == P(reg, "(2/7)"));
}

TEST_CASE("Parseval and semigroup as formal identities") {
  std::mt19937 rng(3);
  for (int n = 1; n <= 5; ++n) {
    auto reg = make_registry();
    CubeFunction f = CubeFunction::atomic_points(reg, "f", n);
    CubeFunction fh = f.to_fourier();
    PolyAccum parseval(reg);
    parseval.add(f.expectation_sq());
    for (auto& [s, c] : fh.fourier_coeffs()) parseval.add_product(c, c, FieldElem(-1));
    CHECK(parseval.take().is_zero());

    FieldElem rho(rat(static_cast<long>(rng() % 5) - 2, 3));
    FieldElem sigma(rat(static_cast<long>(rng() % 7) - 3, 4));
    CubeFunction lhs = f.noise(rho).noise(sigma);
    CubeFunction rhs = f.noise(rho * sigma);
    for (uint32_t s = 0; s < (1u << n); ++s) CHECK(lhs.fourier_coeff(s) == rhs.fourier_coeff(s));
  }
}

TEST_CASE("total influence via edge expectation and Stab via expectation") {
  for (int n = 1; n <= 4; ++n) {
    auto reg = make_registry();
    CubeFunction f = CubeFunction::atomic_points(reg, "f", n);
    // I[f] = n * E over uniform cube edges of ((f(x)-f(y))/2)^2, where n is the
    // cube dimension: the dictator x1 has I = 1 and edge average 1/n.
    PolyAccum acc(reg);
    long ordered_pairs = long(n) * (long(1) << n);  // each edge counted twice
    for (uint32_t x = 0; x < (1u << n); ++x)
      for (int i = 0; i < n; ++i) {
        Polynomial d = (f.point(x) - f.point(x ^ (1u << i))).scale(FieldElem(rat(1, 2)));
        acc.add_product(d, d, FieldElem(Rational(2 * n) / Rational(2 * ordered_pairs)));
      }
    Polynomial via_edges = acc.take();
    CHECK(via_edges == f.total_influence());

    // Stab_rho[f] = E[f T_rho f].
    FieldElem rho(rat(1, 3));
    CubeFunction tf = f.noise(rho).to_points();
    PolyAccum st(reg);
    for (uint32_t x = 0; x < (1u << n); ++x)
      st.add_product(f.point(x), tf.point(x), FieldElem(Rational(1, long(1) << n)));
    CHECK(st.take() == f.stability(rho));

    // I[f] = sum_i Inf_i.
    PolyAccum ti(reg);
    for (int i = 0; i < n; ++i) ti.add(f.influence(i));
    CHECK(ti.take() == f.total_influence());
  }
}

TEST_CASE("exponent overflow is rejected") {
  auto reg = make_registry();
  VarId y = reg->scalar("Y");
  Monomial big(y, 1u << 31);
  CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("registry mismatch is rejected") {
  auto r1 = make_registry(), r2 = make_registry();
  Polynomial a = Polynomial::var(r1, r1->scalar("Y"));
  Polynomial b = Polynomial::var(r2, r2->scalar("Y"));
  CHECK_THROWS_AS(a + b, std::invalid_argument);
}
