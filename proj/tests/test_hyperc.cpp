#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "soskit/hyperc.hpp"

using namespace sos;

TEST_CASE("hc4 pair: n=0 trivial, n=1 single-function gap is (8/9) fhat(1)^4") {
  Claim c0 = build_hc4_pair(0, MomentProfile::rademacher());
  CHECK(c0.conclusion.is_zero());
  CHECK(verify_claim(c0).ok);

  Claim c1 = build_hc4_pair(1, MomentProfile::rademacher(), /*identical=*/true);
  CHECK(verify_claim(c1).ok);
  auto reg = c1.reg;
  Polynomial b = Polynomial::var(reg, *reg->find("f1^1"));
  CHECK(c1.conclusion == (b * b * b * b).scale(FieldElem(rat(8, 9))));
  REQUIRE(c1.u0.size() == 1);
  CHECK(c1.u0.terms()[0].weight == FieldElem(rat(8, 9)));
}

TEST_CASE("hc4 pair verifies for n <= 3 under Rademacher and Gaussian") {
  for (int n = 1; n <= 3; ++n) {
    for (auto prof : {MomentProfile::rademacher(), MomentProfile::gaussian()}) {
      Claim c = build_hc4_pair(n, prof);
      auto rep = verify_claim(c);
      INFO("n = ", n, " diag: ", rep.diagnostic);
      CHECK(rep.ok);
      CHECK(c.axioms.empty());
      CHECK(c.degree == 4);
    }
  }
}

TEST_CASE("hc4 pair numeric spot check: gap nonnegative at random points") {
  Claim c = build_hc4_pair(2, MomentProfile::gaussian());
  REQUIRE(verify_claim(c).ok);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  auto vars = c.conclusion.variables();
  for (int t = 0; t < 1000; ++t) {
    std::unordered_map<VarId, double> pt;
    for (VarId v : vars) pt[v] = d(rng);
    CHECK(c.conclusion.eval_double(pt) >= -1e-9);
  }
}

TEST_CASE("restricting f2 to the constant 1 gives the single-function form") {
  auto reg = make_registry();
  HcContext ctx(reg, std::vector<MomentProfile>(2, MomentProfile::rademacher()));
  FourierMap f1;
  for (uint32_t s = 0; s < 4; ++s)
    f1.emplace(s, Polynomial::var(reg, reg->fourier_coeff("f", s)));
  FourierMap one{{0u, Polynomial::constant(reg, FieldElem(1))}};
  Claim c = build_hc4_pair(ctx, f1, one);
  CHECK(verify_claim(c).ok);
  // Conclusion is E[f^2] * 1 - E[(T f)^2 (T 1)^2] = E[f^2] - E[(T f)^2] >= 0.
  Polynomial p = ctx.realize(f1, false);
  Polynomial tp = ctx.realize(f1, true);
  CHECK(c.conclusion == ctx.expect_poly(p * p) - ctx.expect_poly(tp * tp));
}

TEST_CASE("hc4 bounded: zero gap at k1=k2=0; verifies for mixed bounds") {
  Claim c0 = build_hc4_bounded(2, 0, 0, MomentProfile::rademacher());
  CHECK(c0.conclusion.is_zero());
  CHECK(verify_claim(c0).ok);

  Claim c = build_hc4_bounded(2, 1, 1, MomentProfile::rademacher());
  CHECK(verify_claim(c).ok);

  Claim cg = build_hc4_bounded(2, 1, 2, MomentProfile::gaussian());
  CHECK(verify_claim(cg).ok);
}

TEST_CASE("hc_2r: r=0 trivial, r=1 equals bounded pair, r=2 degree-8 claim") {
  auto reg = make_registry();
  HcContext ctx(reg, std::vector<MomentProfile>(2, MomentProfile::rademacher()));
  auto mk = [&](const std::string& fn, int bound) {
    FourierMap f;
    for (uint32_t s = 0; s < 4; ++s) {
      if (std::popcount(s) > bound) continue;
      f.emplace(s, Polynomial::var(reg, reg->fourier_coeff(fn, s)));
    }
    return f;
  };
  FourierMap f = mk("f", 1);
  Claim r0 = build_hc_2r(ctx, {f}, {1}, 0);
  CHECK(r0.conclusion.is_zero());
  CHECK(verify_claim(r0).ok);

  Claim r1 = build_hc_2r(ctx, {f, mk("g", 1)}, {1, 1}, 1);
  CHECK(verify_claim(r1).ok);

  Claim r2 = build_hc_2r(ctx, {f, f, f, f}, {1, 1, 1, 1}, 2);
  auto rep = verify_claim(r2);
  INFO(rep.diagnostic);
  CHECK(rep.ok);
  CHECK(r2.degree == 8);
}

TEST_CASE("hc_q: q=2 zero gap; q=4 weaker than the sharp pair constant; q=8 Gaussian") {
  Claim q2 = build_hc_q(1, 1, 2, MomentProfile::rademacher());
  CHECK(q2.conclusion.is_zero());

  CHECK(hc_q_sqrt3_exponent(4, 1) == 4);   // 3^2 = 9 vs sharp 1
  CHECK(hc_q_sqrt3_exponent(8, 1) == 16);  // sqrt3^16

  Claim q4 = build_hc_q(1, 1, 4, MomentProfile::rademacher());
  CHECK(verify_claim(q4).ok);
  // Constant 9 E[f^2]^2 - E[f^4]: strictly weaker than the sharp 8/9 fhat^4 gap;
  // the conclusion at fhat0=0, fhat1=1 equals 9 - 1 = 8 (sharp gap would be 8/9).
  auto reg = q4.reg;
  std::unordered_map<VarId, FieldElem> pt{{*reg->find("f^0"), FieldElem(0)},
                                          {*reg->find("f^1"), FieldElem(1)}};
  CHECK(q4.conclusion.eval(pt) == FieldElem(8));

  Claim q8r = build_hc_q(1, 1, 8, MomentProfile::rademacher());
  CHECK(verify_claim(q8r).ok);

  Claim q8g = build_hc_q(1, 1, 8, MomentProfile::gaussian());
  auto rep = verify_claim(q8g);
  INFO(rep.diagnostic);
  CHECK(rep.ok);

  CHECK_THROWS(build_hc_q(1, 1, 3, MomentProfile::rademacher()));
}

TEST_CASE("numeric Theorem 4.1/4.2 sanity on random functions, n <= 10") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  auto fwht = [](std::vector<double>& v) {
    for (size_t len = 1; len < v.size(); len <<= 1)
      for (size_t i = 0; i < v.size(); i += len << 1)
        for (size_t j = i; j < i + len; ++j) {
          double a = v[j] + v[j + len], b = v[j] - v[j + len];
          v[j] = a;
          v[j + len] = b;
        }
  };
  const double rt3 = std::sqrt(3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng() % 9);
    size_t N = size_t{1} << n;
    std::vector<double> f(N);
    for (auto& x : f) x = g(rng);
    // Spectrum, noise, invert.
    std::vector<double> fh = f;
    fwht(fh);
    for (auto& x : fh) x /= double(N);
    double e2 = 0;
    std::vector<double> tf(N);
    for (size_t s = 0; s < N; ++s) {
      e2 += fh[s] * fh[s];
      tf[s] = fh[s] / std::pow(rt3, std::popcount(s));
    }
    fwht(tf);  // point values of T f
    double e4 = 0;
    for (double x : tf) e4 += x * x * x * x;
    e4 /= double(N);
    CHECK(e4 <= e2 * e2 + 1e-12);
  }
  // Theorem 4.2 form for degree-k functions: E[f^4] <= 9^k E[f^2]^2.
  for (int trial = 0; trial < 200; ++trial) {
    int n = 4 + static_cast<int>(rng() % 5);
    int k = 1 + static_cast<int>(rng() % 3);
    size_t N = size_t{1} << n;
    std::vector<double> fh(N, 0.0);
    for (size_t s = 0; s < N; ++s)
      if (std::popcount(s) <= k) fh[s] = g(rng);
    double e2 = 0;
    for (double x : fh) e2 += x * x;
    std::vector<double> f = fh;
    fwht(f);
    double e4 = 0;
    for (double x : f) e4 += x * x * x * x;
    e4 /= double(N);
    CHECK(e4 <= std::pow(9.0, k) * e2 * e2 + 1e-9 * std::max(1.0, e4));
  }
}
