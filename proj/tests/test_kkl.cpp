#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "soskit/kkl.hpp"

using namespace sos;

TEST_CASE("build_sse verifies exactly for small n and eps in {1/2, 1}") {
  for (int n = 1; n <= 3; ++n) {
    for (Rational eps : {rat(1, 2), rat(1)}) {
      Claim c = build_sse(n, eps);
      auto rep = verify_claim(c);
      INFO("n=", n, " diag: ", rep.diagnostic);
      CHECK(rep.ok);
      CHECK(c.degree == 4);
      CHECK(c.axioms.eqs().size() == (size_t{1} << n));
      CHECK(c.axioms.ineqs().empty());
    }
  }
}

TEST_CASE("build_sse numeric Remark 5.2: Stab <= E[f^2]^{5/4} for {-1,0,1} valued f") {
  std::mt19937 rng(23);
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
    double e2 = 0;
    for (auto& x : f) {
      x = static_cast<double>(static_cast<int>(rng() % 3) - 1);
      e2 += x * x;
    }
    e2 /= double(N);
    std::vector<double> fh = f;
    fwht(fh);
    double stab = 0;
    for (size_t s = 0; s < N; ++s)
      stab += fh[s] * fh[s] / double(N) / double(N) / std::pow(rt3, std::popcount(s));
    CHECK(stab <= std::pow(e2, 1.25) + 1e-12);
  }
}

TEST_CASE("build_kkl verifies exactly for n <= 3, K = 3") {
  for (int n = 2; n <= 3; ++n) {
    for (Rational eps : {rat(1), rat(1, 2)}) {
      KklParams p;
      p.n = n;
      p.eps = eps;
      p.K = 3;
      Claim c = build_kkl(p);
      auto rep = verify_claim(c);
      INFO("n=", n, " diag: ", rep.diagnostic);
      CHECK(rep.ok);
      CHECK(c.degree == 4);
    }
  }
  KklParams bad;
  bad.K = 4;
  CHECK_THROWS_AS(build_kkl(bad), std::invalid_argument);
}

TEST_CASE("KKL numeric Remark 5.4 on low-influence functions, n = 8") {
  std::mt19937 rng(29);
  int n = 8;
  size_t N = size_t{1} << n;
  int qualifying = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Random small-support perturbations of a constant reach tau <= 1/9.
    std::vector<double> f(N, 1.0);
    int k = static_cast<int>(rng() % 15);
    for (int t = 0; t < k; ++t) f[rng() % N] = -1.0;
    std::vector<double> inf(n, 0.0);
    for (size_t x = 0; x < N; ++x)
      for (int i = 0; i < n; ++i) {
        double d = (f[x] - f[x ^ (size_t{1} << i)]) / 2;
        inf[i] += d * d / double(N);
      }
    double tau = 0, total = 0;
    for (double v : inf) {
      tau = std::max(tau, v);
      total += v;
    }
    double mean = 0, esq = 0;
    for (double v : f) {
      mean += v / double(N);
      esq += v * v / double(N);
    }
    double var = esq - mean * mean;
    if (tau <= 0 || tau > 1.0 / 9.0) continue;
    ++qualifying;
    CHECK(total >= 0.5 * std::log(9.0 / tau) / std::log(9.0) * var - 1e-9);
  }
  CHECK(qualifying > 100);
}

TEST_CASE("equal-influence refutation, symbolic small n") {
  for (int n : {2, 4}) {
    KklRefutation r = build_kkl_refutation_symbolic(n);
    REQUIRE(r.claim.has_value());
    auto rep = verify_claim(*r.claim);
    INFO("n=", n, " diag: ", rep.diagnostic);
    CHECK(rep.ok);
    CHECK(r.claim->conclusion ==
          Polynomial::constant(r.claim->reg, FieldElem(-1)));
    CHECK(r.claim->degree <= 4);
    CHECK(r.margin > 0);
    CHECK(r.ledger.holds());
  }
}

TEST_CASE("Cor 5.5 scalar ledger at n in {81, 100, 1000000}") {
  for (unsigned long n : {81ul, 100ul, 1000000ul}) {
    ScalarLedger led = build_kkl_refutation_ledger(n);
    auto rep = check_ledger(led);
    INFO("n=", n, "\n", rep.table);
    CHECK(rep.all_pass);
  }
  CHECK_THROWS_AS(build_kkl_refutation_ledger(80), std::invalid_argument);

  // The slack to the (7/20) ln 3 bound shrinks as n grows (the chain approaches
  // it from below), while the bound still certifies.
  ScalarLedger a = build_kkl_refutation_ledger(100);
  ScalarLedger b = build_kkl_refutation_ledger(1000000);
  double margin_a = 0, margin_b = 0;
  for (auto& e : a.entries())
    if (e.name == "chain_sum") margin_a = e.rhs.lo_d() - e.lhs.hi_d();
  for (auto& e : b.entries())
    if (e.name == "chain_sum") margin_b = e.rhs.lo_d() - e.lhs.hi_d();
  CHECK(margin_b > 0);
  CHECK(margin_b < margin_a);
}

TEST_CASE("check_ledger negative control: falsified bound fails by name") {
  ScalarLedger led = build_kkl_refutation_ledger(100);
  led.add_le("final_03_bogus", "(7/20) ln 3 <= 0.3 (deliberately false)", []() {
    return std::make_pair(Interval(Rational(7, 20)) * log(Interval::exact_long(3)),
                          Interval(Rational(3, 10)));
  });
  auto rep = check_ledger(led);
  CHECK_FALSE(rep.all_pass);
  REQUIRE(rep.failures.size() == 1);
  CHECK(rep.failures[0] == "final_03_bogus");
}

TEST_CASE("spectral scalar family holds for all levels at accepted K") {
  // s (1/sqrt3)^{s-1} >= K (1/sqrt3)^{K-1} - s (1/sqrt3)^{K-1} for s in [1, n].
  for (long K : {3L, 5L, 7L}) {
    for (int s = 1; s <= 12; ++s) {
      FieldElem lhs = FieldElem(Rational(s)) * FieldElem::inv_sqrt3_pow(s - 1);
      FieldElem rhs = (FieldElem(Rational(K)) - FieldElem(Rational(s))) *
                      FieldElem::inv_sqrt3_pow(static_cast<unsigned>(K - 1));
      CHECK(lhs >= rhs);
    }
  }
}
