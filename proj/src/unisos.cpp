#include "soskit/unisos.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "soskit/expsq.hpp"
#include "soskit/sdp.hpp"

namespace sos {

namespace {

Rational rationalize_cf(double x, uint64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite");
  bool neg = x < 0;
  double v = std::abs(x);
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(frac);
    if (fl > 9e18) break;
    Integer a(static_cast<unsigned long>(fl));
    Integer p2 = a * p1 + p0;
    Integer q2 = a * q1 + q0;
    if (q2 > Integer(static_cast<unsigned long>(max_den))) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double rem = frac - fl;
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
  }
  if (q1 == 0) return Rational(0);
  Rational r(p1, q1);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

using Gram = std::vector<std::vector<FieldElem>>;

// Exact PSD Grams G_j with p = sum_j (Gram form of G_j) * q_j, where block j
// ranges over the univariate monomial basis 1..t^{deg_j}. Numeric margin SDP,
// then progressive rationalization with a top-down triangular rebalance.
std::optional<std::vector<Gram>> gram_certificate(const UniPoly& p,
                                                  const std::vector<UniPoly>& qs) {
  int k = p.degree();
  std::vector<int> bdeg;  // basis top degree per block
  for (auto& q : qs) {
    int room = (k - q.degree()) / 2;
    if (room < 0) room = 0;
    bdeg.push_back(room);
  }
  int nblocks = static_cast<int>(qs.size());

  SdpProblem sdp;
  for (int j = 0; j < nblocks; ++j) sdp.block_sizes.push_back(bdeg[j] + 1);
  int lp = nblocks, lm = nblocks + 1, slack = nblocks + 2;
  sdp.block_sizes.push_back(1);
  sdp.block_sizes.push_back(1);
  sdp.block_sizes.push_back(1);
  sdp.num_constraints = k + 2;
  sdp.b.assign(k + 2, 0.0);
  double scale = 1.0;
  for (int m = 0; m <= k; ++m) {
    sdp.b[m] = p.coeff(m).get_d();
    scale = std::max(scale, std::abs(sdp.b[m]));
  }
  for (int j = 0; j < nblocks; ++j) {
    int n = bdeg[j] + 1;
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c)
        for (int d = 0; d <= qs[j].degree(); ++d) {
          int m = r + c + d;
          if (m > k) continue;
          double qc = qs[j].coeff(d).get_d();
          if (qc == 0) continue;
          // Position (r, c) with r < c contributes 2 qc X_rc, matching the
          // symmetric-pair entry convention with value qc.
          sdp.add_entry(m, j, r, c, qc);
        }
    // lambda I inside block j.
    for (int r = 0; r < n; ++r)
      for (int d = 0; d <= qs[j].degree(); ++d) {
        int m = 2 * r + d;
        if (m > k) continue;
        double qc = qs[j].coeff(d).get_d();
        if (qc == 0) continue;
        sdp.add_entry(m, lp, 0, 0, qc);
        sdp.add_entry(m, lm, 0, 0, -qc);
      }
  }
  {
    int c = k + 1;
    double cap = 1e4 * scale;
    sdp.b[c] = 1.0;
    double D = 0;
    for (int j = 0; j < nblocks; ++j) {
      for (int i = 0; i <= bdeg[j]; ++i) sdp.add_entry(c, j, i, i, 1.0 / cap);
      D += bdeg[j] + 1;
    }
    sdp.add_entry(c, lp, 0, 0, (D + 1) / cap);
    sdp.add_entry(c, lm, 0, 0, (-D + 1) / cap);
    sdp.add_entry(c, slack, 0, 0, 1.0 / cap);
  }
  sdp.add_entry(-1, lp, 0, 0, -1.0);
  sdp.add_entry(-1, lm, 0, 0, 1.0);
  for (int j = 0; j < nblocks; ++j)
    for (int i = 0; i <= bdeg[j]; ++i) sdp.add_entry(-1, j, i, i, 1e-5);

  SdpOptions opt;
  opt.tol_gap = 1e-12;
  opt.tol_feas = 1e-12;
  opt.max_iterations = 300;
  SdpSolution sol = solve_sdp(sdp, opt);
  // Imperfect numerics are acceptable here: the exact rationalization,
  // rebalancing, and LDL gate the result, so a stalled-but-close solve is
  // still a usable starting point.
  if (sol.X.empty() || sol.gap > 1e-3 || sol.primal_infeas > 1e-3) return std::nullopt;
  double lambda = sol.X[lp](0, 0) - sol.X[lm](0, 0);
  if (lambda < -1e-7) return std::nullopt;
  double zero_tol = 100.0 * std::max(1e-12, std::abs(lambda) * 1e-4);

  for (uint64_t cap : {uint64_t{1} << 8, uint64_t{1} << 24, uint64_t{1} << 44,
                       uint64_t{1} << 63}) {
    std::vector<Gram> grams(nblocks);
    for (int j = 0; j < nblocks; ++j) {
      int n = bdeg[j] + 1;
      grams[j].assign(n, std::vector<FieldElem>(n, FieldElem(0)));
      for (int r = 0; r < n; ++r)
        for (int c = r; c < n; ++c) {
          double v = 0.5 * (sol.X[j](r, c) + sol.X[j](c, r));
          if (r == c) v += lambda;
          if (std::abs(v) <= zero_tol) v = 0.0;
          grams[j][r][c] = FieldElem(rationalize_cf(v, cap));
          grams[j][c][r] = grams[j][r][c];
        }
    }
    // Residual per degree, fixed top-down; the designated entry for degree m
    // has top contribution exactly at m, so the sweep is triangular.
    auto coeff_of = [&](int m) {
      FieldElem have(0);
      for (int j = 0; j < nblocks; ++j) {
        int n = bdeg[j] + 1;
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d <= qs[j].degree(); ++d) {
              if (r + c + d != m) continue;
              have += grams[j][r][c] * FieldElem(qs[j].coeff(d));
            }
      }
      return have;
    };
    bool ok = true;
    for (int m = k; m >= 0 && ok; --m) {
      FieldElem diff = FieldElem(p.coeff(m)) - coeff_of(m);
      if (diff.is_zero()) continue;
      // Designated entry: block j, position (r, c) with r + c + deg(q_j) = m.
      bool placed = false;
      for (int j = 0; j < nblocks && !placed; ++j) {
        int top = qs[j].degree();
        int rc = m - top;
        if (rc < 0 || rc > 2 * bdeg[j]) continue;
        FieldElem lc{qs[j].leading()};
        int r = rc / 2, c = rc - rc / 2;
        if (r == c) {
          grams[j][r][r] += diff / lc;
        } else {
          FieldElem half = diff / lc * FieldElem(rat(1, 2));
          grams[j][r][c] += half;
          grams[j][c][r] += half;
        }
        placed = true;
      }
      if (!placed) ok = false;
    }
    if (!ok) continue;
    for (int m = 0; m <= k; ++m)
      if (coeff_of(m) != FieldElem(p.coeff(m))) {
        ok = false;
        break;
      }
    if (!ok) continue;
    bool psd = true;
    for (int j = 0; j < nblocks && psd; ++j) {
      try {
        field_ldl(grams[j]);
      } catch (const std::domain_error&) {
        psd = false;
      }
    }
    if (psd) return grams;
  }
  return std::nullopt;
}

SosWitness witness_from_gram(const Gram& G, const RegistryPtr& reg, VarId var,
                             const UniPoly& outer_factor) {
  FieldLdl ldl = field_ldl(G);
  int n = static_cast<int>(G.size());
  Polynomial a_poly = outer_factor.to_polynomial(reg, var);
  SosWitness w;
  for (int i = 0; i < n; ++i) {
    if (ldl.D[i].is_zero()) continue;
    std::vector<Rational> root_coeffs(n, Rational(0));
    for (int k = i; k < n; ++k) {
      if (ldl.L[k][i].is_zero()) continue;
      root_coeffs[k] = ldl.L[k][i].as_rational();
    }
    Polynomial root = UniPoly(std::move(root_coeffs)).to_polynomial(reg, var);
    w.append_square(ldl.D[i], root * a_poly);
  }
  return w;
}

}  // namespace

UniSosResult univariate_sos(const UniPoly& p, const RegistryPtr& reg, VarId var,
                            UniSosMode mode) {
  UniSosResult out;
  if (p.is_zero()) return out;
  if (p.degree() % 2 != 0)
    throw std::invalid_argument("univariate_sos: odd degree cannot be nonnegative on R");
  if (sgn(p.leading()) < 0)
    throw std::invalid_argument("univariate_sos: negative leading coefficient");
  if (p.degree() == 0) {
    if (p.coeff(0) < 0) throw std::invalid_argument("univariate_sos: negative constant");
    out.witness = SosWitness::constant(reg, FieldElem(p.coeff(0)));
    return out;
  }

  // Peel even multiplicities: p = A^2 B with B strictly positive on R when
  // p >= 0; the Gram step then runs on the well-conditioned interior part.
  UniPoly A = UniPoly::constant(1);
  UniPoly B = UniPoly::constant(p.leading());
  for (auto& f : p.squarefree_decomposition()) {
    UniPoly fp{std::vector<Rational>(f.coeffs)};
    for (int h = 0; h < f.multiplicity / 2; ++h) A = A * fp;
    if (f.multiplicity % 2) B = B * fp;
  }
  if (!(A * A * B == p)) throw std::logic_error("univariate_sos: square-free split failed");
  if (B.degree() > 0 && B.count_real_roots() > 0)
    throw std::invalid_argument("univariate_sos: polynomial is negative somewhere on R");

  if (B.degree() == 0) {
    out.witness = SosWitness::square(A.to_polynomial(reg, var), FieldElem(B.coeff(0)));
    return out;
  }
  if (auto G = gram_certificate(B, {UniPoly::constant(1)})) {
    out.witness = witness_from_gram((*G)[0], reg, var, A);
    return out;
  }
  if (mode == UniSosMode::Exact)
    throw std::runtime_error("univariate_sos: exact Gram rationalization failed");
  // Numeric path: shave a certified-nonnegative residual off B and retry.
  for (double shave : {1e-12, 1e-9, 1e-6}) {
    Rational s = rationalize_cf(shave, uint64_t{1} << 32);
    UniPoly shaved = B - UniPoly::constant(s);
    if (shaved.eval(Rational(0)) <= 0) continue;
    if (auto G = gram_certificate(shaved, {UniPoly::constant(1)})) {
      out.witness = witness_from_gram((*G)[0], reg, var, A);
      UniPoly r = A * A * UniPoly::constant(s);
      out.residual = r;
      out.residual_nonneg_certified = r.is_nonneg_on_reals();
      if (!out.residual_nonneg_certified)
        throw std::runtime_error("univariate_sos: residual not certifiably nonnegative");
      return out;
    }
  }
  throw std::runtime_error("univariate_sos: certification failed");
}

Claim univariate_interval_sos(const UniPoly& p, const Rational& a, const Rational& b,
                              const RegistryPtr& reg, VarId var) {
  if (a >= b) throw std::invalid_argument("univariate_interval_sos: empty interval");
  if (!p.is_nonneg_on_interval(a, b))
    throw std::invalid_argument("univariate_interval_sos: polynomial negative on [a, b]");
  Claim c;
  c.reg = reg;
  c.conclusion = p.to_polynomial(reg, var);
  c.degree = std::max(1, p.degree());
  if (p.is_zero()) return c;

  // Peel even multiplicities so interior tangencies do not degrade the Gram
  // step: p = A^2 B, the certificate for B multiplies through by A^2.
  UniPoly A = UniPoly::constant(1);
  UniPoly B = UniPoly::constant(p.leading());
  for (auto& f : p.squarefree_decomposition()) {
    UniPoly fp{std::vector<Rational>(f.coeffs)};
    for (int h = 0; h < f.multiplicity / 2; ++h) A = A * fp;
    if (f.multiplicity % 2) B = B * fp;
  }
  if (!(A * A * B == p))
    throw std::logic_error("univariate_interval_sos: square-free split failed");
  if (!B.is_nonneg_on_interval(a, b))
    throw std::logic_error("univariate_interval_sos: odd part changes sign inside [a, b]");

  std::vector<UniPoly> qs{UniPoly::constant(1)};
  std::vector<Polynomial> axioms;  // parallel to qs[1..]
  if (B.degree() % 2 == 0 && B.degree() >= 2) {
    // (b - Y)(Y - a) = -ab + (a + b) Y - Y^2
    UniPoly box({-a * b, a + b, Rational(-1)});
    qs.push_back(box);
    axioms.push_back(box.to_polynomial(reg, var));
  } else if (B.degree() % 2 == 1) {
    qs.push_back(UniPoly({-a, Rational(1)}));  // Y - a
    qs.push_back(UniPoly({b, Rational(-1)}));  // b - Y
    axioms.push_back(qs[1].to_polynomial(reg, var));
    axioms.push_back(qs[2].to_polynomial(reg, var));
  }
  auto grams = gram_certificate(B, qs);
  if (!grams)
    throw std::runtime_error("univariate_interval_sos: certification failed");
  c.u0 = witness_from_gram((*grams)[0], reg, var, A);
  for (size_t j = 1; j < qs.size(); ++j) {
    SosWitness w = witness_from_gram((*grams)[j], reg, var, A);
    if (w.empty()) continue;
    size_t idx = c.axioms.add_ineq(axioms[j - 1]);
    c.sync_multipliers();
    c.ineq_mult[idx].append(w);
  }
  auto rep = verify_claim(c);
  if (!rep.ok)
    throw std::logic_error("univariate_interval_sos: claim failed to verify: " + rep.diagnostic);
  return c;
}

}  // namespace sos
