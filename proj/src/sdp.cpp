#include "soskit/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sos {

void SdpProblem::add_entry(int constraint, int block, int row, int col, double value) {
  if (value == 0.0) return;
  if (row > col) std::swap(row, col);
  entries.push_back(SdpEntry{constraint, block, row, col, value});
}

namespace {

using MatrixXd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct Workspace {
  std::vector<std::vector<const SdpEntry*>> by_constraint;  // [m+1], last = C
  std::vector<MatrixXd> C;
  int m = 0;
  int nblocks = 0;
  long double nu = 0;  // total dimension
};

void add_into(std::vector<MatrixXd>& mats, const SdpEntry& e, long double scale) {
  mats[e.block](e.row, e.col) += scale * e.value;
  if (e.row != e.col) mats[e.block](e.col, e.row) += scale * e.value;
}

std::vector<MatrixXd> zeros_like(const SdpProblem& p) {
  std::vector<MatrixXd> out;
  out.reserve(p.block_sizes.size());
  for (size_t b = 0; b < p.block_sizes.size(); ++b)
    out.push_back(MatrixXd::Zero(p.block_dim(b), p.block_dim(b)));
  return out;
}

long double inner(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
  long double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
  return s;
}

long double inner_sparse(const std::vector<const SdpEntry*>& a, const std::vector<MatrixXd>& x) {
  long double s = 0;
  for (const SdpEntry* e : a) {
    s += e->value * x[e->block](e->row, e->col);
    if (e->row != e->col) s += e->value * x[e->block](e->col, e->row);
  }
  return s;
}

long double fro(const std::vector<MatrixXd>& a) {
  long double s = 0;
  for (auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

std::vector<Eigen::MatrixXd> to_double(const std::vector<MatrixXd>& v) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(v.size());
  for (auto& m : v) out.push_back(m.cast<double>());
  return out;
}

// Largest alpha in (0, 1] with M + alpha dM psd, dampened by `frac`.
long double max_step(const std::vector<MatrixXd>& M, const std::vector<MatrixXd>& dM, long double frac) {
  long double alpha = 1.0L / frac;
  for (size_t b = 0; b < M.size(); ++b) {
    if (M[b].rows() == 0) continue;
    Eigen::LLT<MatrixXd> llt(M[b]);
    if (llt.info() != Eigen::Success) return 0.0L;
    MatrixXd L = llt.matrixL();
    MatrixXd W = L.triangularView<Eigen::Lower>().solve(dM[b]);
    MatrixXd Y = L.triangularView<Eigen::Lower>().solve(W.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd((Y + Y.transpose()) * 0.5L));
    long double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0L / lmin);
  }
  return std::min(1.0L, frac * alpha);
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt) {
  const int m = p.num_constraints;
  const int nb = static_cast<int>(p.block_sizes.size());
  Workspace ws;
  ws.m = m;
  ws.nblocks = nb;
  ws.by_constraint.assign(m, {});
  ws.C = zeros_like(p);
  for (auto& e : p.entries) {
    if (e.block < 0 || e.block >= nb || e.row >= p.block_dim(e.block) ||
        e.col >= p.block_dim(e.block))
      throw std::invalid_argument("solve_sdp: entry out of range");
    if (e.constraint == -1) {
      add_into(ws.C, e, p.maximize ? -1.0 : 1.0);
    } else {
      if (e.constraint >= m) throw std::invalid_argument("solve_sdp: bad constraint index");
      ws.by_constraint[e.constraint].push_back(&e);
    }
  }
  for (int b = 0; b < nb; ++b) ws.nu += p.block_dim(b);

  VectorXd bvec(m);
  for (int i = 0; i < m; ++i) bvec(i) = p.b[i];

  long double scale = opt.initial_scale;
  if (scale <= 0) {
    long double mx = 1.0;
    for (auto& e : p.entries) mx = std::max<long double>(mx, std::abs(e.value));
    for (int i = 0; i < m; ++i) mx = std::max(mx, std::abs(bvec(i)));
    scale = 10.0L * std::sqrt(mx);
  }

  std::vector<MatrixXd> X = zeros_like(p), S = zeros_like(p);
  for (int b = 0; b < nb; ++b) {
    X[b].setIdentity();
    X[b] *= scale;
    S[b].setIdentity();
    S[b] *= scale;
  }
  VectorXd y = VectorXd::Zero(m);

  SdpSolution sol;
  SdpSolution best;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<MatrixXd> Sinv = zeros_like(p);

  auto apply_A = [&](const std::vector<MatrixXd>& M) {
    VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = inner_sparse(ws.by_constraint[i], M);
    return v;
  };
  auto apply_AT = [&](const VectorXd& v) {
    std::vector<MatrixXd> M = zeros_like(p);
    for (int i = 0; i < m; ++i)
      for (const SdpEntry* e : ws.by_constraint[i]) add_into(M, *e, v(i));
    return M;
  };

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    // Residuals and convergence.
    VectorXd rp = bvec - apply_A(X);
    std::vector<MatrixXd> Rd = zeros_like(p);
    {
      std::vector<MatrixXd> ATy = apply_AT(y);
      for (int b = 0; b < nb; ++b) Rd[b] = ws.C[b] - S[b] - ATy[b];
    }
    long double mu = inner(X, S) / ws.nu;
    if (!std::isfinite((double)mu) || !std::isfinite((double)rp.norm())) {
      best.status = best_score <= 1e-6 ? SdpStatus::Optimal : SdpStatus::NumericalTrouble;
      best.message = "stopped on non-finite iterate; best iterate returned";
      return best;
    }
    long double pobj = inner(ws.C, X);
    long double dobj = bvec.dot(y);
    long double relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    long double pinf = rp.norm() / (1 + bvec.norm());
    long double dinf = fro(Rd) / (1 + fro(ws.C));
    sol.iterations = iter;
    sol.primal_obj = static_cast<double>(p.maximize ? -pobj : pobj);
    sol.dual_obj = static_cast<double>(p.maximize ? -dobj : dobj);
    sol.gap = static_cast<double>(relgap);
    sol.primal_infeas = static_cast<double>(pinf);
    sol.dual_infeas = static_cast<double>(dinf);
    double score = std::max({sol.gap, sol.primal_infeas, sol.dual_infeas});
    if (std::isfinite(score) && score < best_score) {
      best_score = score;
      best = sol;
      best.X = to_double(X);
      best.S = to_double(S);
      best.y = y.cast<double>();
    }
    if (relgap <= opt.tol_gap && pinf <= opt.tol_feas && dinf <= opt.tol_feas) {
      sol.status = SdpStatus::Optimal;
      sol.X = to_double(X);
      sol.S = to_double(S);
      sol.y = y.cast<double>();
      return sol;
    }

    // Factor S and X.
    bool ok = true;
    std::vector<Eigen::LLT<MatrixXd>> sllt;
    sllt.reserve(nb);
    for (int b = 0; b < nb; ++b) {
      sllt.emplace_back(S[b]);
      if (sllt.back().info() != Eigen::Success) ok = false;
    }
    if (!ok) {
      best.status = best_score <= 1e-6 ? SdpStatus::Optimal : SdpStatus::NumericalTrouble;
      best.message = "dual block lost positive definiteness; best iterate returned";
      return best;
    }
    for (int b = 0; b < nb; ++b)
      Sinv[b] = sllt[b].solve(MatrixXd::Identity(p.block_dim(b), p.block_dim(b)));

    // Schur complement M_ij = <A_i, X A_j S^{-1}>.
    MatrixXd M(m, m);
    std::vector<MatrixXd> W = zeros_like(p);
    for (int j = 0; j < m; ++j) {
      for (int b = 0; b < nb; ++b) W[b].setZero();
      for (const SdpEntry* e : ws.by_constraint[j]) add_into(W, *e, 1.0);
      for (int b = 0; b < nb; ++b) W[b] = X[b] * W[b] * Sinv[b];
      for (int i = 0; i < m; ++i) M(i, j) = inner_sparse(ws.by_constraint[i], W);
    }
    // Regularized factorization with one round of iterative refinement; the
    // Schur complement degenerates near optimal faces.
    long double reg = 1e-16L * std::max<long double>(1.0L, M.diagonal().cwiseAbs().maxCoeff());
    MatrixXd Mreg = M + reg * MatrixXd::Identity(m, m);
    Eigen::PartialPivLU<MatrixXd> lu(Mreg);
    auto solve_normal = [&](const VectorXd& rhs) {
      VectorXd dy = lu.solve(rhs);
      VectorXd resid = rhs - M * dy;
      dy += lu.solve(resid);
      return dy;
    };

    auto solve_direction = [&](long double sigma_mu, const std::vector<MatrixXd>* corr_XdS)
        -> std::tuple<std::vector<MatrixXd>, VectorXd, std::vector<MatrixXd>> {
      // M dy = b + <A_i, (X Rd + corr) S^{-1} - sigma_mu S^{-1}>  (from
      // dX S + X dS = sigma_mu I - X S - corr and A(X + dX) = b).
      std::vector<MatrixXd> T = zeros_like(p);
      for (int b = 0; b < nb; ++b) {
        T[b] = X[b] * Rd[b];
        if (corr_XdS) T[b] += (*corr_XdS)[b];
        T[b] = T[b] * Sinv[b];
        if (sigma_mu != 0) T[b] -= sigma_mu * Sinv[b];
      }
      VectorXd rhs = bvec;
      for (int i = 0; i < m; ++i) rhs(i) += inner_sparse(ws.by_constraint[i], T);
      VectorXd dy = solve_normal(rhs);
      std::vector<MatrixXd> dS = zeros_like(p);
      {
        std::vector<MatrixXd> ATdy = apply_AT(dy);
        for (int b = 0; b < nb; ++b) dS[b] = Rd[b] - ATdy[b];
      }
      std::vector<MatrixXd> dX = zeros_like(p);
      for (int b = 0; b < nb; ++b) {
        MatrixXd t = X[b] * dS[b];
        if (corr_XdS) t += (*corr_XdS)[b];
        dX[b] = -X[b] - t * Sinv[b];
        if (sigma_mu != 0) dX[b] += sigma_mu * Sinv[b];
        dX[b] = 0.5 * (dX[b] + dX[b].transpose()).eval();
      }
      return {dX, dy, dS};
    };

    // Predictor.
    auto [dXa, dya, dSa] = solve_direction(0.0, nullptr);
    long double ap = max_step(X, dXa, 1.0L);
    long double ad = max_step(S, dSa, 1.0L);
    long double mu_aff = 0;
    {
      std::vector<MatrixXd> Xa = X, Sa = S;
      for (int b = 0; b < nb; ++b) {
        Xa[b] += ap * dXa[b];
        Sa[b] += ad * dSa[b];
      }
      mu_aff = inner(Xa, Sa) / ws.nu;
    }
    long double sigma = std::pow(std::max<long double>(0.0L, mu_aff / mu), 3.0L);
    sigma = std::min<long double>(1.0L, std::max<long double>(1e-10L, sigma));

    // Corrector with the Mehrotra term dXa dSa.
    std::vector<MatrixXd> corr = zeros_like(p);
    for (int b = 0; b < nb; ++b) corr[b] = dXa[b] * dSa[b];
    auto [dX, dy, dS] = solve_direction(sigma * mu, &corr);

    long double alpha_p = max_step(X, dX, static_cast<long double>(opt.step_fraction));
    long double alpha_d = max_step(S, dS, static_cast<long double>(opt.step_fraction));
    bool finite_dir = true;
    for (int b = 0; b < nb && finite_dir; ++b)
      finite_dir = dX[b].allFinite() && dS[b].allFinite();
    if (!finite_dir || alpha_p <= 1e-12 || alpha_d <= 1e-12) {
      best.status = best_score <= 1e-6 ? SdpStatus::Optimal : SdpStatus::NumericalTrouble;
      best.message = "step size collapsed; best iterate returned";
      return best;
    }
    for (int b = 0; b < nb; ++b) {
      X[b] += alpha_p * dX[b];
      S[b] += alpha_d * dS[b];
    }
    y += alpha_d * dy;
  }
  best.status = best_score <= 1e-6 ? SdpStatus::Optimal : SdpStatus::IterLimit;
  best.message = "iteration cap reached; best iterate returned";
  return best;
}

}  // namespace sos
