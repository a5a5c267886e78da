#include "soskit/lasserre.hpp"

#include "soskit/expsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace sos {

std::vector<Polynomial> PolyProgram::boolean_eqs() const {
  std::vector<Polynomial> out;
  for (auto& [v, kind] : boolean_vars) {
    Polynomial x = Polynomial::var(reg, v);
    if (kind == BoolKind::ZeroOne)
      out.push_back(x * x - x);
    else
      out.push_back(x * x - Polynomial::constant(reg, FieldElem(1)));
  }
  return out;
}

ReducedPoly reduce_boolean(const Polynomial& p, const PolyProgram& prog) {
  ReducedPoly out;
  std::map<VarId, PolyAccum> mults;
  PolyAccum reduced(p.registry());
  for (auto& [m, c] : p.terms()) {
    // Reduce one variable exponent at a time, tracking quotients.
    std::vector<std::pair<VarId, uint32_t>> factors(m.factors().begin(), m.factors().end());
    FieldElem coef = c;
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& [v, e] : factors) {
        auto it = prog.boolean_vars.find(v);
        if (it == prog.boolean_vars.end() || e < 2) continue;
        // x^e = x^{e-2} * x^2; x^2 = 1 + (x^2-1)  or  x + (x^2-x).
        uint32_t rest_exp =
            it->second == PolyProgram::BoolKind::PlusMinus ? e - 2 : e - 1;
        std::vector<std::pair<VarId, uint32_t>> qfac;
        for (auto& [w, ew] : factors)
          qfac.emplace_back(w, w == v ? e - 2 : ew);
        std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
        mm.emplace(Monomial::from_factors(std::move(qfac)), coef);
        auto ins = mults.try_emplace(v, PolyAccum(p.registry()));
        ins.first->second.add(Polynomial::from_map(p.registry(), std::move(mm)));
        e = rest_exp;
        changed = true;
        break;
      }
    }
    std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
    mm.emplace(Monomial::from_factors(std::move(factors)), coef);
    reduced.add(Polynomial::from_map(p.registry(), std::move(mm)));
  }
  out.reduced = reduced.take();
  for (auto& [v, acc] : mults) {
    Polynomial q = acc.take();
    if (!q.is_zero()) out.multipliers.emplace(v, std::move(q));
  }
  return out;
}

namespace {

std::vector<VarId> program_vars(const PolyProgram& prog) {
  std::set<VarId> vars;
  for (VarId v : prog.objective.variables()) vars.insert(v);
  for (auto& q : prog.ineqs)
    for (VarId v : q.variables()) vars.insert(v);
  for (auto& r : prog.eqs)
    for (VarId v : r.variables()) vars.insert(v);
  for (auto& [v, k] : prog.boolean_vars) vars.insert(v);
  return {vars.begin(), vars.end()};
}

void gen_monomials(const std::vector<VarId>& vars, const PolyProgram& prog, size_t idx,
                   int remaining_degree, std::vector<std::pair<VarId, uint32_t>>& current,
                   std::vector<Monomial>& out, size_t cap) {
  if (out.size() > cap) throw std::length_error("monomial index exceeds the configured cap");
  if (idx == vars.size()) {
    out.push_back(Monomial::from_factors(current));
    return;
  }
  VarId v = vars[idx];
  int max_e = prog.boolean_vars.count(v) ? 1 : remaining_degree;
  for (int e = 0; e <= max_e && e <= remaining_degree; ++e) {
    if (e) current.emplace_back(v, static_cast<uint32_t>(e));
    gen_monomials(vars, prog, idx + 1, remaining_degree - e, current, out, cap);
    if (e) current.pop_back();
  }
}

std::vector<Monomial> monomial_basis(const PolyProgram& prog, int degree, size_t cap) {
  std::vector<VarId> vars = program_vars(prog);
  std::vector<Monomial> out;
  std::vector<std::pair<VarId, uint32_t>> current;
  gen_monomials(vars, prog, 0, degree, current, out, cap);
  std::sort(out.begin(), out.end());
  return out;
}

// Adds "coefficient c on X_{ij}" respecting the symmetric-pair convention.
void pos_coeff(SdpProblem& sdp, int constraint, int blk, int i, int j, double c) {
  if (i > j) std::swap(i, j);
  sdp.add_entry(constraint, blk, i, j, i == j ? c : c / 2);
}

struct MonoIndex {
  std::map<std::string, size_t> by_key;
  std::vector<Monomial> monos;
  const VarRegistry* reg;
  size_t index(const Monomial& m) {
    std::string k = m.str(*reg);
    auto it = by_key.find(k);
    if (it != by_key.end()) return it->second;
    by_key.emplace(k, monos.size());
    monos.push_back(m);
    return monos.size() - 1;
  }
  std::optional<size_t> find(const Monomial& m) const {
    auto it = by_key.find(m.str(*reg));
    if (it == by_key.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace

MomentRelaxation build_moment(const PolyProgram& prog, int d, int monomial_cap) {
  if (d % 2 != 0 || d <= 0) throw std::invalid_argument("build_moment: degree must be even");
  if (prog.objective.degree() > d) throw std::invalid_argument("build_moment: d < deg(p)");
  MomentRelaxation rel;
  rel.reg = prog.reg;
  rel.degree = d;
  rel.sense = prog.sense;
  rel.principal_basis = monomial_basis(prog, d / 2, monomial_cap);

  MonoIndex idx;
  idx.reg = prog.reg.get();
  // Fill the index with reduced pair products and remember a representative
  // principal position for each.
  size_t nb = rel.principal_basis.size();
  std::map<size_t, std::pair<int, int>> rep_pos;  // monomial index -> (i, j)
  for (size_t i = 0; i < nb; ++i)
    for (size_t j = i; j < nb; ++j) {
      Polynomial prod(prog.reg, FieldElem(1));
      {
        std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
        mm.emplace(rel.principal_basis[i] * rel.principal_basis[j], FieldElem(1));
        prod = Polynomial::from_map(prog.reg, std::move(mm));
      }
      Polynomial red = reduce_boolean(prod, prog).reduced;
      if (red.term_count() != 1)
        throw std::logic_error("build_moment: unexpected reduction of a monomial");
      size_t k = idx.index(red.terms()[0].first);
      rep_pos.try_emplace(k, std::make_pair(static_cast<int>(i), static_cast<int>(j)));
    }
  rel.monomials = idx.monos;

  SdpProblem& sdp = rel.sdp;
  sdp.block_sizes.push_back(static_cast<int>(nb));
  std::vector<std::vector<Monomial>> loc_bases;
  for (auto& q : prog.ineqs) {
    loc_bases.push_back(monomial_basis(prog, (d - q.degree()) / 2, monomial_cap));
    sdp.block_sizes.push_back(static_cast<int>(loc_bases.back().size()));
  }
  sdp.maximize = prog.sense == Sense::Max;

  int c_next = 0;
  auto add_constraint = [&](double rhs) {
    sdp.b.push_back(rhs);
    return c_next++;
  };

  // L(1) = 1 at the representative of the empty monomial.
  {
    Polynomial one(prog.reg, FieldElem(1));
    size_t k = *idx.find(Monomial());
    auto [i, j] = rep_pos.at(k);
    int c = add_constraint(1.0);
    pos_coeff(sdp, c, 0, i, j, 1.0);
  }
  // Principal linking: every non-representative position equals its
  // representative.
  for (size_t i = 0; i < nb; ++i)
    for (size_t j = i; j < nb; ++j) {
      Monomial prod = rel.principal_basis[i] * rel.principal_basis[j];
      std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
      mm.emplace(prod, FieldElem(1));
      Polynomial red = reduce_boolean(Polynomial::from_map(prog.reg, std::move(mm)), prog).reduced;
      size_t k = *idx.find(red.terms()[0].first);
      auto [ri, rj] = rep_pos.at(k);
      if (ri == static_cast<int>(i) && rj == static_cast<int>(j)) continue;
      int c = add_constraint(0.0);
      pos_coeff(sdp, c, 0, static_cast<int>(i), static_cast<int>(j), 1.0);
      pos_coeff(sdp, c, 0, ri, rj, -1.0);
    }
  // Localizer linking: position (i, j) of the q-block equals sum over the
  // terms of q of the reduced moments.
  for (size_t qi = 0; qi < prog.ineqs.size(); ++qi) {
    auto& basis = loc_bases[qi];
    for (size_t i = 0; i < basis.size(); ++i)
      for (size_t j = i; j < basis.size(); ++j) {
        std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
        mm.emplace(basis[i] * basis[j], FieldElem(1));
        Polynomial prod = Polynomial::from_map(prog.reg, std::move(mm));
        Polynomial red = reduce_boolean(prod * prog.ineqs[qi], prog).reduced;
        int c = add_constraint(0.0);
        pos_coeff(sdp, c, static_cast<int>(qi) + 1, static_cast<int>(i), static_cast<int>(j),
                  1.0);
        for (auto& [mono, coef] : red.terms()) {
          auto k = idx.find(mono);
          if (!k) throw std::logic_error("build_moment: localizer monomial has no moment");
          auto [ri, rj] = rep_pos.at(*k);
          pos_coeff(sdp, c, 0, ri, rj, -coef.to_double());
        }
      }
  }
  // General equalities: L(r m) = 0 for every monomial m with deg(r m) <= d.
  for (auto& r : prog.eqs) {
    std::vector<Monomial> ms = monomial_basis(prog, d - r.degree(), monomial_cap);
    for (auto& m : ms) {
      std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
      mm.emplace(m, FieldElem(1));
      Polynomial red =
          reduce_boolean(Polynomial::from_map(prog.reg, std::move(mm)) * r, prog).reduced;
      if (red.is_zero()) continue;
      int c = add_constraint(0.0);
      for (auto& [mono, coef] : red.terms()) {
        auto k = idx.find(mono);
        if (!k) throw std::logic_error("build_moment: equality monomial has no moment");
        auto [ri, rj] = rep_pos.at(*k);
        pos_coeff(sdp, c, 0, ri, rj, coef.to_double());
      }
    }
  }
  sdp.num_constraints = c_next;

  // Objective: L(p) on representatives.
  Polynomial pred = reduce_boolean(prog.objective, prog).reduced;
  for (auto& [mono, coef] : pred.terms()) {
    auto k = idx.find(mono);
    if (!k) throw std::logic_error("build_moment: objective monomial has no moment");
    auto [ri, rj] = rep_pos.at(*k);
    pos_coeff(sdp, -1, 0, ri, rj, coef.to_double());
  }
  for (auto& [k, pos] : rep_pos)
    rel.representative[k] = std::make_pair(0, pos);
  return rel;
}

PseudoExpectation solve_moment(const MomentRelaxation& rel, const SdpOptions& opt) {
  SdpSolution sol = solve_sdp(rel.sdp, opt);
  PseudoExpectation pe;
  pe.status = sol.status;
  pe.gap = sol.gap;
  pe.value = sol.primal_obj;
  if (!sol.X.empty()) {
    for (auto& [k, bp] : rel.representative) {
      auto [blk, pos] = bp;
      pe.moments[rel.monomials[k].str(*rel.reg)] = sol.X[blk](pos.first, pos.second);
    }
  }
  return pe;
}

MomentFeasibility moment_feasible(const PolyProgram& prog, int d, const SdpOptions& opt) {
  // Margin variant of the moment SDP: every block must be >= lambda I, with
  // lambda = lp - lm maximized. Block entries then represent M(y) - lambda I.
  MomentRelaxation rel = build_moment(prog, d);
  SdpProblem sdp = rel.sdp;
  int lp = static_cast<int>(sdp.block_sizes.size());
  sdp.block_sizes.push_back(1);
  int lm = lp + 1;
  sdp.block_sizes.push_back(1);
  int slack = lm + 1;
  sdp.block_sizes.push_back(1);

  // Rewrite every constraint row: positions are X + lambda I, so each diagonal
  // coefficient c at (blk, i, i) contributes c * lambda as well.
  std::vector<double> lambda_coeff(sdp.num_constraints, 0.0);
  for (auto& e : sdp.entries) {
    if (e.constraint < 0 || e.row != e.col) continue;
    lambda_coeff[e.constraint] += e.value;
  }
  for (int c = 0; c < sdp.num_constraints; ++c) {
    if (lambda_coeff[c] == 0.0) continue;
    sdp.add_entry(c, lp, 0, 0, lambda_coeff[c]);
    sdp.add_entry(c, lm, 0, 0, -lambda_coeff[c]);
  }
  // Trace cap keeps the feasibility problem bounded.
  double cap = 0;
  for (int b = 0; b < lp; ++b) cap += sdp.block_dim(b);
  cap = 10.0 * cap + 10.0;
  {
    int c = sdp.num_constraints++;
    sdp.b.push_back(cap);
    double D = 0;
    for (int b = 0; b < lp; ++b) {
      for (int i = 0; i < sdp.block_dim(b); ++i) sdp.add_entry(c, b, i, i, 1.0);
      D += sdp.block_dim(b);
    }
    sdp.add_entry(c, lp, 0, 0, D + 1.0);
    sdp.add_entry(c, lm, 0, 0, -D + 1.0);
    sdp.add_entry(c, slack, 0, 0, 1.0);
  }
  // Objective: maximize lambda (ignore the original objective).
  sdp.entries.erase(std::remove_if(sdp.entries.begin(), sdp.entries.end(),
                                   [](const SdpEntry& e) { return e.constraint == -1; }),
                    sdp.entries.end());
  sdp.maximize = false;
  sdp.add_entry(-1, lp, 0, 0, -1.0);
  sdp.add_entry(-1, lm, 0, 0, 1.0);

  SdpSolution sol = solve_sdp(sdp, opt);
  MomentFeasibility out;
  out.pe.status = sol.status;
  out.pe.gap = sol.gap;
  if (sol.X.empty()) return out;
  out.margin = sol.X[lp](0, 0) - sol.X[lm](0, 0);
  for (auto& [k, bp] : rel.representative) {
    auto [blk, pos] = bp;
    double v = sol.X[blk](pos.first, pos.second);
    if (pos.first == pos.second) v += out.margin;
    out.pe.moments[rel.monomials[k].str(*rel.reg)] = v;
  }
  return out;
}

namespace {

Polynomial mono_poly(const RegistryPtr& reg, const Monomial& m) {
  std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
  mm.emplace(m, FieldElem(1));
  return Polynomial::from_map(reg, std::move(mm));
}

}  // namespace

SosSide build_sos_side(const PolyProgram& prog, int d, const Rational& beta, bool products,
                       double trace_cap) {
  if (d % 2 != 0 || d <= 0) throw std::invalid_argument("build_sos_side: degree must be even");
  SosSide side;
  side.degree = d;
  side.beta = beta;
  side.prog = &prog;

  // The multiplied inequality axioms: 1 (for u0), the q_i, their degree-<= d
  // products when requested, and the objective axiom.
  Polynomial one(prog.reg, FieldElem(1));
  side.multiplied_axioms.push_back(one);
  std::vector<Polynomial> qs = prog.ineqs;
  if (products) {
    // All subset products of the q_i with total degree <= d (pairs, triples, ...).
    std::vector<Polynomial> all = qs;
    size_t base = qs.size();
    std::vector<Polynomial> prev = qs;
    std::vector<size_t> prev_first;  // index of the largest base factor used
    for (size_t i = 0; i < qs.size(); ++i) prev_first.push_back(i);
    while (true) {
      std::vector<Polynomial> cur;
      std::vector<size_t> cur_first;
      for (size_t pi = 0; pi < prev.size(); ++pi)
        for (size_t j = prev_first[pi] + 1; j < base; ++j) {
          Polynomial prod = prev[pi] * qs[j];
          if (prod.degree() > d) continue;
          cur.push_back(prod);
          cur_first.push_back(j);
        }
      if (cur.empty()) break;
      all.insert(all.end(), cur.begin(), cur.end());
      prev = std::move(cur);
      prev_first = std::move(cur_first);
    }
    qs = std::move(all);
  }
  Polynomial obj_axiom = prog.sense == Sense::Min
                             ? Polynomial::constant(prog.reg, FieldElem(beta)) - prog.objective
                             : prog.objective - Polynomial::constant(prog.reg, FieldElem(beta));
  for (auto& q : qs)
    if (q.degree() <= d) side.multiplied_axioms.push_back(q);
  side.multiplied_axioms.push_back(obj_axiom);

  SdpProblem& sdp = side.sdp;
  for (auto& q : side.multiplied_axioms) {
    side.gram_bases.push_back(monomial_basis(prog, (d - std::max(0, q.degree())) / 2, 250000));
    sdp.block_sizes.push_back(static_cast<int>(side.gram_bases.back().size()));
  }
  int nGram = static_cast<int>(side.multiplied_axioms.size());
  side.lambda_block = nGram;  // lp
  sdp.block_sizes.push_back(1);
  sdp.block_sizes.push_back(1);  // lm = lambda_block + 1
  // Free multipliers for general equalities: one split pair per coefficient.
  side.eq_axioms = prog.eqs;
  int free_dim = 0;
  for (auto& r : prog.eqs) {
    side.eq_bases.push_back(monomial_basis(prog, d - r.degree(), 250000));
    free_dim += 2 * static_cast<int>(side.eq_bases.back().size());
  }
  side.free_block = nGram + 2;
  sdp.block_sizes.push_back(std::max(1, free_dim));
  side.slack_block = nGram + 3;
  sdp.block_sizes.push_back(1);

  // Equations per reduced monomial of degree <= d: sum of contributions equals
  // the target coefficient of -1.
  MonoIndex idx;
  idx.reg = prog.reg.get();
  std::vector<Monomial> all_monos = monomial_basis(prog, d, 250000);
  for (auto& m : all_monos) idx.index(m);
  int m_count = static_cast<int>(idx.monos.size());
  sdp.num_constraints = m_count + 1;  // +1 trace cap
  sdp.b.assign(sdp.num_constraints, 0.0);
  {
    auto k = idx.find(Monomial());
    sdp.b[static_cast<int>(*k)] = -1.0;
  }

  for (int g = 0; g < nGram; ++g) {
    auto& basis = side.gram_bases[g];
    const Polynomial& q = side.multiplied_axioms[g];
    for (size_t i = 0; i < basis.size(); ++i)
      for (size_t j = i; j < basis.size(); ++j) {
        Polynomial red = reduce_boolean(mono_poly(prog.reg, basis[i] * basis[j]) * q, prog).reduced;
        for (auto& [mono, coef] : red.terms()) {
          auto k = idx.find(mono);
          if (!k) throw std::logic_error("build_sos_side: monomial outside index");
          double c = coef.to_double();
          pos_coeff(sdp, static_cast<int>(*k), g, static_cast<int>(i), static_cast<int>(j),
                    i == j ? c : 2 * c);
        }
      }
    // lambda I inside this Gram: G = H + lambda I.
    for (size_t i = 0; i < basis.size(); ++i) {
      Polynomial red = reduce_boolean(mono_poly(prog.reg, basis[i] * basis[i]) * q, prog).reduced;
      for (auto& [mono, coef] : red.terms()) {
        auto k = idx.find(mono);
        sdp.add_entry(static_cast<int>(*k), side.lambda_block, 0, 0, coef.to_double());
        sdp.add_entry(static_cast<int>(*k), side.lambda_block + 1, 0, 0, -coef.to_double());
      }
    }
  }
  // Free equality multipliers.
  int free_pos = 0;
  for (size_t r = 0; r < side.eq_axioms.size(); ++r) {
    for (auto& m : side.eq_bases[r]) {
      Polynomial red = reduce_boolean(mono_poly(prog.reg, m) * side.eq_axioms[r], prog).reduced;
      for (auto& [mono, coef] : red.terms()) {
        auto k = idx.find(mono);
        if (!k) throw std::logic_error("build_sos_side: equality monomial outside index");
        sdp.add_entry(static_cast<int>(*k), side.free_block, free_pos, free_pos,
                      coef.to_double());
        sdp.add_entry(static_cast<int>(*k), side.free_block, free_pos + 1, free_pos + 1,
                      -coef.to_double());
      }
      free_pos += 2;
    }
  }
  // Trace cap: Gram traces + D lambda + the auxiliary blocks + slack = cap.
  // Every block appears so no direction of the cone is unbounded.
  {
    int c = m_count;
    sdp.b[c] = 1.0;  // row scaled by the cap for conditioning
    double w = 1.0 / trace_cap;
    double D = 0;
    for (int g = 0; g < nGram; ++g) {
      for (int i = 0; i < sdp.block_dim(g); ++i) sdp.add_entry(c, g, i, i, w);
      D += sdp.block_dim(g);
    }
    sdp.add_entry(c, side.lambda_block, 0, 0, (D + 1.0) * w);
    sdp.add_entry(c, side.lambda_block + 1, 0, 0, (-D + 1.0) * w);
    for (int i = 0; i < sdp.block_dim(side.free_block); ++i)
      sdp.add_entry(c, side.free_block, i, i, w);
    sdp.add_entry(c, side.slack_block, 0, 0, w);
  }
  // Objective: maximize lambda with a small trace penalty; the penalty keeps
  // the certificate scale near its simplest representative instead of letting
  // the blocks drift to the cap along degenerate faces.
  sdp.maximize = false;
  const double trace_penalty = 1e-4;
  sdp.add_entry(-1, side.lambda_block, 0, 0, -1.0);
  sdp.add_entry(-1, side.lambda_block + 1, 0, 0, 1.0);
  double D = 0;
  for (int g = 0; g < nGram; ++g) D += sdp.block_dim(g);
  for (int g = 0; g < nGram; ++g)
    for (int i = 0; i < sdp.block_dim(g); ++i) sdp.add_entry(-1, g, i, i, trace_penalty);
  sdp.add_entry(-1, side.lambda_block, 0, 0, trace_penalty * D);
  sdp.add_entry(-1, side.lambda_block + 1, 0, 0, -trace_penalty * D);
  return side;
}

SosSideResult solve_sos_side(const SosSide& side, const SdpOptions& opt) {
  SosSideResult out;
  out.sol = solve_sdp(side.sdp, opt);
  bool usable = !out.sol.X.empty() && out.sol.gap <= 1e-3 && out.sol.primal_infeas <= 1e-3;
  if (usable)
    out.margin = out.sol.X[side.lambda_block](0, 0) - out.sol.X[side.lambda_block + 1](0, 0);
  else
    out.margin = -std::numeric_limits<double>::infinity();
  return out;
}

RefuteSearchResult refute_search(const PolyProgram& prog, int d, double lo, double hi,
                                 bool products, double width, int max_bisections,
                                 const SdpOptions& opt) {
  // The bisection predicate tests beta against the degree-d moment value (the
  // duality form of the Eq.-(8) feasibility question): near the threshold the
  // direct SOS-side feasibility probes are numerically indeterminate because
  // certificate norms diverge, while the value SDP stays well conditioned.
  // The refutable endpoint is then separately certified by walking outward
  // until an exactly verified refutation extracts.
  MomentRelaxation rel = build_moment(prog, d);
  PseudoExpectation pe = solve_moment(rel, opt);
  if (pe.status != SdpStatus::Optimal)
    throw std::runtime_error("refute_search: moment value SDP did not converge");
  double value = pe.value;
  bool min_sense = prog.sense == Sense::Min;
  auto refutable = [&](double beta) { return min_sense ? beta < value : beta > value; };
  if (!refutable(min_sense ? lo : hi) || refutable(min_sense ? hi : lo))
    throw std::domain_error("refute_search: initial bracket does not straddle the threshold");
  for (int it = 0; it < max_bisections && hi - lo > width; ++it) {
    double mid = 0.5 * (lo + hi);
    bool keep_low = min_sense ? refutable(mid) : !refutable(mid);
    if (keep_low)
      lo = mid;
    else
      hi = mid;
  }
  RefuteSearchResult out;
  out.lo = lo;
  out.hi = hi;
  out.threshold = 0.5 * (lo + hi);

  // Certified endpoint: march away from the threshold until extraction closes.
  SdpOptions cert_opt = opt;
  cert_opt.tol_gap = std::min(cert_opt.tol_gap, 1e-10);
  double step = std::max(width, 1e-5 * (1 + std::abs(value)));
  for (int k = 0; k < 14; ++k) {
    double beta = min_sense ? value - step : value + step;
    SosSide side = build_sos_side(prog, d, rationalize(beta, uint64_t{1} << 32), products);
    SosSideResult res = solve_sos_side(side, cert_opt);
    if (res.sol.status == SdpStatus::Optimal) {
      ExtractionResult ext = extract_refutation(side, res.sol);
      if (ext.exact) {
        out.side = std::move(side);
        out.certificate = std::move(res);
        out.claim = std::move(ext.claim);
        return out;
      }
    }
    step *= 2;
  }
  throw std::runtime_error("refute_search: no certifiable endpoint found near the threshold");
}

Rational rationalize(double x, uint64_t max_den) {
  // Continued-fraction convergents capped by denominator.
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite input");
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
  if (neg) r = -r;
  return r;
}

ExtractionResult extract_refutation(const SosSide& side, const SdpSolution& sol,
                                    double min_margin) {
  ExtractionResult out;
  if (sol.X.empty() || sol.gap > 1e-3 || sol.primal_infeas > 1e-3) {
    out.note = "no usable solution blocks";
    return out;
  }
  double lambda = sol.X[side.lambda_block](0, 0) - sol.X[side.lambda_block + 1](0, 0);
  const PolyProgram& prog = *side.prog;
  const RegistryPtr& reg = prog.reg;
  int nGram = static_cast<int>(side.multiplied_axioms.size());

  // Numeric Grams G = H + lambda I. Blocks that are numerically zero are
  // dropped; the remaining ones must carry a positive eigenvalue margin to
  // survive rationalization (the margin absorbs the rounding slack).
  const double zero_tol = 50.0 * std::max(1e-9, std::abs(lambda) * 1e-3);
  std::vector<Eigen::MatrixXd> numeric(nGram);
  for (int g = 0; g < nGram; ++g) {
    size_t nb = side.gram_bases[g].size();
    Eigen::MatrixXd G = 0.5 * (sol.X[g] + sol.X[g].transpose());
    G.diagonal().array() += lambda;
    if (G.cwiseAbs().maxCoeff() <= zero_tol) G.setZero();
    numeric[g] = G;
  }
  {
    double min_eig = 0;
    for (int g = 0; g < nGram; ++g) {
      if (numeric[g].rows() == 0 || numeric[g].cwiseAbs().maxCoeff() == 0.0) continue;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(numeric[g]);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    if (min_eig < -min_margin) {
      out.note = "insufficient margin (min eigenvalue " + std::to_string(min_eig) + ")";
      return out;
    }
  }

  // Progressive continued-fraction denominators: coarse caps snap simple
  // rational certificates exactly; the last cap is the configured 2^48.
  const uint64_t caps[] = {1u << 4, 1u << 10, 1u << 20, uint64_t{1} << 34, uint64_t{1} << 48};
  for (uint64_t cap : caps) {
    std::vector<std::vector<std::vector<FieldElem>>> grams(nGram);
    for (int g = 0; g < nGram; ++g) {
      size_t nb = side.gram_bases[g].size();
      grams[g].assign(nb, std::vector<FieldElem>(nb, FieldElem(0)));
      for (size_t i = 0; i < nb; ++i)
        for (size_t j = i; j < nb; ++j) {
          double v = numeric[g](i, j);
          if (std::abs(v) <= zero_tol) v = 0.0;
          grams[g][i][j] = FieldElem(rationalize(v, cap));
          grams[g][j][i] = grams[g][i][j];
        }
    }
    std::vector<Polynomial> eq_mults;
    {
      int free_pos = 0;
      for (size_t r = 0; r < side.eq_axioms.size(); ++r) {
        PolyAccum acc(reg);
        for (auto& m : side.eq_bases[r]) {
          double v = sol.X[side.free_block](free_pos, free_pos) -
                     sol.X[side.free_block](free_pos + 1, free_pos + 1);
          free_pos += 2;
          if (std::abs(v) <= zero_tol) v = 0.0;
          acc.add(mono_poly(reg, m), FieldElem(rationalize(v, cap)));
        }
        eq_mults.push_back(acc.take());
      }
    }

    // Exact residual of the reduced identity; distribute it over u0 slots
    // (each u0 position touches exactly one reduced monomial).
    PolyAccum resid(reg);
    resid.add(Polynomial::constant(reg, FieldElem(-1)));
    for (int g = 0; g < nGram; ++g) {
      auto& basis = side.gram_bases[g];
      PolyAccum gval(reg);
      for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j) {
          if (grams[g][i][j].is_zero()) continue;
          gval.add(mono_poly(reg, basis[i] * basis[j]), grams[g][i][j]);
        }
      resid.add_product(gval.take(), side.multiplied_axioms[g], FieldElem(-1));
    }
    for (size_t r = 0; r < side.eq_axioms.size(); ++r)
      resid.add_product(eq_mults[r], side.eq_axioms[r], FieldElem(-1));
    Polynomial residual = reduce_boolean(resid.take(), prog).reduced;

    auto& basis0 = side.gram_bases[0];
    bool distributed = true;
    for (auto& [mono, coef] : residual.terms()) {
      bool placed = false;
      for (size_t i = 0; i < basis0.size() && !placed; ++i)
        for (size_t j = i; j < basis0.size() && !placed; ++j) {
          Polynomial red = reduce_boolean(mono_poly(reg, basis0[i] * basis0[j]), prog).reduced;
          if (red.term_count() != 1 || red.terms()[0].first != mono) continue;
          FieldElem add = coef / red.terms()[0].second;
          if (i == j) {
            grams[0][i][i] += add;
          } else {
            grams[0][i][j] += add * FieldElem(rat(1, 2));
            grams[0][j][i] += add * FieldElem(rat(1, 2));
          }
          placed = true;
        }
      if (!placed) distributed = false;
    }
    if (!distributed) {
      out.note = "residual monomial without a u0 slot";
      continue;
    }

    // Exact LDL per block; failure means this denominator cap is too coarse
    // (or the face is genuinely infeasible).
    std::vector<SosWitness> wits(nGram);
    bool psd_ok = true;
    for (int g = 0; g < nGram && psd_ok; ++g) {
      FieldLdl ldl;
      try {
        ldl = field_ldl(grams[g]);
      } catch (const std::domain_error&) {
        psd_ok = false;
        break;
      }
      auto& basis = side.gram_bases[g];
      for (size_t i = 0; i < basis.size(); ++i) {
        if (ldl.D[i].is_zero()) continue;
        PolyAccum root(reg);
        for (size_t k2 = i; k2 < basis.size(); ++k2)
          if (!ldl.L[k2][i].is_zero()) root.add(mono_poly(reg, basis[k2]), ldl.L[k2][i]);
        wits[g].append_square(ldl.D[i], root.take());
      }
    }
    if (!psd_ok) {
      out.note = "Gram block not PSD after rationalization";
      continue;
    }

    Claim claim;
    claim.reg = reg;
    claim.degree = side.degree;
    claim.conclusion = Polynomial::constant(reg, FieldElem(-1));
    claim.u0 = wits[0];
    for (int g = 1; g < nGram; ++g) {
      if (wits[g].empty()) continue;
      size_t idx2 = claim.axioms.add_ineq(side.multiplied_axioms[g]);
      claim.sync_multipliers();
      claim.ineq_mult[idx2].append(wits[g]);
    }
    for (size_t r = 0; r < side.eq_axioms.size(); ++r) {
      if (eq_mults[r].is_zero()) continue;
      size_t idx2 = claim.axioms.add_eq(side.eq_axioms[r]);
      claim.sync_multipliers();
      claim.eq_mult[idx2] += eq_mults[r];
    }
    claim.sync_multipliers();
    // Lift through the boolean ideal.
    {
      PolyAccum full(reg);
      full.add(claim.conclusion);
      claim.u0.add_value_into(full, FieldElem(-1));
      for (size_t i = 0; i < claim.axioms.ineqs().size(); ++i) {
        if (claim.ineq_mult[i].empty()) continue;
        full.add_product(claim.ineq_mult[i].value(reg), claim.axioms.ineqs()[i], FieldElem(-1));
      }
      for (size_t j = 0; j < claim.axioms.eqs().size(); ++j)
        full.add_product(claim.eq_mult[j], claim.axioms.eqs()[j], FieldElem(-1));
      ReducedPoly lift = reduce_boolean(full.take(), prog);
      if (!lift.reduced.is_zero()) {
        out.note = "exact identity failed to close";
        continue;
      }
      for (auto& [v, mult] : lift.multipliers) {
        auto kind = prog.boolean_vars.at(v);
        Polynomial x = Polynomial::var(reg, v);
        Polynomial beq = kind == PolyProgram::BoolKind::ZeroOne
                             ? x * x - x
                             : x * x - Polynomial::constant(reg, FieldElem(1));
        size_t idx2 = claim.axioms.add_eq(beq);
        claim.sync_multipliers();
        claim.eq_mult[idx2] += mult;
      }
    }
    auto rep = verify_claim(claim);
    if (!rep.ok) {
      out.note = "verification failed: " + rep.diagnostic;
      continue;
    }
    out.exact = true;
    out.claim = std::move(claim);
    out.note = "exact (denominator cap 2^" + std::to_string(64 - __builtin_clzll(cap)) + ")";
    return out;
  }
  if (out.note.empty()) out.note = "no denominator cap produced an exact certificate";
  return out;
}

}  // namespace sos
