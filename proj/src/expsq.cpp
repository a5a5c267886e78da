#include "soskit/expsq.hpp"

#include <algorithm>
#include <stdexcept>

namespace sos {

FieldLdl field_ldl(const std::vector<std::vector<FieldElem>>& A) {
  size_t n = A.size();
  FieldLdl out;
  out.L.assign(n, std::vector<FieldElem>(n, FieldElem(0)));
  out.D.assign(n, FieldElem(0));
  for (size_t i = 0; i < n; ++i) out.L[i][i] = FieldElem(1);
  for (size_t k = 0; k < n; ++k) {
    FieldElem d = A[k][k];
    for (size_t j = 0; j < k; ++j) d -= out.D[j] * out.L[k][j] * out.L[k][j];
    int s = d.sign();
    if (s < 0) throw std::domain_error("field_ldl: matrix not PSD (negative pivot)");
    out.D[k] = d;
    for (size_t i = k + 1; i < n; ++i) {
      FieldElem v = A[i][k];
      for (size_t j = 0; j < k; ++j) v -= out.D[j] * out.L[i][j] * out.L[k][j];
      if (s == 0) {
        if (!v.is_zero())
          throw std::domain_error("field_ldl: matrix not PSD (zero pivot, nonzero column)");
        out.L[i][k] = FieldElem(0);
      } else {
        out.L[i][k] = v / d;
      }
    }
  }
  return out;
}

namespace {

void enumerate_discrete(const Polynomial& r, const std::vector<VarId>& disc, size_t idx,
                        std::unordered_map<VarId, Polynomial>& assignment,
                        const ProfileMap& momentful, const FieldElem& weight, SosWitness& out,
                        const std::string& label) {
  const RegistryPtr& reg = r.registry();
  if (idx == disc.size()) {
    Polynomial rs = assignment.empty() ? r : r.substitute(assignment);
    if (rs.is_zero()) return;
    if (momentful.empty()) {
      out.append_square(weight, std::move(rs), label);
      return;
    }
    // Collect by momentful z-monomials; LDL the moment matrix.
    auto parts = collect_stochastic(rs, momentful);
    std::vector<Monomial> monos;
    std::vector<Polynomial> coeffs;
    monos.reserve(parts.size());
    for (auto& [m, c] : parts) {
      monos.push_back(m);
      coeffs.push_back(c);
    }
    size_t k = monos.size();
    std::vector<std::vector<FieldElem>> M(k, std::vector<FieldElem>(k, FieldElem(0)));
    for (size_t i = 0; i < k; ++i)
      for (size_t j = i; j < k; ++j) {
        Monomial prod = monos[i] * monos[j];
        FieldElem moment(1);
        for (auto& [v, e] : prod.factors()) moment *= momentful.at(v).moment(e);
        M[i][j] = moment;
        M[j][i] = moment;
      }
    FieldLdl ldl = field_ldl(M);
    // E[r^2] = c^T M c = sum_i D_i (sum_m L[m][i] c_m)^2.
    for (size_t i = 0; i < k; ++i) {
      if (ldl.D[i].is_zero()) continue;
      PolyAccum acc(reg);
      for (size_t m = i; m < k; ++m)
        if (!ldl.L[m][i].is_zero()) acc.add(coeffs[m], ldl.L[m][i]);
      Polynomial root = acc.take();
      out.append_square(weight * ldl.D[i], std::move(root), label);
    }
    return;
  }
  VarId v = disc[idx];
  for (int sign : {1, -1}) {
    assignment[v] = Polynomial::constant(reg, FieldElem(sign));
    enumerate_discrete(r, disc, idx + 1, assignment, momentful,
                       weight * FieldElem(rat(1, 2)), out, label);
  }
  assignment.erase(v);
}

}  // namespace

namespace {

void split_vars(const Polynomial& r, const ProfileMap& profiles, std::vector<VarId>& disc,
                ProfileMap& momentful) {
  for (VarId v : r.variables()) {
    auto it = profiles.find(v);
    if (it == profiles.end()) continue;
    if (it->second.unit_square()) {
      if (std::find(disc.begin(), disc.end(), v) == disc.end()) disc.push_back(v);
    } else {
      momentful.emplace(v, it->second);
    }
  }
}

}  // namespace

SosWitness expected_square_witness(const Polynomial& r, const ProfileMap& profiles,
                                   const std::string& label) {
  std::vector<VarId> disc;
  ProfileMap momentful;
  split_vars(r, profiles, disc, momentful);
  SosWitness out;
  std::unordered_map<VarId, Polynomial> assignment;
  enumerate_discrete(r, disc, 0, assignment, momentful, FieldElem(1), out, label);
  return out;
}

SosWitness expected_square_witness_of_product(const Polynomial& a, const Polynomial& b,
                                              const Polynomial& c, const Polynomial& d,
                                              const ProfileMap& profiles,
                                              const std::string& label) {
  const RegistryPtr& reg = a.registry() ? a.registry() : c.registry();
  std::vector<VarId> disc;
  ProfileMap momentful;
  for (const Polynomial* p : {&a, &b, &c, &d}) split_vars(*p, profiles, disc, momentful);
  std::sort(disc.begin(), disc.end());
  disc.erase(std::unique(disc.begin(), disc.end()), disc.end());

  SosWitness out;
  size_t count = size_t{1} << disc.size();
  FieldElem weight(Rational(1, static_cast<long>(count)));
  for (size_t bits = 0; bits < count; ++bits) {
    std::unordered_map<VarId, Polynomial> assignment;
    for (size_t i = 0; i < disc.size(); ++i)
      assignment.emplace(disc[i],
                         Polynomial::constant(reg, FieldElem((bits >> i) & 1 ? -1 : 1)));
    Polynomial r = a.substitute(assignment) * b.substitute(assignment) -
                   c.substitute(assignment) * d.substitute(assignment);
    if (r.is_zero()) continue;
    if (momentful.empty()) {
      out.append_square(weight, std::move(r), label);
    } else {
      SosWitness inner = expected_square_witness(r, momentful, label);
      out.append(inner.scaled(weight));
    }
  }
  return out;
}

}  // namespace sos
