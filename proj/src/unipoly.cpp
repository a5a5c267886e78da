#include "soskit/unipoly.hpp"

#include <algorithm>
#include <stdexcept>

namespace sos {

namespace {
const Rational kZero(0);
}

void UniPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

const Rational& UniPoly::coeff(size_t k) const { return k < c_.size() ? c_[k] : kZero; }

const Rational& UniPoly::leading() const {
  if (c_.empty()) throw std::domain_error("UniPoly: leading of zero polynomial");
  return c_.back();
}

UniPoly UniPoly::operator-() const {
  UniPoly p(*this);
  for (auto& x : p.c_) x = -x;
  return p;
}

UniPoly UniPoly::operator+(const UniPoly& o) const {
  std::vector<Rational> r(std::max(c_.size(), o.c_.size()), Rational(0));
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator-(const UniPoly& o) const { return *this + (-o); }

UniPoly UniPoly::operator*(const UniPoly& o) const {
  if (is_zero() || o.is_zero()) return UniPoly();
  std::vector<Rational> r(c_.size() + o.c_.size() - 1, Rational(0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::scale(const Rational& s) const {
  if (s == 0) return UniPoly();
  UniPoly p(*this);
  for (auto& x : p.c_) x *= s;
  return p;
}

UniPoly UniPoly::derivative() const {
  if (c_.size() <= 1) return UniPoly();
  std::vector<Rational> r(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rational(long(i));
  return UniPoly(std::move(r));
}

UniPoly UniPoly::integral() const {
  if (is_zero()) return UniPoly();
  std::vector<Rational> r(c_.size() + 1, Rational(0));
  for (size_t i = 0; i < c_.size(); ++i) r[i + 1] = c_[i] / Rational(long(i + 1));
  return UniPoly(std::move(r));
}

Rational UniPoly::eval(const Rational& t) const {
  Rational v(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * t + *it;
  return v;
}

double UniPoly::eval_double(double t) const {
  double v = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * t + it->get_d();
  return v;
}

Interval UniPoly::eval_interval(const Interval& t) const {
  Interval v(0.0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * t + Interval(*it);
  return v;
}

void UniPoly::divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r) {
  if (b.is_zero()) throw std::domain_error("UniPoly: division by zero");
  std::vector<Rational> rem = a.c_;
  std::vector<Rational> quo(a.c_.size() > b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 1,
                            Rational(0));
  int db = b.degree();
  const Rational& lb = b.leading();
  for (int k = static_cast<int>(rem.size()) - 1; k >= db; --k) {
    if (rem[k] == 0) continue;
    Rational f = rem[k] / lb;
    quo[k - db] += f;
    for (int j = 0; j <= db; ++j) rem[k - db + j] -= f * b.c_[j];
  }
  q = UniPoly(std::move(quo));
  r = UniPoly(std::move(rem));
}

UniPoly UniPoly::gcd(UniPoly a, UniPoly b) {
  a = a.primitive_part();
  b = b.primitive_part();
  while (!b.is_zero()) {
    UniPoly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = r.primitive_part();
  }
  return a.is_zero() ? a : a.monic();
}

UniPoly UniPoly::primitive_part() const {
  if (is_zero()) return *this;
  Integer den_lcm = 1;
  for (auto& c : c_) {
    Integer d = c.get_den();
    Integer g;
    mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
    den_lcm = den_lcm / g * d;
  }
  Integer content = 0;
  std::vector<Rational> scaled(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) {
    scaled[i] = c_[i] * Rational(den_lcm);
    scaled[i].canonicalize();
    Integer num = scaled[i].get_num();
    mpz_abs(num.get_mpz_t(), num.get_mpz_t());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), num.get_mpz_t());
  }
  if (content == 0 || content == 1) return UniPoly(std::move(scaled));
  for (auto& c : scaled) {
    c /= Rational(content);
    c.canonicalize();
  }
  return UniPoly(std::move(scaled));
}

UniPoly UniPoly::monic() const {
  if (is_zero()) return *this;
  return scale(Rational(1) / leading());
}

std::vector<SqfFactor> UniPoly::squarefree_decomposition() const {
  // Yun's algorithm over Q.
  std::vector<SqfFactor> out;
  if (degree() <= 0) return out;
  UniPoly f = monic();
  UniPoly fp = f.derivative();
  UniPoly a = gcd(f, fp);
  UniPoly b, c, q, r;
  divmod(f, a, b, r);
  divmod(fp, a, c, r);
  int mult = 1;
  while (b.degree() > 0) {
    UniPoly d = c - b.derivative();
    UniPoly g = gcd(b, d);
    if (g.degree() > 0) out.push_back(SqfFactor{g.coeffs(), mult});
    divmod(b, g, q, r);
    b = q;
    UniPoly c2, r2;
    divmod(d, g, c2, r2);
    c = c2;
    ++mult;
  }
  return out;
}

namespace {

int sign_changes(const std::vector<int>& signs) {
  int changes = 0, prev = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

int UniPoly::count_real_roots(const std::optional<Rational>& a,
                              const std::optional<Rational>& b) const {
  if (is_zero()) throw std::domain_error("UniPoly: root count of zero polynomial");
  if (degree() == 0) return 0;
  // Sturm chain on the square-free part; each remainder is renormalized by a
  // positive scalar, which preserves the sign pattern.
  UniPoly f = *this;
  UniPoly g = gcd(f, f.derivative());
  if (g.degree() > 0) {
    UniPoly q, r;
    divmod(f, g, q, r);
    f = q;
  }
  f = f.primitive_part();
  std::vector<UniPoly> chain{f, f.derivative().primitive_part()};
  while (!chain.back().is_zero() && chain.back().degree() > 0) {
    UniPoly q, r;
    divmod(chain[chain.size() - 2], chain.back(), q, r);
    chain.push_back((-r).primitive_part());
  }
  auto signs_at = [&](const std::optional<Rational>& x, bool plus_inf) {
    std::vector<int> s;
    for (auto& p : chain) {
      if (p.is_zero()) {
        s.push_back(0);
      } else if (x) {
        s.push_back(sgn(p.eval(*x)));
      } else {
        int lead = sgn(p.leading());
        if (!plus_inf && p.degree() % 2 == 1) lead = -lead;
        s.push_back(lead);
      }
    }
    return s;
  };
  std::vector<int> lo = a ? signs_at(a, false) : signs_at(std::nullopt, false);
  std::vector<int> hi = b ? signs_at(b, true) : signs_at(std::nullopt, true);
  return sign_changes(lo) - sign_changes(hi);
}

bool UniPoly::is_nonneg_on_reals() const {
  if (is_zero()) return true;
  if (degree() == 0) return sgn(c_[0]) >= 0;
  if (degree() % 2 == 1 || sgn(leading()) < 0) return false;
  for (auto& f : squarefree_decomposition()) {
    UniPoly fp{std::vector<Rational>(f.coeffs)};
    if (f.multiplicity % 2 == 1 && fp.degree() > 0 && fp.count_real_roots() > 0) return false;
  }
  return true;
}

bool UniPoly::is_nonneg_on_interval(const Rational& a, const Rational& b) const {
  if (a > b) throw std::invalid_argument("UniPoly: empty interval");
  if (is_zero()) return true;
  if (eval(a) < 0 || eval(b) < 0) return false;
  // Negative somewhere inside iff an odd-multiplicity root interior with a sign
  // change; robust check: any root of odd multiplicity strictly inside with
  // p negative just after it. Simpler exact test: p >= 0 on [a,b] iff p has no
  // root of odd multiplicity in (a,b) with sign change to negative. We test by
  // evaluating between consecutive roots using root isolation via Sturm
  // bisection on the square-free part.
  UniPoly f = *this;
  UniPoly g = gcd(f, f.derivative());
  UniPoly sf = f;
  if (g.degree() > 0) {
    UniPoly q, r;
    divmod(f, g, q, r);
    sf = q;
  }
  // Isolate roots of sf in (a,b) by bisection, then check sign of *this at
  // midpoints between consecutive isolation intervals.
  struct Span {
    Rational lo, hi;
  };
  std::vector<Span> spans;
  std::vector<Span> queue{{a, b}};
  int guard = 0;
  while (!queue.empty()) {
    if (++guard > 100000) throw std::runtime_error("UniPoly: root isolation budget exceeded");
    Span s = queue.back();
    queue.pop_back();
    int roots = sf.count_real_roots(s.lo, s.hi);
    if (roots == 0) continue;
    if (roots == 1) {
      spans.push_back(s);
      continue;
    }
    Rational mid = (s.lo + s.hi) / 2;
    while (sf.eval(mid) == 0) mid = (s.lo + 2 * mid) / 3;  // nudge off a root
    queue.push_back({s.lo, mid});
    queue.push_back({mid, s.hi});
  }
  std::sort(spans.begin(), spans.end(),
            [](const Span& x, const Span& y) { return x.lo < y.lo; });
  // Check sample points: between/after spans plus span endpoints.
  std::vector<Rational> samples{a, b};
  Rational prev = a;
  for (auto& s : spans) {
    samples.push_back((prev + s.lo) / 2);
    prev = s.hi;
  }
  samples.push_back((prev + b) / 2);
  for (auto& t : samples)
    if (eval(t) < 0) return false;
  return true;
}

UniPoly UniPoly::scale_var(const Rational& s) const {
  UniPoly p(*this);
  Rational f(1);
  for (size_t i = 1; i < p.c_.size(); ++i) {
    f *= s;
    p.c_[i] *= f;
  }
  p.trim();
  return p;
}

bool UniPoly::is_even() const {
  for (size_t i = 1; i < c_.size(); i += 2)
    if (c_[i] != 0) return false;
  return true;
}

UniPoly UniPoly::even_part_as_poly_in_t2() const {
  if (!is_even()) throw std::domain_error("UniPoly: not an even polynomial");
  std::vector<Rational> q;
  for (size_t i = 0; i < c_.size(); i += 2) q.push_back(c_[i]);
  return UniPoly(std::move(q));
}

std::string UniPoly::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::string out;
  for (int k = degree(); k >= 0; --k) {
    if (coeff(k) == 0) continue;
    if (!out.empty()) out += " + ";
    out += coeff(k).get_str();
    if (k >= 1) out += "*" + var;
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out;
}

Polynomial UniPoly::to_polynomial(const RegistryPtr& reg, VarId v) const {
  PolyAccum acc(reg);
  for (size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0) continue;
    std::unordered_map<Monomial, FieldElem, MonomialHash> mm;
    mm.emplace(Monomial(v, static_cast<uint32_t>(k)), FieldElem(c_[k]));
    acc.add(Polynomial::from_map(reg, std::move(mm)));
  }
  return acc.take();
}

UniPoly UniPoly::from_polynomial(const Polynomial& p) {
  std::vector<Rational> c;
  for (auto& [m, coef] : p.terms()) {
    if (!coef.is_rational()) throw std::domain_error("UniPoly: irrational coefficient");
    if (m.factors().size() > 1) throw std::domain_error("UniPoly: not univariate");
    size_t k = m.is_one() ? 0 : m.factors()[0].second;
    if (c.size() <= k) c.resize(k + 1, Rational(0));
    c[k] = coef.as_rational();
  }
  // Ensure a single variable was used.
  VarId seen = 0;
  bool have = false;
  for (auto& [m, coef] : p.terms())
    for (auto& [v, e] : m.factors()) {
      if (have && v != seen) throw std::domain_error("UniPoly: not univariate");
      seen = v;
      have = true;
    }
  return UniPoly(std::move(c));
}

UniPoly gaussian_expectation_in_s2(const UniPoly& p) {
  if (!p.is_even()) throw std::domain_error("gaussian_expectation_in_s2: polynomial not even");
  std::vector<Rational> q;
  for (int k = 0; 2 * k <= p.degree(); ++k) {
    Rational c = p.coeff(2 * k);
    if (q.size() <= static_cast<size_t>(k)) q.resize(k + 1, Rational(0));
    q[k] = c * Rational(odd_double_factorial(k));
  }
  return UniPoly(std::move(q));
}

}  // namespace sos
