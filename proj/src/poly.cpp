#include "soskit/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sos {

VarId VarRegistry::intern(VarRole role, const std::string& name) {
  auto it = by_name_.find(name);
  if (it != by_name_.end()) {
    if (vars_[it->second].role != role)
      throw std::invalid_argument("VarRegistry: role clash for " + name);
    return it->second;
  }
  VarId id = static_cast<VarId>(vars_.size());
  vars_.push_back(VarInfo{role, name});
  by_name_.emplace(name, id);
  return id;
}

std::optional<VarId> VarRegistry::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

Monomial Monomial::from_factors(std::vector<std::pair<VarId, uint32_t>> f) {
  std::sort(f.begin(), f.end());
  Monomial m;
  for (auto& [v, e] : f) {
    if (e == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().first == v)
      m.factors_.back().second += e;
    else
      m.factors_.emplace_back(v, e);
  }
  return m;
}

uint32_t Monomial::degree() const {
  uint64_t d = 0;
  for (auto& [v, e] : factors_) d += e;
  if (d > 0xffffffffull) throw std::overflow_error("Monomial: degree overflow");
  return static_cast<uint32_t>(d);
}

uint32_t Monomial::exponent(VarId v) const {
  for (auto& [w, e] : factors_)
    if (w == v) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial m;
  m.factors_.reserve(factors_.size() + o.factors_.size());
  size_t i = 0, j = 0;
  while (i < factors_.size() && j < o.factors_.size()) {
    if (factors_[i].first < o.factors_[j].first) {
      m.factors_.push_back(factors_[i++]);
    } else if (factors_[i].first > o.factors_[j].first) {
      m.factors_.push_back(o.factors_[j++]);
    } else {
      uint64_t e = static_cast<uint64_t>(factors_[i].second) + o.factors_[j].second;
      if (e > 0xffffffffull) throw std::overflow_error("Monomial: exponent overflow");
      m.factors_.emplace_back(factors_[i].first, static_cast<uint32_t>(e));
      ++i;
      ++j;
    }
  }
  while (i < factors_.size()) m.factors_.push_back(factors_[i++]);
  while (j < o.factors_.size()) m.factors_.push_back(o.factors_[j++]);
  return m;
}

Monomial Monomial::pow(uint32_t e) const {
  Monomial m;
  if (e == 0) return m;
  m.factors_ = factors_;
  for (auto& [v, x] : m.factors_) {
    uint64_t ne = static_cast<uint64_t>(x) * e;
    if (ne > 0xffffffffull) throw std::overflow_error("Monomial: exponent overflow");
    x = static_cast<uint32_t>(ne);
  }
  return m;
}

bool Monomial::operator<(const Monomial& o) const {
  uint32_t d1 = degree(), d2 = o.degree();
  if (d1 != d2) return d1 < d2;
  // Same degree: lexicographic on the exponent vectors over increasing var id.
  // A variable missing from a monomial has exponent 0.
  size_t i = 0, j = 0;
  while (i < factors_.size() && j < o.factors_.size()) {
    if (factors_[i].first != o.factors_[j].first) {
      // The monomial owning the smaller var id has a positive exponent there.
      // Larger exponent on the earliest differing variable = later in lex.
      return factors_[i].first > o.factors_[j].first;
    }
    if (factors_[i].second != o.factors_[j].second)
      return factors_[i].second < o.factors_[j].second;
    ++i;
    ++j;
  }
  return i == factors_.size() && j != o.factors_.size();
}

size_t Monomial::hash() const {
  size_t h = 1469598103934665603ull;
  for (auto& [v, e] : factors_) {
    h = (h ^ v) * 1099511628211ull;
    h = (h ^ e) * 1099511628211ull;
  }
  return h;
}

std::string Monomial::str(const VarRegistry& reg) const {
  if (factors_.empty()) return "1";
  std::string out;
  bool first = true;
  for (auto& [v, e] : factors_) {
    if (!first) out += "*";
    first = false;
    out += reg.name(v);
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

Polynomial::Polynomial(RegistryPtr reg, const FieldElem& c) : reg_(std::move(reg)) {
  if (!c.is_zero()) terms_.emplace_back(Monomial(), c);
}

Polynomial Polynomial::var(const RegistryPtr& reg, VarId v) {
  Polynomial p(reg);
  p.terms_.emplace_back(Monomial(v), FieldElem(1));
  return p;
}

FieldElem Polynomial::constant_term() const {
  if (!terms_.empty() && terms_.front().first.is_one()) return terms_.front().second;
  return FieldElem(0);
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(terms_.back().first.degree());
}

void Polynomial::check_same_registry(const Polynomial& o) const {
  if (reg_ && o.reg_ && reg_ != o.reg_)
    throw std::invalid_argument("Polynomial: registry mismatch");
}

Polynomial Polynomial::operator-() const {
  Polynomial p(*this);
  for (auto& [m, c] : p.terms_) c = -c;
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_same_registry(o);
  Polynomial r(reg_ ? reg_ : o.reg_);
  r.terms_.reserve(terms_.size() + o.terms_.size());
  size_t i = 0, j = 0;
  while (i < terms_.size() && j < o.terms_.size()) {
    if (terms_[i].first < o.terms_[j].first) {
      r.terms_.push_back(terms_[i++]);
    } else if (o.terms_[j].first < terms_[i].first) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      FieldElem c = terms_[i].second + o.terms_[j].second;
      if (!c.is_zero()) r.terms_.emplace_back(terms_[i].first, std::move(c));
      ++i;
      ++j;
    }
  }
  while (i < terms_.size()) r.terms_.push_back(terms_[i++]);
  while (j < o.terms_.size()) r.terms_.push_back(o.terms_[j++]);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_same_registry(o);
  PolyAccum acc(reg_ ? reg_ : o.reg_);
  acc.add_product(*this, o);
  return acc.take();
}

Polynomial Polynomial::scale(const FieldElem& c) const {
  if (c.is_zero()) return Polynomial(reg_);
  Polynomial p(*this);
  for (auto& [m, x] : p.terms_) x *= c;
  return p;
}

Polynomial Polynomial::pow(uint32_t e) const {
  Polynomial acc(reg_, FieldElem(1));
  Polynomial base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    if (e >>= 1) base = base * base;
  }
  return acc;
}

Polynomial Polynomial::substitute(const std::unordered_map<VarId, Polynomial>& images,
                                  bool strict) const {
  RegistryPtr target = reg_;
  for (auto& [v, img] : images)
    if (img.registry()) {
      target = img.registry();
      break;
    }
  PolyAccum acc(target);
  std::unordered_map<VarId, std::vector<Polynomial>> powers;  // powers[v][k] = image^k(+1)
  for (auto& [m, c] : terms_) {
    Polynomial t(target, c);
    for (auto& [v, e] : m.factors()) {
      auto it = images.find(v);
      if (it == images.end()) {
        if (strict)
          throw std::invalid_argument("substitute: unmapped variable " +
                                      (reg_ ? reg_->name(v) : std::to_string(v)));
        t = t * Polynomial::var(target, v).pow(e);
      } else {
        auto& pw = powers[v];
        while (pw.size() < e) pw.push_back(pw.empty() ? it->second : pw.back() * it->second);
        t = t * pw[e - 1];
      }
    }
    acc.add(t);
  }
  return acc.take();
}

FieldElem Polynomial::eval(const std::unordered_map<VarId, FieldElem>& point) const {
  FieldElem total(0);
  for (auto& [m, c] : terms_) {
    FieldElem v = c;
    for (auto& [var, e] : m.factors()) {
      auto it = point.find(var);
      if (it == point.end()) throw std::invalid_argument("eval: missing value for variable");
      v *= it->second.pow(e);
    }
    total += v;
  }
  return total;
}

double Polynomial::eval_double(const std::unordered_map<VarId, double>& point) const {
  double total = 0;
  for (auto& [m, c] : terms_) {
    double v = c.to_double();
    for (auto& [var, e] : m.factors()) {
      auto it = point.find(var);
      if (it == point.end()) throw std::invalid_argument("eval: missing value for variable");
      double x = it->second;
      for (uint32_t k = 0; k < e; ++k) v *= x;
    }
    total += v;
  }
  return total;
}

std::vector<VarId> Polynomial::variables() const {
  std::vector<VarId> vars;
  for (auto& [m, c] : terms_)
    for (auto& [v, e] : m.factors()) vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!out.empty()) out += " + ";
    std::string c = it->second.str();
    if (it->first.is_one()) {
      out += "(" + c + ")";
    } else {
      out += "(" + c + ")*" + it->first.str(*reg_);
    }
  }
  return out;
}

Polynomial Polynomial::from_map(RegistryPtr reg,
                                std::unordered_map<Monomial, FieldElem, MonomialHash>&& m) {
  Polynomial p(std::move(reg));
  p.terms_.reserve(m.size());
  for (auto& [mono, c] : m)
    if (!c.is_zero()) p.terms_.emplace_back(mono, std::move(c));
  std::sort(p.terms_.begin(), p.terms_.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return p;
}

size_t Polynomial::hash() const {
  size_t h = 14695981039346656037ull;
  for (auto& [m, c] : terms_) {
    h = (h ^ m.hash()) * 1099511628211ull;
    h = (h ^ c.hash()) * 1099511628211ull;
  }
  return h;
}

void PolyAccum::add(const Polynomial& p, const FieldElem& scale) {
  if (scale.is_zero()) return;
  for (auto& [m, c] : p.terms()) {
    auto [it, fresh] = acc_.try_emplace(m, FieldElem(0));
    it->second += c * scale;
    if (it->second.is_zero()) acc_.erase(it);
  }
}

void PolyAccum::add_product(const Polynomial& a, const Polynomial& b, const FieldElem& scale) {
  if (scale.is_zero()) return;
  for (auto& [ma, ca] : a.terms()) {
    FieldElem cs = ca * scale;
    for (auto& [mb, cb] : b.terms()) {
      Monomial m = ma * mb;
      auto [it, fresh] = acc_.try_emplace(std::move(m), FieldElem(0));
      it->second += cs * cb;
      if (it->second.is_zero()) acc_.erase(it);
    }
  }
}

Polynomial PolyAccum::take() { return Polynomial::from_map(reg_, std::move(acc_)); }

bool PolyAccum::is_zero_so_far() const { return acc_.empty(); }

// --- parsing ------------------------------------------------------------

namespace {

struct Parser {
  const RegistryPtr& reg;
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("Polynomial::parse: " + msg + " at position " +
                                std::to_string(pos) + " in \"" + s + "\"");
  }

  // expr := term (('+'|'-') term)*
  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        p = p + term();
      else if (eat('-'))
        p = p - term();
      else
        return p;
    }
  }
  // term := factor ('*' factor)*
  Polynomial term() {
    Polynomial p = factor();
    for (;;) {
      skip_ws();
      if (eat('*'))
        p = p * factor();
      else
        return p;
    }
  }
  // factor := atom ['^' int]
  Polynomial factor() {
    Polynomial p = atom();
    skip_ws();
    if (eat('^')) {
      skip_ws();
      size_t start = pos;
      while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (start == pos) fail("expected exponent");
      p = p.pow(static_cast<uint32_t>(std::stoul(s.substr(start, pos - start))));
    }
    return p;
  }
  // atom := '(' field ')' | '(' expr ')' | number | varname | '-' atom
  Polynomial atom() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end");
    if (s[pos] == '-') {
      ++pos;
      return -atom();
    }
    if (s[pos] == '(') {
      // Try a field-element literal first, else a subexpression.
      size_t close = matching_paren(pos);
      std::string inner = s.substr(pos + 1, close - pos - 1);
      try {
        FieldElem c = FieldElem::parse(inner);
        pos = close + 1;
        return Polynomial::constant(reg, c);
      } catch (const std::exception&) {
        ++pos;
        Polynomial p = expr();
        if (!eat(')')) fail("expected )");
        return p;
      }
    }
    if (isdigit(static_cast<unsigned char>(s[pos]))) {
      size_t start = pos;
      while (pos < s.size() &&
             (isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/')) {
        ++pos;
      }
      return Polynomial::constant(reg, FieldElem(parse_rational(s.substr(start, pos - start))));
    }
    // Variable name: letters, digits, and the punctuation used by role names.
    size_t start = pos;
    while (pos < s.size() && (isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' ||
                              s[pos] == '@' || s[pos] == '[' || s[pos] == ']' || s[pos] == ',')) {
      ++pos;
    }
    if (pos < s.size() && s[pos] == '^' && start != pos) {
      // Fourier-coefficient names contain '^digits'; disambiguate from powers by
      // checking whether the extended name is known.
      size_t save = pos;
      size_t p2 = pos + 1;
      while (p2 < s.size() && isdigit(static_cast<unsigned char>(s[p2]))) ++p2;
      std::string ext = s.substr(start, p2 - start);
      if (reg->find(ext)) pos = p2;
      (void)save;
    }
    if (start == pos) fail("expected atom");
    std::string name = s.substr(start, pos - start);
    auto v = reg->find(name);
    if (!v) fail("unknown variable " + name);
    return Polynomial::var(reg, *v);
  }
  size_t matching_paren(size_t open) {
    int depth = 0;
    for (size_t i = open; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')' && --depth == 0) return i;
    }
    fail("unbalanced parentheses");
  }
};

}  // namespace

Polynomial Polynomial::parse(const RegistryPtr& reg, const std::string& text) {
  Parser p{reg, text};
  Polynomial out = p.expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return out;
}

}  // namespace sos
