#include "soskit/cube.hpp"

#include <bit>
#include <stdexcept>

namespace sos {

CubeFunction::CubeFunction(RegistryPtr reg, int n, bool fourier)
    : reg_(std::move(reg)), n_(n), fourier_(fourier) {
  if (n < 0 || n > 20) throw std::invalid_argument("CubeFunction: dimension out of range");
  if (!fourier_) point_.assign(size_t{1} << n, Polynomial(reg_));
}

CubeFunction CubeFunction::atomic_points(const RegistryPtr& reg, const std::string& fn, int n) {
  CubeFunction f(reg, n, false);
  for (uint32_t x = 0; x < (1u << n); ++x)
    f.point_[x] = Polynomial::var(reg, reg->point_value(fn, x));
  return f;
}

CubeFunction CubeFunction::atomic_fourier(const RegistryPtr& reg, const std::string& fn, int n,
                                          std::optional<int> degree_bound) {
  CubeFunction f(reg, n, true);
  for (uint32_t s = 0; s < (1u << n); ++s) {
    if (degree_bound && std::popcount(s) > *degree_bound) continue;
    f.fhat_.emplace(s, Polynomial::var(reg, reg->fourier_coeff(fn, s)));
  }
  return f;
}

const Polynomial& CubeFunction::point(uint32_t x_mask) const {
  if (fourier_) throw std::logic_error("CubeFunction: point access on Fourier representation");
  return point_.at(x_mask);
}

void CubeFunction::set_point(uint32_t x_mask, Polynomial p) {
  if (fourier_) throw std::logic_error("CubeFunction: point access on Fourier representation");
  point_.at(x_mask) = std::move(p);
}

Polynomial CubeFunction::fourier_coeff(uint32_t s_mask) const {
  if (!fourier_) return to_fourier().fourier_coeff(s_mask);
  auto it = fhat_.find(s_mask);
  return it == fhat_.end() ? Polynomial(reg_) : it->second;
}

void CubeFunction::set_fourier_coeff(uint32_t s_mask, Polynomial p) {
  if (!fourier_) throw std::logic_error("CubeFunction: Fourier access on point representation");
  if (p.is_zero())
    fhat_.erase(s_mask);
  else
    fhat_[s_mask] = std::move(p);
}

const std::map<uint32_t, Polynomial>& CubeFunction::fourier_coeffs() const {
  if (!fourier_) throw std::logic_error("CubeFunction: Fourier access on point representation");
  return fhat_;
}

namespace {

// In-place Walsh-Hadamard butterfly.
void wht(std::vector<Polynomial>& v) {
  size_t n = v.size();
  for (size_t len = 1; len < n; len <<= 1) {
    for (size_t i = 0; i < n; i += len << 1) {
      for (size_t j = i; j < i + len; ++j) {
        Polynomial a = v[j] + v[j + len];
        Polynomial b = v[j] - v[j + len];
        v[j] = std::move(a);
        v[j + len] = std::move(b);
      }
    }
  }
}

}  // namespace

CubeFunction CubeFunction::to_fourier() const {
  if (fourier_) return *this;
  // fhat(S) = 2^-n sum_x f(x) chi_S(x), chi_S(x) = (-1)^popcount(S & x).
  std::vector<Polynomial> v = point_;
  wht(v);
  FieldElem scale = FieldElem(Rational(1)) / FieldElem(Rational(long(1) << n_));
  CubeFunction f(reg_, n_, true);
  for (uint32_t s = 0; s < (1u << n_); ++s) {
    Polynomial c = v[s].scale(scale);
    if (!c.is_zero()) f.fhat_.emplace(s, std::move(c));
  }
  return f;
}

CubeFunction CubeFunction::to_points() const {
  if (!fourier_) return *this;
  std::vector<Polynomial> v(size_t{1} << n_, Polynomial(reg_));
  for (auto& [s, c] : fhat_) v[s] = c;
  wht(v);
  CubeFunction f(reg_, n_, false);
  f.point_ = std::move(v);
  return f;
}

CubeFunction CubeFunction::noise(const FieldElem& rho) const {
  CubeFunction f = to_fourier();
  CubeFunction out(reg_, n_, true);
  for (auto& [s, c] : f.fhat_) {
    Polynomial scaled = c.scale(rho.pow(std::popcount(s)));
    if (!scaled.is_zero()) out.fhat_.emplace(s, std::move(scaled));
  }
  return out;
}

CubeFunction CubeFunction::derivative(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("CubeFunction: coordinate index");
  CubeFunction f = to_points();
  CubeFunction d(reg_, n_ - 1, false);
  uint32_t low = (1u << i) - 1;
  FieldElem half = FieldElem(Rational(1, 2));
  for (uint32_t y = 0; y < (1u << (n_ - 1)); ++y) {
    uint32_t x = (y & low) | ((y & ~low) << 1);           // insert coordinate i
    Polynomial diff = f.point_[x] - f.point_[x | (1u << i)];  // f(i->+1) - f(i->-1)
    d.point_[y] = diff.scale(half);
  }
  return d;
}

Polynomial CubeFunction::expectation() const {
  if (fourier_) {
    auto it = fhat_.find(0);
    return it == fhat_.end() ? Polynomial(reg_) : it->second;
  }
  PolyAccum acc(reg_);
  FieldElem w = FieldElem(Rational(1, long(1) << n_));
  for (auto& p : point_) acc.add(p, w);
  return acc.take();
}

Polynomial CubeFunction::expectation_sq() const {
  if (!fourier_) {
    PolyAccum acc(reg_);
    FieldElem w = FieldElem(Rational(1, long(1) << n_));
    for (auto& p : point_) acc.add_product(p, p, w);
    return acc.take();
  }
  // Parseval: E[f^2] = sum_S fhat(S)^2.
  PolyAccum acc(reg_);
  for (auto& [s, c] : fhat_) acc.add_product(c, c);
  return acc.take();
}

Polynomial CubeFunction::influence(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("CubeFunction: coordinate index");
  if (fourier_) {
    PolyAccum acc(reg_);
    for (auto& [s, c] : fhat_)
      if (s & (1u << i)) acc.add_product(c, c);
    return acc.take();
  }
  // Inf_i[f] = E_x[((f(x) - f(x^flip i))/2)^2]  (edge form, same value).
  PolyAccum acc(reg_);
  FieldElem w = FieldElem(Rational(1, long(1) << n_)) * FieldElem(Rational(1, 4));
  for (uint32_t x = 0; x < point_.size(); ++x) {
    Polynomial diff = point_[x] - point_[x ^ (1u << i)];
    acc.add_product(diff, diff, w);
  }
  return acc.take();
}

Polynomial CubeFunction::total_influence() const {
  PolyAccum acc(reg_);
  if (fourier_) {
    for (auto& [s, c] : fhat_) {
      int k = std::popcount(s);
      if (k) acc.add_product(c, c, FieldElem(Rational(k)));
    }
    return acc.take();
  }
  for (int i = 0; i < n_; ++i) acc.add(influence(i));
  return acc.take();
}

Polynomial CubeFunction::variance() const {
  if (fourier_) {
    PolyAccum acc(reg_);
    for (auto& [s, c] : fhat_)
      if (s != 0) acc.add_product(c, c);
    return acc.take();
  }
  Polynomial mean = expectation();
  PolyAccum acc(reg_);
  acc.add(expectation_sq());
  acc.add_product(mean, mean, FieldElem(-1));
  return acc.take();
}

Polynomial CubeFunction::stability(const FieldElem& rho) const {
  CubeFunction f = to_fourier();
  PolyAccum acc(reg_);
  for (auto& [s, c] : f.fhat_) acc.add_product(c, c, rho.pow(std::popcount(s)));
  return acc.take();
}

Polynomial CubeFunction::level_weight(int level) const {
  CubeFunction f = to_fourier();
  PolyAccum acc(reg_);
  for (auto& [s, c] : f.fhat_)
    if (std::popcount(s) == level) acc.add_product(c, c);
  return acc.take();
}

CubeFunction CubeFunction::scale(const FieldElem& c) const {
  CubeFunction out(reg_, n_, fourier_);
  if (fourier_) {
    for (auto& [s, p] : fhat_) {
      Polynomial q = p.scale(c);
      if (!q.is_zero()) out.fhat_.emplace(s, std::move(q));
    }
  } else {
    for (size_t x = 0; x < point_.size(); ++x) out.point_[x] = point_[x].scale(c);
  }
  return out;
}

CubeFunction CubeFunction::operator+(const CubeFunction& o) const {
  if (n_ != o.n_) throw std::invalid_argument("CubeFunction: dimension mismatch");
  if (fourier_ != o.fourier_) return fourier_ ? *this + o.to_fourier() : *this + o.to_points();
  CubeFunction out(reg_, n_, fourier_);
  if (fourier_) {
    out.fhat_ = fhat_;
    for (auto& [s, p] : o.fhat_) {
      Polynomial q = out.fourier_coeff(s) + p;
      if (q.is_zero())
        out.fhat_.erase(s);
      else
        out.fhat_[s] = std::move(q);
    }
  } else {
    for (size_t x = 0; x < point_.size(); ++x) out.point_[x] = point_[x] + o.point_[x];
  }
  return out;
}

CubeFunction CubeFunction::operator-(const CubeFunction& o) const {
  return *this + o.scale(FieldElem(-1));
}

}  // namespace sos
