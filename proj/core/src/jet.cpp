#include "legnorm/jet.hpp"

#include <cmath>
#include <string>

#include "legnorm/errors.hpp"

namespace legnorm {

Jet2::Jet2(double value, std::size_t n)
    : value_(value), grad_(n, 0.0), hess_(n * (n + 1) / 2, 0.0) {}

Jet2 Jet2::seed(VarKind kind, std::size_t index, double value,
                std::size_t n) {
  if (index < 1 || index > n) {
    throw IndexOutOfRange("seed index " + std::to_string(index) +
                          " outside [1, " + std::to_string(n) + "]");
  }
  Jet2 j(value, n);
  if (kind == VarKind::Fiber) j.grad_[index - 1] = 1.0;
  return j;
}

std::vector<double> Jet2::hessian() const {
  const std::size_t n = dim();
  std::vector<double> h(n * n);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t k = 0; k < n; ++k) h[q * n + k] = hess(q, k);
  return h;
}

Jet2 Jet2::operator-() const {
  Jet2 r = *this;
  r.value_ = -r.value_;
  for (double& g : r.grad_) g = -g;
  for (double& h : r.hess_) h = -h;
  return r;
}

Jet2& Jet2::operator+=(const Jet2& b) {
  value_ += b.value_;
  for (std::size_t k = 0; k < grad_.size(); ++k) grad_[k] += b.grad_[k];
  for (std::size_t k = 0; k < hess_.size(); ++k) hess_[k] += b.hess_[k];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& b) {
  value_ -= b.value_;
  for (std::size_t k = 0; k < grad_.size(); ++k) grad_[k] -= b.grad_[k];
  for (std::size_t k = 0; k < hess_.size(); ++k) hess_[k] -= b.hess_[k];
  return *this;
}

Jet2& Jet2::operator*=(double s) {
  value_ *= s;
  for (double& g : grad_) g *= s;
  for (double& h : hess_) h *= s;
  return *this;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  const std::size_t n = a.dim();
  Jet2 r(a.value_ * b.value_, n);
  for (std::size_t k = 0; k < n; ++k)
    r.grad_[k] = a.value_ * b.grad_[k] + b.value_ * a.grad_[k];
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t k = q; k < n; ++k) {
      const std::size_t c = r.packed(q, k);
      r.hess_[c] = a.value_ * b.hess_[c] + b.value_ * a.hess_[c] +
                   a.grad_[q] * b.grad_[k] + b.grad_[q] * a.grad_[k];
    }
  }
  return r;
}

Jet2 operator/(const Jet2& a, const Jet2& b) {
  if (b.value_ == 0.0) throw DomainError("division by zero");
  const std::size_t n = a.dim();
  const double q = a.value_ / b.value_;
  Jet2 r(q, n);
  for (std::size_t k = 0; k < n; ++k)
    r.grad_[k] = (a.grad_[k] - q * b.grad_[k]) / b.value_;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      const std::size_t c = r.packed(i, k);
      r.hess_[c] = (a.hess_[c] - q * b.hess_[c] - r.grad_[i] * b.grad_[k] -
                    b.grad_[i] * r.grad_[k]) /
                   b.value_;
    }
  }
  return r;
}

Jet2 Jet2::chain(double f0, double f1, double f2) const {
  const std::size_t n = dim();
  Jet2 r(f0, n);
  for (std::size_t k = 0; k < n; ++k) r.grad_[k] = f1 * grad_[k];
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t k = q; k < n; ++k) {
      const std::size_t c = packed(q, k);
      r.hess_[c] = f1 * hess_[c] + f2 * grad_[q] * grad_[k];
    }
  }
  return r;
}

Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value());
  return a.chain(e, e, e);
}

Jet2 log(const Jet2& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("ln of non-positive value");
  return a.chain(std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(s, c, -s);
}

Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(c, -s, -c);
}

Jet2 sqrt(const Jet2& a) {
  const double x = a.value();
  if (x < 0.0) throw DomainError("sqrt of negative value");
  const double r = std::sqrt(x);
  if (x == 0.0) {
    for (double g : a.gradient())
      if (g != 0.0) throw DomainError("sqrt not differentiable at 0");
    return a.chain(0.0, 0.0, 0.0);
  }
  return a.chain(r, 0.5 / r, -0.25 / (r * x));
}

Jet2 pow(const Jet2& a, int k) {
  const double x = a.value();
  if (x == 0.0 && k < 0) throw DomainError("division by zero in power");
  const double f0 = std::pow(x, static_cast<double>(k));
  if (k == 0) return a.chain(f0, 0.0, 0.0);
  const double f1 = k * std::pow(x, static_cast<double>(k - 1));
  const double f2 =
      k == 1 ? 0.0 : k * (k - 1.0) * std::pow(x, static_cast<double>(k - 2));
  return a.chain(f0, f1, f2);
}

Jet2 pow(const Jet2& a, const Jet2& b) {
  if (!(a.value() > 0.0))
    throw DomainError("non-integer power of non-positive base");
  return exp(b * log(a));
}

}  // namespace legnorm
