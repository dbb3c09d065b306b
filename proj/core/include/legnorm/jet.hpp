#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace legnorm {

enum class VarKind { Base, Fiber };  // x^i and v^i

/// Second-order jet of a scalar in the n fiber directions: value, gradient
/// d/dv^k and Hessian d2/dv^q dv^k.
///
/// The Hessian is stored as a packed upper triangle, so hess(q,k) and
/// hess(k,q) read the same cell and symmetry holds exactly for every
/// composite.
class Jet2 {
 public:
  Jet2() = default;
  /// Constant jet (zero derivatives) in dimension n.
  Jet2(double value, std::size_t n);

  /// x^index is a parameter (zero derivatives); v^index is seeded with the
  /// unit gradient e_index. index is 1-based; throws IndexOutOfRange.
  static Jet2 seed(VarKind kind, std::size_t index, double value,
                   std::size_t n);

  std::size_t dim() const noexcept { return grad_.size(); }
  double value() const noexcept { return value_; }
  double grad(std::size_t k) const { return grad_[k]; }
  double hess(std::size_t q, std::size_t k) const {
    return hess_[packed(q, k)];
  }
  const std::vector<double>& gradient() const noexcept { return grad_; }
  /// Dense row-major copy of the Hessian.
  std::vector<double> hessian() const;

  Jet2 operator-() const;
  Jet2& operator+=(const Jet2& b);
  Jet2& operator-=(const Jet2& b);
  Jet2& operator*=(double s);

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
  friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b);
  // Throws DomainError when b has zero value.
  friend Jet2 operator/(const Jet2& a, const Jet2& b);

  /// f(a) given f, f', f'' evaluated at a.value().
  Jet2 chain(double f0, double f1, double f2) const;

 private:
  std::size_t packed(std::size_t q, std::size_t k) const {
    if (q > k) std::swap(q, k);
    // row q of the upper triangle starts after q rows of decreasing length
    return q * dim() - q * (q - 1) / 2 + (k - q);
  }

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;  // packed upper triangle, n(n+1)/2
};

Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);  // DomainError for value <= 0
Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 sqrt(const Jet2& a);  // DomainError for value < 0, or == 0 with nonzero gradient
/// a^k for integer k; DomainError for a == 0 and k < 0.
Jet2 pow(const Jet2& a, int k);
/// a^b = exp(b ln a); DomainError unless a > 0.
Jet2 pow(const Jet2& a, const Jet2& b);

}  // namespace legnorm
