#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "legnorm/coeffs.hpp"

namespace legnorm {

/// Strictly increasing generator indices; {0, 5} is A_0 ^ A_5.
using Monomial = std::vector<int>;

/// Element of the free exterior algebra over formal 1-forms A_0, A_1, ...
/// with exact integer coefficients. Zero coefficients are never stored.
class FormExpr {
 public:
  FormExpr() = default;
  static FormExpr generator(int index);

  /// Adds coeff * A_{idx[0]} ^ A_{idx[1]} ^ ..., reordering the factors
  /// (with sign) into canonical form. Repeated generators contribute
  /// nothing.
  FormExpr& add_term(Monomial idx, const BigInt& coeff);

  const std::map<Monomial, BigInt>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Degree shared by every term; nullopt for the zero form or a mixed sum.
  std::optional<std::size_t> degree() const;
  bool homogeneous() const;
  int max_index() const;  // -1 for the zero form

  FormExpr& operator+=(const FormExpr& b);
  FormExpr& operator-=(const FormExpr& b);
  friend FormExpr operator+(FormExpr a, const FormExpr& b) { return a += b; }
  friend FormExpr operator-(FormExpr a, const FormExpr& b) { return a -= b; }
  friend FormExpr operator*(const BigInt& s, const FormExpr& a);
  friend bool operator==(const FormExpr&, const FormExpr&) = default;

  /// e.g. "A0^A5 + 3 A1^A4 + 2 A2^A3"; "0" for the zero form.
  std::string to_string() const;

 private:
  std::map<Monomial, BigInt> terms_;
};

FormExpr wedge(const FormExpr& a, const FormExpr& b);

/// Extends dA_k = sum_{i=0}^{[k/2]} C^i_{k+1} A_i ^ A_{k+1-i} to all forms
/// by linearity and the graded Leibniz rule
/// d(a ^ b) = da ^ b - a ^ db for a 1-form a.
/// Throws TruncationExceeded if f mentions a generator above K, or if the
/// table does not reach row K+1.
FormExpr differential(const FormExpr& f, int K, const CoeffTable& table);
FormExpr differential(const FormExpr& f, int K);

/// d(dA_k); the zero form is required. K >= k + 2.
FormExpr check_d_squared(int k, int K, const CoeffTable& table);
FormExpr check_d_squared(int k, int K);

}  // namespace legnorm
