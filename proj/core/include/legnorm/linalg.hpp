#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace legnorm {

using Vec = std::vector<double>;

/// Square dense real matrix, row-major. Entries must be finite.
class Mat {
 public:
  Mat() = default;
  explicit Mat(std::size_t n, double fill = 0.0);
  /// Row-wise literal; throws std::invalid_argument for ragged or
  /// non-finite input.
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat from_rows(const std::vector<Vec>& rows);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }
  std::span<const double> data() const noexcept { return a_; }

  Mat transposed() const;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  friend Mat operator+(const Mat& a, const Mat& b);
  friend Mat operator-(const Mat& a, const Mat& b);
  friend Mat operator*(const Mat& a, const Mat& b);
  friend Mat operator*(double s, const Mat& a);
  friend Vec operator*(const Mat& a, std::span<const double> x);
  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Outer product a b^T.
Mat outer(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
/// Row vector times matrix: (x^T m)_j = sum_i x_i m(i,j).
Vec left_multiply(std::span<const double> x, const Mat& m);
double max_abs(std::span<const double> x) noexcept;

struct Inverse {
  Mat inverse;
  double residual;  // max |m * inverse - I|
};

/// LU with partial pivoting. SingularMatrix when a pivot drops below
/// tol * max|entry|.
Inverse invert(const Mat& m, double tol);

/// Determinant by LU; sign follows the row permutation parity.
double det(const Mat& m);

struct RankKernel {
  std::size_t rank;
  std::vector<Vec> kernel;  // orthonormal basis of the numerical null space
};

/// Rank by full row reduction with pivots >= tol * max|entry|.
/// rank + kernel.size() == n always.
RankKernel rank_and_kernel(const Mat& m, double tol);

}  // namespace legnorm
