#include "legnorm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "legnorm/errors.hpp"

namespace legnorm {

Mat::Mat(std::size_t n, double fill) : n_(n), a_(n * n, fill) {
  if (!std::isfinite(fill)) throw std::invalid_argument("non-finite fill");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()) {
  a_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw std::invalid_argument("matrix must be square");
    a_.insert(a_.end(), row.begin(), row.end());
  }
  if (!all_finite()) throw std::invalid_argument("non-finite matrix entry");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
  Mat m(rows.size());
  for (std::size_t i = 0; i < m.n_; ++i) {
    if (rows[i].size() != m.n_)
      throw std::invalid_argument("matrix must be square");
    std::copy(rows[i].begin(), rows[i].end(), m.a_.begin() + i * m.n_);
  }
  if (!m.all_finite()) throw std::invalid_argument("non-finite matrix entry");
  return m;
}

Mat Mat::transposed() const {
  Mat t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Mat::max_abs() const noexcept { return legnorm::max_abs(a_); }

bool Mat::all_finite() const noexcept {
  return std::all_of(a_.begin(), a_.end(),
                     [](double x) { return std::isfinite(x); });
}

Mat operator+(const Mat& a, const Mat& b) {
  Mat r = a;
  for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += b.a_[k];
  return r;
}

Mat operator-(const Mat& a, const Mat& b) {
  Mat r = a;
  for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= b.a_[k];
  return r;
}

Mat operator*(const Mat& a, const Mat& b) {
  const std::size_t n = a.n_;
  Mat r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Mat operator*(double s, const Mat& a) {
  Mat r = a;
  for (double& x : r.a_) x *= s;
  return r;
}

Vec operator*(const Mat& a, std::span<const double> x) {
  Vec r(a.n_, 0.0);
  for (std::size_t i = 0; i < a.n_; ++i)
    for (std::size_t j = 0; j < a.n_; ++j) r[i] += a(i, j) * x[j];
  return r;
}

Mat outer(std::span<const double> a, std::span<const double> b) {
  Mat r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r(i, j) = a[i] * b[j];
  return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec left_multiply(std::span<const double> x, const Mat& m) {
  Vec r(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) r[j] += x[i] * m(i, j);
  return r;
}

double max_abs(std::span<const double> x) noexcept {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

namespace {

struct Lu {
  Mat lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

// Doolittle LU in place with partial pivoting. `floor` is the absolute
// pivot threshold below which the factorization is flagged singular.
Lu factor(const Mat& m, double floor) {
  Lu f{m, {}, 1, false};
  const std::size_t n = m.size();
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  Mat& a = f.lu;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (std::abs(a(p, c)) <= floor) {
      f.singular = true;
      continue;
    }
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      std::swap(f.perm[p], f.perm[c]);
      f.sign = -f.sign;
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double l = a(r, c) / a(c, c);
      a(r, c) = l;
      for (std::size_t j = c + 1; j < n; ++j) a(r, j) -= l * a(c, j);
    }
  }
  return f;
}

}  // namespace

Inverse invert(const Mat& m, double tol) {
  const std::size_t n = m.size();
  const Lu f = factor(m, tol * m.max_abs());
  if (f.singular || n == 0) throw SingularMatrix();
  Mat inv(n);
  for (std::size_t col = 0; col < n; ++col) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = f.perm[i] == col ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
      x[i] /= f.lu(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  const Mat r = m * inv - Mat::identity(n);
  return {inv, r.max_abs()};
}

double det(const Mat& m) {
  const Lu f = factor(m, 0.0);
  if (f.singular) return 0.0;
  double d = f.sign;
  for (std::size_t i = 0; i < m.size(); ++i) d *= f.lu(i, i);
  return d;
}

RankKernel rank_and_kernel(const Mat& m, double tol) {
  const std::size_t n = m.size();
  const double floor = tol * m.max_abs();
  Mat a = m;
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < n; ++c) {
    std::size_t p = row;
    for (std::size_t r = row + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    const double piv = std::abs(a(p, c));
    if (piv == 0.0 || piv < floor) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(row, j));
    const double d = a(row, c);
    for (std::size_t j = 0; j < n; ++j) a(row, j) /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row) continue;
      const double l = a(r, c);
      if (l == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) a(r, j) -= l * a(row, j);
    }
    pivot_cols.push_back(c);
    ++row;
  }

  RankKernel out{pivot_cols.size(), {}};
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Vec k(n, 0.0);
    k[f] = 1.0;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r)
      k[pivot_cols[r]] = -a(r, f);
    // modified Gram-Schmidt against the vectors found so far
    for (const Vec& b : out.kernel) {
      const double proj = dot(k, b);
      for (std::size_t i = 0; i < n; ++i) k[i] -= proj * b[i];
    }
    const double norm = std::sqrt(dot(k, k));
    for (double& x : k) x /= norm;
    out.kernel.push_back(std::move(k));
  }
  return out;
}

}  // namespace legnorm
