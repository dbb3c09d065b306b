#include "legnorm/exterior.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "legnorm/errors.hpp"

namespace legnorm {

FormExpr FormExpr::generator(int index) {
  if (index < 0) throw std::invalid_argument("generator index must be >= 0");
  FormExpr f;
  f.terms_[{index}] = 1;
  return f;
}

FormExpr& FormExpr::add_term(Monomial idx, const BigInt& coeff) {
  if (coeff == 0) return *this;
  // insertion sort, counting transpositions
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) return *this;
  BigInt& slot = terms_[idx];
  slot += sign * coeff;
  if (slot == 0) terms_.erase(idx);
  return *this;
}

std::optional<std::size_t> FormExpr::degree() const {
  if (!homogeneous() || terms_.empty()) return std::nullopt;
  return terms_.begin()->first.size();
}

bool FormExpr::homogeneous() const {
  if (terms_.empty()) return true;
  const std::size_t d = terms_.begin()->first.size();
  return std::all_of(terms_.begin(), terms_.end(),
                     [d](const auto& t) { return t.first.size() == d; });
}

int FormExpr::max_index() const {
  int m = -1;
  for (const auto& [mono, c] : terms_)
    if (!mono.empty()) m = std::max(m, mono.back());
  return m;
}

FormExpr& FormExpr::operator+=(const FormExpr& b) {
  for (const auto& [mono, c] : b.terms_) add_term(mono, c);
  return *this;
}

FormExpr& FormExpr::operator-=(const FormExpr& b) {
  for (const auto& [mono, c] : b.terms_) add_term(mono, -c);
  return *this;
}

FormExpr operator*(const BigInt& s, const FormExpr& a) {
  FormExpr r;
  if (s == 0) return r;
  for (const auto& [mono, c] : a.terms_) r.terms_[mono] = s * c;
  return r;
}

std::string FormExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, c] : terms_) {
    const bool negative = c < 0;
    const BigInt mag = negative ? BigInt(-c) : c;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    if (mag != 1 || mono.empty()) os << mag << (mono.empty() ? "" : " ");
    for (std::size_t i = 0; i < mono.size(); ++i)
      os << (i ? "^" : "") << 'A' << mono[i];
  }
  return os.str();
}

FormExpr wedge(const FormExpr& a, const FormExpr& b) {
  FormExpr r;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      r.add_term(std::move(m), ca * cb);
    }
  return r;
}

namespace {

FormExpr d_generator(int k, const CoeffTable& table) {
  FormExpr r;
  for (int i = 0; i <= k / 2; ++i)
    r.add_term({i, k + 1 - i}, table.at(i, k + 1));
  return r;
}

}  // namespace

FormExpr differential(const FormExpr& f, int K, const CoeffTable& table) {
  if (f.max_index() > K)
    throw TruncationExceeded("form mentions A" + std::to_string(f.max_index()) +
                             " beyond truncation K=" + std::to_string(K));
  if (table.max_k() < K + 1)
    throw TruncationExceeded("coefficient table too short for K=" +
                             std::to_string(K));
  std::vector<FormExpr> dgen(static_cast<std::size_t>(K) + 1);
  std::vector<bool> have(dgen.size(), false);

  FormExpr out;
  for (const auto& [mono, coeff] : f.terms()) {
    for (std::size_t j = 0; j < mono.size(); ++j) {
      const auto g = static_cast<std::size_t>(mono[j]);
      if (!have[g]) {
        dgen[g] = d_generator(mono[j], table);
        have[g] = true;
      }
      // a_1 ^ ... ^ d a_j ^ ... ^ a_m carries sign (-1)^j
      const BigInt c = j % 2 ? BigInt(-coeff) : coeff;
      for (const auto& [pair, pc] : dgen[g].terms()) {
        Monomial m(mono.begin(), mono.begin() + static_cast<long>(j));
        m.insert(m.end(), pair.begin(), pair.end());
        m.insert(m.end(), mono.begin() + static_cast<long>(j) + 1, mono.end());
        out.add_term(std::move(m), c * pc);
      }
    }
  }
  return out;
}

FormExpr differential(const FormExpr& f, int K) {
  return differential(f, K, CoeffTable(K + 1));
}

FormExpr check_d_squared(int k, int K, const CoeffTable& table) {
  if (k < 0 || K < k + 2)
    throw std::invalid_argument("check_d_squared needs 0 <= k and K >= k + 2");
  return differential(differential(FormExpr::generator(k), K, table), K,
                      table);
}

FormExpr check_d_squared(int k, int K) {
  return check_d_squared(k, K, CoeffTable(K + 1));
}

}  // namespace legnorm
