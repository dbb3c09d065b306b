#include "legnorm/coeffs.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "legnorm/errors.hpp"

namespace legnorm {

namespace {

using Rational = boost::multiprecision::cpp_rational;

std::string pair_text(int i, int k) {
  return "(i=" + std::to_string(i) + ", k=" + std::to_string(k) + ")";
}

void require_domain(int i, int k) {
  if (!CoeffTable::in_domain(i, k))
    throw IndexOutOfDomain("C^i_k undefined at " + pair_text(i, k) +
                           "; need k >= 1 and 0 <= 2i < k");
}

}  // namespace

CoeffTable::CoeffTable(int max_k) : max_k_(max_k) {
  if (max_k < 1) throw IndexOutOfDomain("coefficient table needs max_k >= 1");
  values_.resize(offset(0, max_k + 1));
  values_[offset(0, 1)] = 1;
  for (int k = 1; k < max_k; ++k) {
    // row k+1 from row k
    for (int i = 0; 2 * i < k + 1; ++i) {
      BigInt& c = values_[offset(i, k + 1)];
      if (i == 0)
        c = 1;
      else if (2 * i < k)
        c = values_[offset(i - 1, k)] + values_[offset(i, k)];
      else
        c = values_[offset(i - 1, k)];
    }
  }
}

// Row k holds ceil(k/2) entries; rows are laid out consecutively.
std::size_t CoeffTable::offset(int i, int k) const {
  std::size_t before = 0;
  for (int r = 1; r < k; ++r) before += static_cast<std::size_t>((r + 1) / 2);
  return before + static_cast<std::size_t>(i);
}

const BigInt& CoeffTable::at(int i, int k) const {
  require_domain(i, k);
  if (k > max_k_)
    throw IndexOutOfDomain("k=" + std::to_string(k) + " beyond table max_k=" +
                           std::to_string(max_k_));
  return values_[offset(i, k)];
}

void CoeffTable::set(int i, int k, BigInt value) {
  at(i, k);
  values_[offset(i, k)] = std::move(value);
}

std::vector<CoeffTable::Entry> CoeffTable::entries() const {
  std::vector<Entry> out;
  for (int k = 1; k <= max_k_; ++k)
    for (int i = 0; 2 * i < k; ++i) out.push_back({k, i, at(i, k)});
  return out;
}

std::string CoeffTable::to_csv() const {
  std::ostringstream os;
  os << "k,i,C\n";
  for (const auto& e : entries()) os << e.k << ',' << e.i << ',' << e.value << '\n';
  return os.str();
}

BigInt coeff_recurrence(int i, int k) {
  require_domain(i, k);
  static std::mutex mu;
  static std::unique_ptr<CoeffTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (!cache || cache->max_k() < k)
    cache = std::make_unique<CoeffTable>(std::max(k, 64));
  return cache->at(i, k);
}

BigInt coeff_closed(int i, int k) {
  require_domain(i, k);
  Rational first = 1, second = 1;
  for (int s = 1; s <= i; ++s) first *= Rational(k - 1 - s, s);
  for (int s = 1; s <= k - i; ++s) second *= Rational(k - 1 - s, s);
  const Rational c = first - second;
  if (boost::multiprecision::denominator(c) != 1)
    throw NonIntegerResult("closed form not integral at " + pair_text(i, k));
  return boost::multiprecision::numerator(c);
}

namespace {

// Sorts (a, b, c) into increasing order; returns the permutation sign, or
// 0 when an index repeats (the wedge product vanishes).
int canonical(int a, int b, int c, Triple& out) {
  int sign = 1;
  if (a > b) std::swap(a, b), sign = -sign;
  if (b > c) std::swap(b, c), sign = -sign;
  if (a > b) std::swap(a, b), sign = -sign;
  if (a == b || b == c) return 0;
  out = {a, b, c};
  return sign;
}

}  // namespace

CancellationReport verify_monomial_cancellation(int k,
                                                const CoeffTable& table) {
  if (k < 2) throw IndexOutOfDomain("monomial cancellation needs k >= 2");
  CancellationReport rep;
  rep.k = k;
  std::map<Triple, BigInt> ledger;
  auto record = [&](int a, int b, int c, const BigInt& coeff) {
    Triple t{};
    const int sign = canonical(a, b, c, t);
    if (sign == 0 || coeff == 0) return;
    ++rep.terms;
    ledger[t] += sign * coeff;
  };

  // dA_i ^ A_{k+1-i}, A_0-free part
  for (int i = 1; i <= k / 2; ++i)
    for (int s = 1; s <= i / 2; ++s)
      record(s, i + 1 - s, k + 1 - i, table.at(i, k + 1) * table.at(s, i + 1));
  // -A_r ^ dA_{k+1-r}, A_0-free part
  for (int r = 1; r <= k / 2; ++r)
    for (int e = 1; e <= (k + 1 - r) / 2; ++e)
      record(r, e, k + 2 - r - e,
             -(table.at(r, k + 1) * table.at(e, k + 2 - r)));

  rep.monomials = ledger.size();
  for (auto& [t, c] : ledger)
    if (c != 0) rep.residues.emplace_back(t, c);
  return rep;
}

CancellationReport verify_monomial_cancellation(int k) {
  return verify_monomial_cancellation(k, CoeffTable(std::max(k + 2, 3)));
}

bool verify_segment_identity(int m, int p) {
  if (m < 0 || p < 0 || 2 * p >= m + 1)
    throw IndexOutOfDomain("segment identity needs m, p >= 0 and 2p < m + 1");
  const BigInt lhs = coeff_recurrence(m + 3 - p, 2 * m + 8) *
                     coeff_recurrence(p + 2, m + 6 + p);
  const BigInt rhs = coeff_recurrence(p + 2, 2 * m + 8) *
                     coeff_recurrence(m + 3 - p, 2 * m + 7 - p);
  return lhs - rhs == 0;
}

}  // namespace legnorm
