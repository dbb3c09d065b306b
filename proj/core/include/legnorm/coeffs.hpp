#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace legnorm {

using BigInt = boost::multiprecision::cpp_int;

/// Normality coefficients C^i_k on the domain 1 <= k <= max_k, 0 <= 2i < k,
/// filled by the three-branch recurrence
///
///   C^0_{k+1} = 1,
///   C^i_{k+1} = C^{i-1}_k + C^i_k   for 0 < 2i < k,
///   C^i_{k+1} = C^{i-1}_k           for 2i = k,
///
/// seeded with C^0_1 = 1. Entries can be overwritten through set(), which
/// exists so that verification code can be run against a perturbed table.
class CoeffTable {
 public:
  explicit CoeffTable(int max_k);

  static bool in_domain(int i, int k) noexcept {
    return k >= 1 && i >= 0 && 2 * i < k;
  }

  int max_k() const noexcept { return max_k_; }
  /// Throws IndexOutOfDomain outside the domain or beyond max_k.
  const BigInt& at(int i, int k) const;
  void set(int i, int k, BigInt value);

  struct Entry {
    int k;
    int i;
    BigInt value;
  };
  /// All entries in lexicographic (k, i) order.
  std::vector<Entry> entries() const;
  /// "k,i,C" header followed by one row per entry.
  std::string to_csv() const;

 private:
  std::size_t offset(int i, int k) const;
  int max_k_;
  std::vector<BigInt> values_;
};

/// C^i_k by memoized recurrence. Throws IndexOutOfDomain.
BigInt coeff_recurrence(int i, int k);

/// Product form prod_{s=1..i} (k-1-s)/s - prod_{s=1..k-i} (k-1-s)/s in
/// exact rationals. Throws IndexOutOfDomain, or NonIntegerResult if the
/// rational result is not integral.
///
/// Note that at (i, k) = (0, 1) the second product is -1, so this returns
/// 2 while the recurrence seed is 1. Every other domain pair agrees.
BigInt coeff_closed(int i, int k);

/// A canonical three-generator monomial A_a ^ A_b ^ A_c, a < b < c.
struct Triple {
  int a, b, c;
  auto operator<=>(const Triple&) const = default;
};

struct CancellationReport {
  int k = 0;
  std::size_t terms = 0;      // nonzero wedge terms enumerated
  std::size_t monomials = 0;  // distinct canonical monomials touched
  std::vector<std::pair<Triple, BigInt>> residues;  // monomials that survive

  bool passed() const noexcept { return residues.empty(); }
};

/// Enumerates both double sums of the A_0-free remainder S of d(dA_k)
/// term by term, sorts every wedge product into a canonical monomial with
/// its permutation sign, and collects the total coefficient per monomial.
/// The identity requires every total to be exactly zero. Requires k >= 2.
CancellationReport verify_monomial_cancellation(int k, const CoeffTable& table);
CancellationReport verify_monomial_cancellation(int k);

/// C^{m+3-p}_{2m+8} C^{p+2}_{m+6+p} - C^{p+2}_{2m+8} C^{m+3-p}_{2m+7-p} == 0
/// for m >= 0, p >= 0, 2p < m + 1. Throws IndexOutOfDomain otherwise.
bool verify_segment_identity(int m, int p);

}  // namespace legnorm
