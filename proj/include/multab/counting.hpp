#pragma once

// Brute-force ground-truth counts: distinct products in a (k+1)-dimensional
// multiplication table, integers with a divisor tuple in prescribed
// windows, and the global sum of L^{(k+1)}(a)/(a_1...a_k).

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "multab/arith.hpp"
#include "multab/divisor_geometry.hpp"

namespace multab {

inline constexpr std::uint64_t kDefaultBudgetBits = std::uint64_t{1} << 33;
inline constexpr std::uint64_t kDefaultEnumerationLimit = std::uint64_t{1} << 24;

/// A_{k+1}(N_1, ..., N_{k+1}) = |{n_1...n_{k+1} : n_i <= N_i}|.
///
/// Uses a bit-per-integer presence set over [1, prod N_i]. The set is
/// filled window by window (cache-sized), so only the logical range is
/// charged against budget_bits. Throws ResourceLimit carrying the required
/// byte count when prod N_i exceeds the budget. Sides may be given in any
/// order; the count is symmetric.
std::uint64_t count_A(std::span<const std::uint64_t> sides,
                      std::uint64_t budget_bits = kDefaultBudgetBits,
                      unsigned workers = 1);

/// Sorted distinct members of the table (same budget rules as count_A).
std::vector<std::uint64_t> table_members(std::span<const std::uint64_t> sides,
                                         std::uint64_t budget_bits = kDefaultBudgetBits);

/// H^{(k+1)}(x, y, z): n <= x having d_1...d_k | n with y_i < d_i <= z_i.
/// Requires x <= sieve.limit().
std::uint64_t count_H(std::uint64_t x, std::span<const double> y,
                      std::span<const double> z, const PrimeSieve& sieve,
                      unsigned workers = 1);

/// Same as count_H restricted to squarefree n.
std::uint64_t count_H_star(std::uint64_t x, std::span<const double> y,
                           std::span<const double> z, const PrimeSieve& sieve,
                           unsigned workers = 1);

/// Membership test used by count_H for a single factored n.
bool has_divisor_tuple(const Factorization& n, std::span<const double> y,
                       std::span<const double> z);

/// P_*(y, z): squarefree n with all prime factors in (y, z], including 1,
/// optionally restricted to n <= cap. Sorted ascending. Throws
/// ResourceLimit if more than max_count elements would be produced.
std::vector<Factorization> enumerate_pstar_factored(
    double y, double z, const PrimeSieve& sieve,
    std::uint64_t cap = std::numeric_limits<std::uint64_t>::max(),
    std::uint64_t max_count = kDefaultEnumerationLimit);

std::vector<std::uint64_t> enumerate_pstar(
    double y, double z, const PrimeSieve& sieve,
    std::uint64_t cap = std::numeric_limits<std::uint64_t>::max(),
    std::uint64_t max_count = kDefaultEnumerationLimit);

/// Streams P_*^k(t) with t_0 = 1 and a_i <= caps_i. Empty caps means
/// uncapped. Throws ResourceLimit if the tuple count exceeds max_count.
void for_each_pstar_k(std::span<const double> t, std::span<const double> caps,
                      const PrimeSieve& sieve,
                      const std::function<void(const SquarefreeTuple&)>& fn,
                      std::uint64_t max_count = kDefaultEnumerationLimit);

std::vector<SquarefreeTuple> enumerate_pstar_k(
    std::span<const double> t, std::span<const double> caps,
    const PrimeSieve& sieve, std::uint64_t max_count = kDefaultEnumerationLimit);

/// caps_i = t_i^exponent.
std::vector<double> default_caps(std::span<const double> t, double exponent = 3.0);

struct SSumResult {
  double sum = 0.0;
  std::uint64_t tuples = 0;
};

/// S^{(k+1)}(t) restricted to a_i <= caps_i.
SSumResult s_sum(std::span<const double> t, std::span<const double> caps,
                 const PrimeSieve& sieve,
                 std::uint64_t max_count = kDefaultEnumerationLimit);

/// 2^k y_1...y_k <= x / y_k.
bool local_global_admissible(double x, std::span<const double> y);

struct LocalGlobalResult {
  std::uint64_t h_count = 0;
  double lhs = 0.0;             // H(x, y, 2y) / x
  double log_ratio_factor = 0;  // prod (log y_i / log y_{i-1})^{-(k-i+2)}, y_0 = 3
  SSumResult s{};               // caps as given
  SSumResult s_half{};          // caps halved
  double rhs = 0.0;             // log_ratio_factor * s.sum
  double ratio = 0.0;           // lhs / rhs
  bool admissible = false;
};

/// Both sides of the local-to-global relation for H(x, y, 2y). The
/// admissibility condition is reported, never enforced.
LocalGlobalResult local_global_ratio(std::uint64_t x, std::span<const double> y,
                                     std::span<const double> caps,
                                     const PrimeSieve& sieve, unsigned workers = 1);

struct SandwichResult {
  std::uint64_t a = 0;      // A_{k+1}(N)
  std::uint64_t lower = 0;  // H(prod N / 2^{k^2}, N / 2^k, N / 2^{k-1})
  std::uint64_t upper = 0;  // sum over dyadic shifts m of H(prod N / 2^{|m|}, N/2^{m+1}, N/2^m)
};

/// Both sides of the comparison between A_{k+1} and H used for table
/// counts. sides are sorted ascending internally; N = first k sides.
SandwichResult table_sandwich(std::span<const std::uint64_t> sides,
                              const PrimeSieve& sieve,
                              std::uint64_t budget_bits = kDefaultBudgetBits);

}  // namespace multab
