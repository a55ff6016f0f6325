#pragma once

// Divisor chains d_1...d_i | a_1...a_i, the log-box union they generate and
// its Lebesgue measure, plus the upper bounds and moments built on it.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "multab/arith.hpp"

namespace multab {

inline constexpr std::size_t kMaxDimension = 6;
inline constexpr std::uint64_t kDefaultChainCap = std::uint64_t{1} << 20;

/// A k-vector (a_1, ..., a_k) of positive integers kept in factored form.
class FactoredTuple {
 public:
  FactoredTuple() = default;
  explicit FactoredTuple(std::vector<Factorization> parts);

  static FactoredTuple from_values(std::span<const std::uint64_t> a,
                                   const PrimeSieve& sieve);

  std::size_t k() const noexcept { return parts_.size(); }
  std::uint64_t value(std::size_t i) const { return parts_.at(i).n; }
  std::vector<std::uint64_t> values() const;
  const Factorization& part(std::size_t i) const { return parts_.at(i); }
  std::span<const Factorization> parts() const noexcept { return parts_; }

  /// a_1 ... a_k, overflow-checked.
  std::uint64_t product() const;
  /// log(a_1 ... a_i) for i = 0..k (index 0 is the empty product).
  std::vector<double> log_prefix_products() const;
  /// mu^2(a_1 ... a_k) = 1.
  bool jointly_squarefree() const;

  /// Coordinate-wise product; supports must be disjoint.
  FactoredTuple times(const FactoredTuple& other) const;

 private:
  std::vector<Factorization> parts_;
};

/// Element of P_*^k(t): a_i squarefree with every prime factor in
/// (t_{i-1}, t_i]. Windows are stored as t_0 <= t_1 <= ... <= t_k.
class SquarefreeTuple {
 public:
  /// Validates the window membership; throws InvalidArgument on failure.
  static SquarefreeTuple make(std::span<const std::uint64_t> a,
                              std::vector<double> windows,
                              const PrimeSieve& sieve);
  static SquarefreeTuple from_primes(
      const std::vector<std::vector<std::uint64_t>>& primes,
      std::vector<double> windows);
  static SquarefreeTuple from_factored(FactoredTuple t, std::vector<double> windows);

  std::size_t k() const noexcept { return tuple_.k(); }
  const FactoredTuple& tuple() const noexcept { return tuple_; }
  std::span<const double> windows() const noexcept { return windows_; }

 private:
  SquarefreeTuple(FactoredTuple t, std::vector<double> w)
      : tuple_(std::move(t)), windows_(std::move(w)) {}
  static void validate(const FactoredTuple& t, std::span<const double> w);

  FactoredTuple tuple_;
  std::vector<double> windows_;
};

/// The real number log d - [halved] log 2, compared exactly.
struct LogCoordinate {
  std::uint64_t d = 1;
  bool halved = false;

  double value() const noexcept;

  friend std::strong_ordering operator<=>(const LogCoordinate& a,
                                          const LogCoordinate& b) noexcept {
    const unsigned __int128 lhs = static_cast<unsigned __int128>(a.d) << (b.halved ? 1 : 0);
    const unsigned __int128 rhs = static_cast<unsigned __int128>(b.d) << (a.halved ? 1 : 0);
    return lhs <=> rhs;
  }
  friend bool operator==(const LogCoordinate& a, const LogCoordinate& b) noexcept {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

/// hi - lo as a double.
double log_width(const LogCoordinate& lo, const LogCoordinate& hi) noexcept;

/// Half-open box prod [lo_i, hi_i).
struct Box {
  std::array<LogCoordinate, kMaxDimension> lo{};
  std::array<LogCoordinate, kMaxDimension> hi{};
};

struct BoxUnion {
  std::size_t k = 0;
  std::vector<Box> boxes;

  /// Checks lo < hi on every axis of every box.
  bool well_formed() const noexcept;
};

/// Flat storage of divisor chains: chain j occupies d[j*k, (j+1)*k).
struct ChainSet {
  std::size_t k = 0;
  std::vector<std::uint64_t> d;

  std::size_t size() const noexcept { return k == 0 ? 0 : d.size() / k; }
  std::span<const std::uint64_t> operator[](std::size_t j) const {
    return {d.data() + j * k, k};
  }
};

/// tau_{k+1}(a): number of chains, exact for any tuple (per-prime DP).
std::uint64_t tau_chain(const FactoredTuple& a);

/// Calls fn(d) for each chain in lexicographic order of exponent choice.
/// Throws EnumerationOverflow when tau_chain(a) > cap.
void for_each_chain(const FactoredTuple& a,
                    const std::function<void(std::span<const std::uint64_t>)>& fn,
                    std::uint64_t cap = kDefaultChainCap);

ChainSet divisor_chains(const FactoredTuple& a, std::uint64_t cap = kDefaultChainCap);

/// Chains with y_i < d_i <= z_i. Window bounds may be +infinity.
std::uint64_t tau_chain_window(const FactoredTuple& a, std::span<const double> y,
                               std::span<const double> z);

/// One box [log(d_i/2), log d_i) per chain.
BoxUnion build_l_boxes(const FactoredTuple& a, std::uint64_t cap = kDefaultChainCap);

/// Lebesgue measure of the union. All ordering uses exact coordinate
/// comparison; widths are converted to double only when a cell is summed.
/// Throws UnsupportedDimension when u.k > max_dim.
double box_union_volume(const BoxUnion& u, std::size_t max_dim = kMaxDimension);

/// L^{(k+1)}(a).
double l_volume(const FactoredTuple& a, std::uint64_t cap = kDefaultChainCap);

struct LBounds {
  double tau_bound;   // tau_{k+1}(a) (log 2)^k
  double log_bound;   // prod_i log(2 a_1 ... a_i)
  double bound_a;     // min of the two
};

LBounds l_bounds(const FactoredTuple& a);

/// tau_{k+1}(a) L^{(k+1)}(b), an upper bound for L^{(k+1)}(a*b).
/// Throws InvalidArgument unless gcd(a_1...a_k, b_1...b_k) = 1.
double l_product_bound(const FactoredTuple& a, const FactoredTuple& b,
                             std::uint64_t cap = kDefaultChainCap);

/// All integer sequences 0 <= z_1 <= ... <= z_k <= k with z_i >= i - 1.
std::vector<std::vector<int>> admissible_zseqs(std::size_t k);
bool is_admissible_zseq(std::span<const int> z);

/// Right-hand side of the convolution inequality for L^{(k+1)}(a):
///   sum_{d_j | a_j} prod_j (z_j - j + 1)^{omega(d_j)}
///     * min{ prod_{j=0}^{k} log^{z_{j+1}-z_j}(2 a_1...a_j),
///            (log 2)^k prod_j (k - z_j + 1)^{omega(a_j/d_j)} }
/// with 0^0 = 1. Requires a jointly squarefree tuple.
double conv_ineq_bound(const FactoredTuple& a, std::span<const int> zseq);

/// W^P_{k+1}(a) = sum over chains d of (#chains d' with
/// |log(d'_i/d_i)| < log 2 for all i)^{P-1}; 1 < P <= 2.
double w_moment(const FactoredTuple& a, double p, std::uint64_t cap = kDefaultChainCap);

}  // namespace multab
