#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace multab {

/// Smallest-prime-factor table over [2, limit], built with a linear sieve.
/// Immutable after construction.
class PrimeSieve {
 public:
  static constexpr std::uint32_t kDefaultLimit = 10'000'000;

  /// Throws InvalidArgument when limit < 2.
  explicit PrimeSieve(std::uint32_t limit = kDefaultLimit);

  std::uint32_t limit() const noexcept { return limit_; }

  /// Smallest prime factor of n, 2 <= n <= limit.
  std::uint32_t spf(std::uint32_t n) const;
  bool is_prime(std::uint64_t n) const;

  /// All primes <= limit in increasing order.
  std::span<const std::uint32_t> primes() const noexcept { return primes_; }

  /// Primes p with lo < p <= hi (clamped to the sieve range).
  std::span<const std::uint32_t> primes_in(double lo, double hi) const;

 private:
  std::uint32_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

/// Convenience constructor mirroring the library's free-function style.
PrimeSieve build_sieve(std::uint32_t limit);

struct PrimePower {
  std::uint64_t prime;
  std::uint32_t exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = prod p^e with strictly increasing primes.
struct Factorization {
  std::uint64_t n = 1;
  std::vector<PrimePower> parts;

  /// Squarefree integer from a list of distinct primes (any order).
  static Factorization from_primes(std::span<const std::uint64_t> primes);

  /// Multiplies back the prime powers; the round-trip of factorize().
  std::uint64_t product() const;

  /// Smallest prime factor, +infinity for n = 1 (returned as UINT64_MAX).
  std::uint64_t smallest_prime() const noexcept;
  /// Largest prime factor, 1 for n = 1.
  std::uint64_t largest_prime() const noexcept;

  bool squarefree() const noexcept;
  std::uint32_t omega() const noexcept {
    return static_cast<std::uint32_t>(parts.size());
  }

  friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Throws OutOfRange when n is 0 or exceeds the sieve limit.
Factorization factorize(std::uint64_t n, const PrimeSieve& sieve);

bool is_squarefree(std::uint64_t n, const PrimeSieve& sieve);
std::uint32_t omega(std::uint64_t n, const PrimeSieve& sieve);
/// Number of distinct prime factors p of n with p > k.
std::uint32_t omega_k(std::uint64_t n, std::uint64_t k, const PrimeSieve& sieve);

/// Number of ordered m-tuples (d_1,...,d_m) with d_1...d_m = a, computed as
/// prod_p C(e_p + m - 1, m - 1). Throws InvalidArgument for m = 0 and
/// OutOfRange if the count does not fit in 64 bits.
std::uint64_t tau_m(const Factorization& a, std::uint32_t m);
std::uint64_t tau_m(std::uint64_t a, std::uint32_t m, const PrimeSieve& sieve);

/// Binomial coefficient with overflow check.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);

/// Sum of 1/p over primes y < p <= z, accumulated in increasing p.
double prime_reciprocal_sum(std::uint64_t y, std::uint64_t z,
                            const PrimeSieve& sieve);

/// All positive divisors of n in increasing order.
std::vector<std::uint64_t> divisors(const Factorization& f);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) noexcept;

/// Overflow-checked multiplication; throws OutOfRange on overflow.
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

}  // namespace multab
