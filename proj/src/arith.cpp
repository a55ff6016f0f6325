#include "multab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "multab/errors.hpp"

namespace multab {

PrimeSieve::PrimeSieve(std::uint32_t limit) : limit_(limit) {
  if (limit < 2) {
    throw InvalidArgument("sieve limit must be at least 2, got " +
                          std::to_string(limit));
  }
  spf_.assign(static_cast<std::size_t>(limit) + 1, 0);
  primes_.reserve(limit / 10 + 16);
  // Linear sieve: every composite is struck exactly once by its spf.
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = i;
      primes_.push_back(i);
    }
    const std::uint32_t si = spf_[i];
    for (std::uint32_t p : primes_) {
      if (p > si) break;
      const std::uint64_t m = static_cast<std::uint64_t>(p) * i;
      if (m > limit) break;
      spf_[m] = p;
    }
  }
}

std::uint32_t PrimeSieve::spf(std::uint32_t n) const {
  if (n < 2 || n > limit_) {
    throw OutOfRange("spf query " + std::to_string(n) + " outside [2, " +
                     std::to_string(limit_) + "]");
  }
  return spf_[n];
}

bool PrimeSieve::is_prime(std::uint64_t n) const {
  if (n > limit_) {
    throw OutOfRange("primality query " + std::to_string(n) +
                     " above sieve limit " + std::to_string(limit_));
  }
  return n >= 2 && spf_[n] == n;
}

std::span<const std::uint32_t> PrimeSieve::primes_in(double lo,
                                                     double hi) const {
  if (!(hi >= lo)) return {};
  const double hi_floor = std::floor(hi);
  if (hi_floor > static_cast<double>(limit_)) {
    throw OutOfRange("prime window upper end " + std::to_string(hi) +
                     " above sieve limit " + std::to_string(limit_));
  }
  const double lo_floor = std::floor(std::max(lo, 0.0));
  const auto lo_i = static_cast<std::uint64_t>(lo_floor);
  const auto hi_i = static_cast<std::uint64_t>(std::max(hi_floor, 0.0));
  auto first = std::upper_bound(primes_.begin(), primes_.end(), lo_i);
  auto last = std::upper_bound(primes_.begin(), primes_.end(), hi_i);
  if (last < first) return {};
  return {first, last};
}

PrimeSieve build_sieve(std::uint32_t limit) { return PrimeSieve(limit); }

Factorization Factorization::from_primes(std::span<const std::uint64_t> primes) {
  Factorization f;
  std::vector<std::uint64_t> ps(primes.begin(), primes.end());
  std::sort(ps.begin(), ps.end());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] < 2) throw InvalidArgument("prime list contains " + std::to_string(ps[i]));
    if (i > 0 && ps[i] == ps[i - 1]) {
      throw InvalidArgument("repeated prime " + std::to_string(ps[i]));
    }
    f.parts.push_back({ps[i], 1});
    f.n = checked_mul(f.n, ps[i]);
  }
  return f;
}

std::uint64_t Factorization::product() const {
  std::uint64_t r = 1;
  for (const auto& pp : parts) {
    for (std::uint32_t e = 0; e < pp.exponent; ++e) r = checked_mul(r, pp.prime);
  }
  return r;
}

std::uint64_t Factorization::smallest_prime() const noexcept {
  return parts.empty() ? std::numeric_limits<std::uint64_t>::max()
                       : parts.front().prime;
}

std::uint64_t Factorization::largest_prime() const noexcept {
  return parts.empty() ? 1 : parts.back().prime;
}

bool Factorization::squarefree() const noexcept {
  return std::all_of(parts.begin(), parts.end(),
                     [](const PrimePower& pp) { return pp.exponent == 1; });
}

Factorization factorize(std::uint64_t n, const PrimeSieve& sieve) {
  if (n == 0 || n > sieve.limit()) {
    throw OutOfRange("cannot factorize " + std::to_string(n) +
                     " with sieve limit " + std::to_string(sieve.limit()));
  }
  Factorization f;
  f.n = n;
  auto m = static_cast<std::uint32_t>(n);
  while (m > 1) {
    const std::uint32_t p = sieve.spf(m);
    std::uint32_t e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    f.parts.push_back({p, e});
  }
  return f;
}

bool is_squarefree(std::uint64_t n, const PrimeSieve& sieve) {
  return factorize(n, sieve).squarefree();
}

std::uint32_t omega(std::uint64_t n, const PrimeSieve& sieve) {
  return factorize(n, sieve).omega();
}

std::uint32_t omega_k(std::uint64_t n, std::uint64_t k, const PrimeSieve& sieve) {
  const auto f = factorize(n, sieve);
  return static_cast<std::uint32_t>(
      std::count_if(f.parts.begin(), f.parts.end(),
                    [k](const PrimePower& pp) { return pp.prime > k; }));
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw OutOfRange("64-bit overflow in " + std::to_string(a) + " * " +
                     std::to_string(b));
  }
  return r;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      throw OutOfRange("binomial(" + std::to_string(n) + ", " +
                       std::to_string(r) + ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t tau_m(const Factorization& a, std::uint32_t m) {
  if (m == 0) throw InvalidArgument("tau_m requires m >= 1");
  std::uint64_t r = 1;
  for (const auto& pp : a.parts) r = checked_mul(r, binomial(pp.exponent + m - 1, m - 1));
  return r;
}

std::uint64_t tau_m(std::uint64_t a, std::uint32_t m, const PrimeSieve& sieve) {
  if (m == 0) throw InvalidArgument("tau_m requires m >= 1");
  return tau_m(factorize(a, sieve), m);
}

double prime_reciprocal_sum(std::uint64_t y, std::uint64_t z,
                            const PrimeSieve& sieve) {
  if (y < 1 || z < y) {
    throw InvalidArgument("prime_reciprocal_sum requires 1 <= y <= z");
  }
  if (z > sieve.limit()) {
    throw OutOfRange("prime_reciprocal_sum upper end " + std::to_string(z) +
                     " above sieve limit");
  }
  double s = 0.0;
  for (std::uint32_t p : sieve.primes_in(static_cast<double>(y),
                                         static_cast<double>(z))) {
    s += 1.0 / p;
  }
  return s;
}

std::vector<std::uint64_t> divisors(const Factorization& f) {
  std::vector<std::uint64_t> ds{1};
  for (const auto& pp : f.parts) {
    const std::size_t base = ds.size();
    std::uint64_t pk = 1;
    for (std::uint32_t e = 1; e <= pp.exponent; ++e) {
      pk *= pp.prime;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) noexcept {
  return std::gcd(a, b);
}

}  // namespace multab
