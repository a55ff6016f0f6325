#include <doctest.h>

#include <map>

#include "multab/arith.hpp"
#include "multab/errors.hpp"

using namespace multab;

namespace {

bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Ordered m-factorizations of a by recursion over divisors.
std::uint64_t brute_tau(std::uint64_t a, std::uint32_t m) {
  if (m == 1) return 1;
  std::uint64_t c = 0;
  for (std::uint64_t d = 1; d <= a; ++d) {
    if (a % d == 0) c += brute_tau(a / d, m - 1);
  }
  return c;
}

const PrimeSieve& sieve() {
  static const PrimeSieve s(100000);
  return s;
}

}  // namespace

TEST_CASE("sieve agrees with trial division") {
  for (std::uint64_t n = 0; n <= 20000; ++n) CHECK(sieve().is_prime(n) == trial_prime(n));
  CHECK(sieve().primes().size() == 9592);
  CHECK(sieve().primes_in(10, 30).size() == 6);
  CHECK_THROWS_AS(PrimeSieve(1), InvalidArgument);
}

TEST_CASE("factorization round trip and basic functions") {
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    const auto f = factorize(n, sieve());
    CHECK(f.product() == n);
    std::uint64_t m = n, distinct = 0;
    bool sqf = true;
    for (std::uint64_t p = 2; p <= m; ++p) {
      if (m % p) continue;
      ++distinct;
      int e = 0;
      while (m % p == 0) m /= p, ++e;
      sqf = sqf && e == 1;
    }
    CHECK(omega(n, sieve()) == distinct);
    CHECK(is_squarefree(n, sieve()) == sqf);
  }
  CHECK_THROWS_AS(factorize(0, sieve()), OutOfRange);
  CHECK_THROWS_AS(factorize(200000, sieve()), OutOfRange);
  CHECK(omega_k(2 * 3 * 5 * 7, 3, sieve()) == 2);
}

TEST_CASE("tau_m matches brute-force ordered factorizations") {
  for (std::uint64_t a = 1; a <= 200; ++a) {
    for (std::uint32_t m = 1; m <= 4; ++m) CHECK(tau_m(a, m, sieve()) == brute_tau(a, m));
  }
  CHECK_THROWS_AS(tau_m(6, 0, sieve()), InvalidArgument);
}

TEST_CASE("divisors, binomial, gcd, checked_mul") {
  const auto d = divisors(factorize(360, sieve()));
  std::vector<std::uint64_t> want;
  for (std::uint64_t x = 1; x <= 360; ++x) {
    if (360 % x == 0) want.push_back(x);
  }
  CHECK(d == want);
  CHECK(binomial(10, 3) == 120);
  CHECK(binomial(5, 7) == 0);
  CHECK(gcd(84, 36) == 12);
  CHECK(checked_mul(1ull << 31, 1ull << 31) == 1ull << 62);
  CHECK_THROWS_AS(checked_mul(1ull << 32, 1ull << 32), OutOfRange);
}

TEST_CASE("prime reciprocal sum") {
  double want = 0.0;
  for (std::uint64_t p = 11; p <= 1000; ++p) {
    if (trial_prime(p)) want += 1.0 / static_cast<double>(p);
  }
  CHECK(prime_reciprocal_sum(10, 1000, sieve()) == doctest::Approx(want).epsilon(1e-14));
  CHECK(prime_reciprocal_sum(10, 10, sieve()) == 0.0);
}
