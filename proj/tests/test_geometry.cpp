#include <doctest.h>

#include <cmath>
#include <set>

#include "multab/divisor_geometry.hpp"
#include "multab/errors.hpp"

using namespace multab;

namespace {

const PrimeSieve& sieve() {
  static const PrimeSieve s(100000);
  return s;
}

FactoredTuple tup(std::vector<std::uint64_t> a) { return FactoredTuple::from_values(a, sieve()); }

// Chains by direct search over d_i <= prefix product.
std::uint64_t brute_chains(const std::vector<std::uint64_t>& a) {
  std::uint64_t count = 0;
  auto rec = [&](auto&& self, std::size_t i, std::uint64_t pa, std::uint64_t pd) -> void {
    if (i == a.size()) {
      ++count;
      return;
    }
    const std::uint64_t na = pa * a[i];
    for (std::uint64_t d = 1; d <= na; ++d) {
      if (na % (pd * d) == 0) self(self, i + 1, na, pd * d);
    }
  };
  rec(rec, 0, 1, 1);
  return count;
}

}  // namespace

TEST_CASE("chain counts agree with direct search") {
  for (std::vector<std::uint64_t> a : {std::vector<std::uint64_t>{6}, {2, 3}, {4, 6}, {12, 5, 2},
                                       {1, 1, 1}, {30, 7}, {8, 9}}) {
    CHECK(tau_chain(tup(a)) == brute_chains(a));
    CHECK(divisor_chains(tup(a)).size() == brute_chains(a));
  }
  CHECK(tau_chain(tup({2, 3})) == 6);
  CHECK_THROWS_AS(divisor_chains(tup({2 * 3 * 5 * 7 * 11 * 13}), 4), EnumerationOverflow);
}

TEST_CASE("L volume of small tuples") {
  // k = 1, a = p: the union of [-log 2, 0) and [log p - log 2, log p).
  CHECK(l_volume(tup({2})) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(l_volume(tup({7})) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
  CHECK(l_volume(tup({1, 1})) == doctest::Approx(std::pow(std::log(2.0), 2)).epsilon(1e-14));
  CHECK(l_volume(tup({2, 3})) == doctest::Approx(2.683312066092).epsilon(1e-11));
}

TEST_CASE("box union volume of hand-made unions") {
  BoxUnion u;
  u.k = 1;
  Box b1, b2;
  b1.lo[0] = {1, false};
  b1.hi[0] = {4, false};
  b2.lo[0] = {2, false};
  b2.hi[0] = {8, false};
  u.boxes = {b1, b2};
  CHECK(box_union_volume(u) == doctest::Approx(std::log(8.0)).epsilon(1e-14));
  u.k = 7;
  CHECK_THROWS_AS(box_union_volume(u), UnsupportedDimension);
}

TEST_CASE("log coordinates compare exactly") {
  CHECK(LogCoordinate{4, true} == LogCoordinate{2, false});
  CHECK(LogCoordinate{3, true} < LogCoordinate{2, false});
  CHECK(LogCoordinate{(1ull << 63) + 1, true} > LogCoordinate{1ull << 62, false});
}

TEST_CASE("admissible z-sequences") {
  // Sequences 0 <= z_1 <= ... <= z_k <= k with z_i >= i - 1 are counted by
  // Catalan numbers C_{k+1}.
  const std::vector<std::size_t> catalan{1, 2, 5, 14, 42};
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto zs = admissible_zseqs(k);
    CHECK(zs.size() == catalan[k]);
    for (const auto& z : zs) CHECK(is_admissible_zseq(z));
  }
  CHECK_FALSE(is_admissible_zseq(std::vector<int>{0, 0, 1}));
}

TEST_CASE("volume bounds on a fixed tuple") {
  const auto a = tup({6, 35});
  const auto b = l_bounds(a);
  CHECK(b.tau_bound == doctest::Approx(tau_chain(a) * std::pow(std::log(2.0), 2)));
  CHECK(b.log_bound == doctest::Approx(std::log(12.0) * std::log(2.0 * 210.0)));
  CHECK(l_volume(a) <= b.bound_a * (1 + 1e-12));
  for (const auto& z : admissible_zseqs(2)) CHECK(l_volume(a) <= conv_ineq_bound(a, z) * (1 + 1e-12));
  CHECK_THROWS_AS(l_product_bound(tup({6}), tup({10})), InvalidArgument);
}

TEST_CASE("squarefree tuples validate windows") {
  CHECK_NOTHROW(SquarefreeTuple::from_primes({{2, 3}, {5, 7}}, {1.0, 3.0, 7.0}));
  CHECK_THROWS_AS(SquarefreeTuple::from_primes({{2, 5}, {7}}, {1.0, 3.0, 7.0}), InvalidArgument);
  const std::vector<std::uint64_t> a{4, 5};
  CHECK_THROWS_AS(SquarefreeTuple::make(a, {1.0, 3.0, 7.0}, sieve()), InvalidArgument);
}

TEST_CASE("convolution bound at z = (k, ..., k) is tau (log 2)^k") {
  for (std::vector<std::uint64_t> a : {std::vector<std::uint64_t>{6}, {6, 35}, {2, 15, 77}}) {
    const auto t = tup(a);
    const std::vector<int> z(a.size(), static_cast<int>(a.size()));
    CHECK(conv_ineq_bound(t, z) ==
          doctest::Approx(tau_chain(t) * std::pow(std::log(2.0), a.size())).epsilon(1e-12));
  }
}
