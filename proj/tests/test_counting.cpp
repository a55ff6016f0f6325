#include <doctest.h>

#include <cmath>
#include <set>

#include "multab/counting.hpp"
#include "multab/divisor_geometry.hpp"
#include "multab/errors.hpp"

using namespace multab;

namespace {

const PrimeSieve& sieve() {
  static const PrimeSieve s(200000);
  return s;
}

std::uint64_t brute_a(const std::vector<std::uint64_t>& sides) {
  std::set<std::uint64_t> s{1};
  for (auto n : sides) {
    std::set<std::uint64_t> t;
    for (auto m : s) {
      for (std::uint64_t b = 1; b <= n; ++b) t.insert(m * b);
    }
    s = std::move(t);
  }
  return s.size();
}

// k = 1 and 2 by direct divisor scans.
std::uint64_t brute_h(std::uint64_t x, const std::vector<double>& y, const std::vector<double>& z,
                      bool squarefree_only = false) {
  std::uint64_t c = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (squarefree_only && !is_squarefree(n, sieve())) continue;
    bool hit = false;
    for (std::uint64_t d1 = 1; d1 <= n && !hit; ++d1) {
      if (n % d1 || !(d1 > y[0] && d1 <= z[0])) continue;
      if (y.size() == 1) {
        hit = true;
        break;
      }
      for (std::uint64_t d2 = 1; d2 <= n / d1 && !hit; ++d2) {
        hit = (n % (d1 * d2) == 0) && d2 > y[1] && d2 <= z[1];
      }
    }
    c += hit;
  }
  return c;
}

}  // namespace

TEST_CASE("count_A against a set oracle") {
  for (std::vector<std::uint64_t> s :
       {std::vector<std::uint64_t>{4, 4}, {2, 2, 2}, {1, 7}, {10, 12}, {30, 30}, {5, 6, 7}, {3, 3, 3, 3}}) {
    CHECK(count_A(s) == brute_a(s));
    CHECK(table_members(s).size() == brute_a(s));
  }
  CHECK(count_A(std::vector<std::uint64_t>{4, 4}) == 9);
  CHECK(count_A(std::vector<std::uint64_t>{60, 70}, kDefaultBudgetBits, 3) == brute_a({60, 70}));
}

TEST_CASE("count_A reports the budget it would need") {
  const std::vector<std::uint64_t> s{1000, 1000};
  try {
    count_A(s, 1000);
    FAIL("expected ResourceLimit");
  } catch (const ResourceLimit& e) {
    CHECK(e.required() >= 1000000 / 8);
  }
}

TEST_CASE("count_H against divisor scans") {
  CHECK(count_H(20, std::vector<double>{2}, std::vector<double>{4}, sieve()) == 10);
  for (auto [x, y, z] : {std::tuple{500ull, 3.0, 9.0}, {1000ull, 10.0, 20.0}, {777ull, 0.5, 2.5}}) {
    const std::vector<double> yy{y}, zz{z};
    CHECK(count_H(x, yy, zz, sieve()) == brute_h(x, yy, zz));
    CHECK(count_H_star(x, yy, zz, sieve()) == brute_h(x, yy, zz, true));
  }
  const std::vector<double> y2{2, 3}, z2{5, 8};
  CHECK(count_H(600, y2, z2, sieve()) == brute_h(600, y2, z2));
  CHECK(count_H(600, y2, z2, sieve(), 4) == brute_h(600, y2, z2));
}

TEST_CASE("P_* enumeration") {
  const auto v = enumerate_pstar(3, 10, sieve());
  CHECK(v == std::vector<std::uint64_t>{1, 5, 7, 35});
  CHECK(enumerate_pstar(3, 10, sieve(), 10) == std::vector<std::uint64_t>{1, 5, 7});
  CHECK_THROWS_AS(enumerate_pstar(1, 1000, sieve(), UINT64_MAX, 100), ResourceLimit);
}

TEST_CASE("S sum over P_*^k") {
  // k = 1, t = 5: a in {1, 2, 3, 5, 6, 10, 15, 30}, direct sum of L(a)/a.
  const std::vector<double> t{5};
  const auto r = s_sum(t, {}, sieve());
  double want = 0.0;
  for (std::uint64_t a : {1, 2, 3, 5, 6, 10, 15, 30}) {
    want += l_volume(FactoredTuple::from_values(std::vector<std::uint64_t>{a}, sieve())) /
            static_cast<double>(a);
  }
  CHECK(r.tuples == 8);
  CHECK(r.sum == doctest::Approx(want).epsilon(1e-12));
  std::size_t count = 0;
  for_each_pstar_k(std::vector<double>{3, 7}, {}, sieve(), [&](const SquarefreeTuple&) { ++count; });
  CHECK(count == 4 * 4);
}

TEST_CASE("local-global pieces") {
  CHECK(local_global_admissible(1e6, std::vector<double>{10}));
  CHECK_FALSE(local_global_admissible(100, std::vector<double>{10}));
  const auto r = local_global_ratio(4000, std::vector<double>{10}, {}, sieve());
  CHECK(r.h_count == brute_h(4000, {10}, {20}));
  CHECK(r.ratio == doctest::Approx(r.lhs / r.rhs));
  CHECK(r.ratio > 0);
}

TEST_CASE("table sandwich for small k = 1 tables") {
  for (std::uint64_t n = 1; n <= 40; n += 3) {
    for (std::uint64_t m = n; m <= 60; m += 7) {
      const std::vector<std::uint64_t> s{n, m};
      const auto sw = table_sandwich(s, sieve());
      CHECK(sw.a == brute_a(s));
      CHECK(sw.lower <= sw.a);
      CHECK(sw.a <= sw.upper);
    }
  }
}
