#include <doctest.h>

#include <cmath>

#include "multab/asymptotics.hpp"
#include "multab/errors.hpp"

using namespace multab;

TEST_CASE("Q and alpha constants") {
  CHECK(q_of(1.0) == 0.0);
  CHECK(q_of(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(q_of(0.0), DomainError);
  CHECK(alpha_seq(1) == doctest::Approx(0.528766373).epsilon(1e-9));
  // alpha_1 solves Q(2^a) = (1 - a) log 2 by construction.
  const double a = alpha_seq(1);
  CHECK(q_of(std::pow(2.0, a)) == doctest::Approx(0.0860713320559342).epsilon(1e-9));
}

TEST_CASE("ell, i1, beta") {
  const std::vector<double> y{100, 1000};
  const auto ell = compute_ell(y);
  CHECK(ell[0] == doctest::Approx(std::log(3.0 * std::log(100.0) / std::log(3.0))));
  CHECK(ell[1] == doctest::Approx(std::log(3.0 * std::log(1000.0) / std::log(100.0))));
  CHECK(find_i1(ell) == 1);
  CHECK_THROWS_AS(compute_ell(std::vector<double>{2.0}), InvalidArgument);
  CHECK_THROWS_AS(compute_ell(std::vector<double>{100, 10}), InvalidArgument);
}

TEST_CASE("solve_alpha back-substitutes") {
  for (std::vector<double> ell : {std::vector<double>{1.0}, {0.5, 2.0}, {3.0, 0.1, 1.0}}) {
    const auto s = solve_alpha(ell.size(), ell);
    CHECK(s.residual < 1e-12);
    CHECK(s.alpha >= alpha_seq(1) - 1e-12);
    CHECK(s.alpha <= alpha_seq(ell.size()) + 1e-12);
  }
}

TEST_CASE("condition arithmetic") {
  CHECK_THROWS(e0_threshold(1));
  for (std::size_t k = 2; k <= 12; ++k) CHECK(e00_interval(k).nonempty == (k >= 6));
  CHECK(e000_holds(2));
}

TEST_CASE("density predictions report hypotheses without throwing") {
  const std::vector<double> y{100, 1000};
  const auto p = profile(y);
  for (auto v : {DensityVariant::general, DensityVariant::small_k, DensityVariant::large_k, DensityVariant::equal_size}) {
    const auto d = predicted_density(p, v);
    CHECK(d.value > 0);
    CHECK(d.value < 1);
    CHECK(parse_density_variant(to_string(v)) == v);
  }
  CHECK_THROWS_AS(parse_density_variant("nope"), InvalidArgument);
}

TEST_CASE("F(x, h) and rho") {
  CHECK(f_xh(1, 1) == doctest::Approx(2 * std::log(2.0)));
  CHECK_THROWS_AS(f_xh(1, 2), DomainError);
  CHECK(rho(1) > 1);
}

TEST_CASE("lambda ladder partitions the window") {
  const PrimeSieve sieve(20000);
  const auto L = build_lambda_ladder(1, 1, std::vector<double>{10000}, sieve);
  CHECK(L.covers_window);
  std::size_t total = 0;
  for (auto c : L.prime_counts) total += c;
  CHECK(total == sieve.primes_in(3, 10000).size());
  for (double s : L.reciprocal_sums) CHECK(s <= L.log_rho);
}
