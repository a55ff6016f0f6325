#include <doctest.h>

#include <cmath>

#include "multab/errors.hpp"
#include "multab/poisson.hpp"

using namespace multab;

namespace {

double pmf(double z, int r) { return std::exp(-z + r * std::log(z) - std::lgamma(r + 1.0)); }

}  // namespace

TEST_CASE("slab probabilities against direct sums") {
  PoissonSpec s{{1.0}, {1.0}};
  CHECK(slab_prob_exact(s, 1.0).value == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // Two coordinates, lambda = (1, 2): sum over the lattice directly.
  PoissonSpec t{{3.0, 2.0}, {1.0, 2.0}};
  const double R = 7.5;
  double want = 0.0;
  for (int a = 0; a < 40; ++a) {
    for (int b = 0; b < 40; ++b) {
      const double v = a + 2.0 * b;
      if (v > R - 2.0 && v <= R) want += pmf(3.0, a) * pmf(2.0, b);
    }
  }
  CHECK(slab_prob_exact(t, R).value == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS((PoissonSpec{{0.5}, {1.0}}.validate()), InvalidArgument);
}

TEST_CASE("alpha_R") {
  PoissonSpec s{{1.0}, {1.0}};
  CHECK(alpha_R(s, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_R(s, 0.0), DomainError);
}

TEST_CASE("slab partition sums to one within the tail bound") {
  PoissonSpec s{{4.0, 10.0, 1.5}, {1.0, 0.7, 1.9}};
  const auto p = slab_partition(s, 1e-12);
  CHECK(std::abs(1.0 - p.total) <= p.tail_bound + 1e-12);
}

TEST_CASE("order statistics") {
  CHECK(qr_exact(2, 1, 2) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(qr_exact(3, 1, 3) == doctest::Approx(16.0 / 27.0).epsilon(1e-14));
  for (int r = 1; r <= 10; ++r) {
    for (int v = 1; v <= 12; ++v) CHECK(qr_exact(r, 1, v) == doctest::Approx(qr_closed_form_u1(r, v)).epsilon(1e-10));
  }
  CHECK(qr_exact(5, 5.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(qr_exact(61, 1, 1), UnsupportedDimension);
  CHECK_THROWS_AS(qr_exact(0, 1, 1), InvalidArgument);
  const auto mc = qr_mc(2, 1, 2, 200000, 7);
  CHECK(std::abs(mc.estimate - 0.75) < 5 * mc.stderr_);
}

TEST_CASE("discrete composition sum, both modes") {
  CHECK(gr_sum(2, 0, 2, GrMode::dp) == doctest::Approx(1.5));
  CHECK(gr_sum(2, 0, 2, GrMode::enumerate) == doctest::Approx(1.5));
  for (int r = 1; r <= 7; ++r) {
    for (int v = 1; v <= 6; ++v) {
      for (int u = 0; u <= r; ++u) {
        CHECK(gr_sum(r, u, v, GrMode::dp) == doctest::Approx(gr_sum(r, u, v, GrMode::enumerate)).epsilon(1e-12));
      }
    }
  }
  // Unconstrained (u >= r): multinomial identity sum 1/prod g_i! = v^r / r!.
  CHECK(gr_sum(6, 6, 4) == doctest::Approx(std::pow(4.0, 6) / 720.0));
}

TEST_CASE("upper tail sum is bounded by the full mass") {
  PoissonSpec s{{5.0}, {1.0}};
  const auto t = upper_tail_sum(s, {2.0}, 0.0);
  double want = 0.0;
  for (int r = 10; r < 100; ++r) want += pmf(5.0, r);
  CHECK(t.z_point == doctest::Approx(10.0));
  CHECK(t.value == doctest::Approx(want).epsilon(1e-9));
}
