#pragma once

// Product Poisson law on (N u {0})^k and its linear slabs
// R - Lambda < sum lambda_i r_i <= R; uniform order statistics cut by
// staircase constraints and their discrete analogue.

#include <cstdint>
#include <vector>

namespace multab {

struct PoissonSpec {
  std::vector<double> z;       // means, each >= 1
  std::vector<double> lambda;  // weights, each > 0

  std::size_t k() const noexcept { return z.size(); }
  double big_lambda() const;
  double mean() const;  // sum lambda_i z_i
  /// Throws InvalidArgument on size mismatch, z_i < 1 or lambda_i <= 0.
  void validate() const;
};

/// Root of sum lambda_i e^{a lambda_i} z_i = R. Throws DomainError for R <= 0.
double alpha_R(const PoissonSpec& spec, double R);

struct ProbEstimate {
  double value = 0.0;
  double log_value = 0.0;     // log of value, finite even when value underflows
  double error_bound = 0.0;   // rigorous for exact modes, standard error for MC
  bool hypothesis_ok = true;  // R >= Lambda
  std::uint64_t terms = 0;
};

/// P(R - Lambda < sum lambda_i r_i <= R), summed over all lattice points of
/// the slab (the slab is finite, so nothing is truncated).
ProbEstimate slab_prob_exact(const PoissonSpec& spec, double R);

/// P(sum lambda_i r_i <= R).
ProbEstimate lower_region_prob(const PoissonSpec& spec, double R);

/// Chernoff bound on P(sum lambda_i r_i > T), 1 when T is below the mean.
double upper_tail_bound(const PoissonSpec& spec, double T);

/// Monte Carlo slab estimate from n product-Poisson draws.
ProbEstimate slab_prob_mc(const PoissonSpec& spec, double R, std::uint64_t n,
                          std::uint64_t seed = 0);

struct SlabPartition {
  double origin = 0.0;               // P(r = 0)
  std::vector<double> slabs;         // P(H(j Lambda)), j = 1..J
  double tail_bound = 0.0;           // bound on P(sum > J Lambda)
  double total = 0.0;                // origin + sum of slabs
};

/// Consecutive slabs (0, Lambda], (Lambda, 2 Lambda], ... up to the first J
/// whose Chernoff tail is below tail_target (or max_slabs).
SlabPartition slab_partition(const PoissonSpec& spec, double tail_target = 1e-12,
                             std::size_t max_slabs = 1u << 16);

/// e^{-sum Q(e^{alpha(R) lambda_i}) z_i} / sqrt(R), the bound shape with c = 0.
double slab_bound_shape(const PoissonSpec& spec, double R);
/// Its logarithm, finite where the shape itself underflows.
double slab_bound_log_shape(const PoissonSpec& spec, double R);

struct TailSum {
  double value = 0.0;
  double z_point = 0.0;      // Z = sum mu_i z_i
  double error_bound = 0.0;  // weighted mass outside the enumerated box
};

/// sum over r with sum lambda_i r_i >= Z of (1 + sum lambda_i r_i - Z)^C pmf(r),
/// Z = sum mu_i z_i.
TailSum upper_tail_sum(const PoissonSpec& spec, const std::vector<double>& mu,
                       double C);

inline constexpr int kMaxOrderStatR = 60;

/// r! vol{0 <= xi_1 <= ... <= xi_r <= 1 : xi_i >= (i - u)/v}.
/// Throws UnsupportedDimension for r > 60, InvalidArgument for r < 1,
/// u < 0 or v <= 0.
double qr_exact(int r, double u, double v);

/// ((1 + v - r)/v)(1 + 1/v)^{r-1}, the u = 1 closed form (clipped at 0).
double qr_closed_form_u1(int r, double v);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

McEstimate qr_mc(int r, double u, double v, std::uint64_t n, std::uint64_t seed = 0);

enum class GrMode { enumerate, dp };

/// sum over g in G_r(u, v) of 1/(g_1! ... g_v!), where G_r(u, v) holds the
/// compositions g_1 + ... + g_v = r with g_1 + ... + g_i <= i + u.
/// Enumeration throws ResourceLimit beyond 10^7 compositions.
double gr_sum(int r, double u, int v, GrMode mode = GrMode::dp);

}  // namespace multab
