#pragma once

// Closed-form and implicitly defined quantities attached to a table
// specification y = (y_1, ..., y_k): the rate function Q, the gaps ell_i,
// the exponent alpha, the clustering factor beta and the predicted
// densities of H/x, plus the lambda ladder over prime windows.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>
#include <span>

#include "multab/arith.hpp"

namespace multab {

/// Q(u) = u log u - u + 1. Throws DomainError for u <= 0.
double q_of(double u);

/// ell_i = log(3 log y_i / log y_{i-1}) with y_0 = 3.
/// Throws InvalidArgument unless 3 <= y_1 <= ... <= y_k.
std::vector<double> compute_ell(std::span<const double> y);

/// Smallest 1-based index attaining max ell.
std::size_t find_i1(std::span<const double> ell);

/// min{1, (1 + sum_{i<i1} ell_i)(1 + sum_{i>i1} ell_i) / ell_{i1}}, i1 1-based.
double compute_beta(std::span<const double> ell, std::size_t i1);

struct AlphaSolution {
  double alpha = 0.0;
  double residual = 0.0;  // |lhs - rhs| / rhs
};

/// Root of sum (k-i+2)^a log(k-i+2) ell_i = sum (k-i+1) ell_i.
/// Bisection on [0, 2] followed by a Newton polish.
AlphaSolution solve_alpha(std::size_t k, std::span<const double> ell);

/// alpha_i = log(i / log(i+1)) / log(i+1).
double alpha_seq(std::size_t i);

/// Smallest 1-based i minimizing |alpha - alpha_{k-i+1}|.
std::size_t find_i0(std::size_t k, double alpha);

/// min{1, (1 + sum_{i<i0} ell_i)(1 + sum_{i>i0} ell_i) / ell_{i0}}.
double altbeta(std::span<const double> ell, std::size_t i0);

struct AsymptoticProfile {
  std::size_t k = 0;
  std::vector<double> y;
  std::vector<double> ell;
  std::size_t i1 = 1;
  double beta = 1.0;
  double alpha = 0.0;
  double alpha_residual = 0.0;
  std::size_t i0 = 1;
  double predicted_density = 0.0;  // general variant
};

AsymptoticProfile profile(std::span<const double> y);

enum class DensityVariant { general, small_k, large_k, equal_size };

DensityVariant parse_density_variant(const std::string& s);
std::string to_string(DensityVariant v);

struct DensityOptions {
  double x = 0.0;        // 0 means "no x given"; the size condition is then skipped
  double epsilon = 0.0;  // slack in the alpha condition
  double delta = 0.1;    // log y_k <= (log y_1)^{1+delta}
  double c = 2.0;        // y_k <= y_1^c for the equal-size regime
};

struct DensityPrediction {
  double value = 0.0;
  bool hypotheses_hold = true;
  std::map<std::string, bool> flags;
};

/// Dimensionless prediction for H(x, y, 2y)/x. Hypotheses are reported in
/// flags and never throw.
DensityPrediction predicted_density(const AsymptoticProfile& p, DensityVariant v,
                                    const DensityOptions& opt = {});

/// 1 - log(((k+1) log(k+1) - 2 log 2)/(k-1)) / log(k+1). Requires k >= 2.
double e0_threshold(std::size_t k);

/// alpha >= epsilon + e0_threshold(k).
bool condition_e0(std::size_t k, double alpha, double epsilon);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool nonempty = false;
};

/// (alpha_1, e0_threshold(k)).
Interval e00_interval(std::size_t k);

/// alpha_k > e0_threshold(k).
bool e000_holds(std::size_t k);

/// 1 - log(((n+2) log(n+2) - log 4)/n) / log(n+2), n >= 1.
double threshold_term(std::size_t n);

/// rho_m = (m+1)^{1/m}.
double rho(std::size_t m);

struct LambdaLadder {
  std::size_t k = 0;
  std::size_t i = 0;                     // 1-based coordinate
  double lambda0 = 0.0;                  // max{k, y_{i-1}}, y_0 = 3
  std::vector<std::uint64_t> lambdas;    // lambda_{i,1..v}
  std::size_t v = 0;
  std::vector<double> reciprocal_sums;   // sum of 1/p over D_{i,j}
  std::vector<std::size_t> prime_counts; // |D_{i,j}|
  double log_rho = 0.0;
  double ell = 0.0;
  double predicted_v = 0.0;              // ell_i / log rho_{k-i+1}
  double fitted_l = 0.0;                 // smallest L with the two-sided rho^{j -+ L} bracket
  bool covers_window = true;             // union of D_{i,j} = primes in (lambda0, y_i]
};

/// Greedy ladder: lambda_{i,j} is the largest prime p <= y_i whose
/// reciprocal sum over (lambda_{i,j-1}, p] stays within log rho_{k-i+1}.
LambdaLadder build_lambda_ladder(std::size_t k, std::size_t i,
                                 std::span<const double> y, const PrimeSieve& sieve);

/// F(x, h) = ((x+1) log(x+1) - (x-h+1) log(x-h+1)) / h, 0 < h <= x.
double f_xh(double x, double h);

}  // namespace multab
