#pragma once

// Randomized property suites over the library: each checks one family of
// inequalities or identities against an independent oracle and reports the
// number of violations. Bands for the order-of-magnitude statements are
// empirical and frozen here.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "multab/arith.hpp"
#include "multab/harness.hpp"

namespace multab {

struct Band {
  double lo;
  double hi;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

inline constexpr Band kOrderStatBand{0.02, 50.0};
inline constexpr Band kCompositionBand{0.25, 10.0};
inline constexpr Band kSlabShapeBand{0.02, 50.0};
inline constexpr Band kTailSumBand{0.1, 500.0};
inline constexpr Band kAltbetaBand{1.0 / 50.0, 50.0};
inline constexpr double kLocalGlobalSpread = 4.0;
inline constexpr double kNormalizationSpread = 2.0;
inline constexpr double kInequalitySlack = 1e-9;

struct SuiteParams {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;   // 0: suite default
  std::uint64_t samples = 0;  // Monte Carlo draws, 0: suite default
  const PrimeSieve* sieve = nullptr;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  double worst = 0.0;   // largest error or extreme ratio, suite-specific
  Json details = Json::object();
};

using SuiteFn = std::function<SuiteResult(const SuiteParams&)>;

/// Name -> suite. Names: constants, alpha, conditions, monotonicity,
/// altbeta, ladder, volume_ie, volume_mc, l_bound, l_product, convolution,
/// holder, cylinder, qr_closed, qr_mc, order_band, composition_band,
/// slab_partition, alpha_r, slab_shape, tail_sum, counting.
const std::map<std::string, SuiteFn>& suite_registry();

SuiteResult run_suite(const std::string& name, const SuiteParams& p);

}  // namespace multab
