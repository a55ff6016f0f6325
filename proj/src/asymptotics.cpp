#include "multab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "multab/errors.hpp"

namespace multab {

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

void require_k2(std::size_t k) {
  if (k < 2) throw InvalidArgument("condition requires k >= 2, got " + std::to_string(k));
}

// Both sides of the alpha equation at a.
struct AlphaTerms {
  double lhs = 0.0;
  double dlhs = 0.0;
  double rhs = 0.0;
};

AlphaTerms alpha_terms(std::size_t k, std::span<const double> ell, double a) {
  AlphaTerms t;
  for (std::size_t j = 0; j < k; ++j) {
    const double m = static_cast<double>(k - j + 1);  // k - i + 2 with i = j + 1
    const double lm = std::log(m);
    const double term = std::exp(a * lm) * lm * ell[j];
    t.lhs += term;
    t.dlhs += term * lm;
    t.rhs += (m - 1.0) * ell[j];
  }
  return t;
}

}  // namespace

double q_of(double u) {
  if (!(u > 0.0)) throw DomainError("Q(u) requires u > 0");
  return u * std::log(u) - u + 1.0;
}

std::vector<double> compute_ell(std::span<const double> y) {
  if (y.empty()) throw InvalidArgument("y must be nonempty");
  std::vector<double> ell;
  double prev = kLog3;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 3.0) || (i > 0 && y[i] < y[i - 1])) {
      throw InvalidArgument("y must satisfy 3 <= y_1 <= ... <= y_k");
    }
    const double cur = std::log(y[i]);
    ell.push_back(std::log(3.0 * cur / prev));
    prev = cur;
  }
  return ell;
}

std::size_t find_i1(std::span<const double> ell) {
  if (ell.empty()) throw InvalidArgument("ell must be nonempty");
  return static_cast<std::size_t>(std::max_element(ell.begin(), ell.end()) - ell.begin()) + 1;
}

namespace {

double beta_at(std::span<const double> ell, std::size_t idx) {
  if (idx < 1 || idx > ell.size()) throw InvalidArgument("index out of range");
  double before = 1.0, after = 1.0;
  for (std::size_t j = 0; j + 1 < idx; ++j) before += ell[j];
  for (std::size_t j = idx; j < ell.size(); ++j) after += ell[j];
  return std::min(1.0, before * after / ell[idx - 1]);
}

}  // namespace

double compute_beta(std::span<const double> ell, std::size_t i1) { return beta_at(ell, i1); }

double altbeta(std::span<const double> ell, std::size_t i0) { return beta_at(ell, i0); }

AlphaSolution solve_alpha(std::size_t k, std::span<const double> ell) {
  if (k == 0 || ell.size() != k) throw InvalidArgument("ell must have k entries");
  for (double e : ell) {
    if (!(e > 0.0)) throw InvalidArgument("ell_i must be positive");
  }
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto t = alpha_terms(k, ell, mid);
    (t.lhs < t.rhs ? lo : hi) = mid;
  }
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const auto t = alpha_terms(k, ell, a);
    if (t.dlhs <= 0.0) break;
    const double next = a - (t.lhs - t.rhs) / t.dlhs;
    if (!(next >= lo && next <= hi)) break;
    a = next;
  }
  const auto t = alpha_terms(k, ell, a);
  return {a, std::abs(t.lhs - t.rhs) / t.rhs};
}

double alpha_seq(std::size_t i) {
  if (i == 0) throw InvalidArgument("alpha_i requires i >= 1");
  const double l = std::log(static_cast<double>(i) + 1.0);
  return std::log(static_cast<double>(i) / l) / l;
}

std::size_t find_i0(std::size_t k, double alpha) {
  if (k == 0) throw InvalidArgument("k must be positive");
  std::size_t best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= k; ++i) {
    const double gap = std::abs(alpha - alpha_seq(k - i + 1));
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

AsymptoticProfile profile(std::span<const double> y) {
  AsymptoticProfile p;
  p.k = y.size();
  p.y.assign(y.begin(), y.end());
  p.ell = compute_ell(y);
  p.i1 = find_i1(p.ell);
  p.beta = compute_beta(p.ell, p.i1);
  const auto sol = solve_alpha(p.k, p.ell);
  p.alpha = sol.alpha;
  p.alpha_residual = sol.residual;
  p.i0 = find_i0(p.k, p.alpha);
  p.predicted_density = predicted_density(p, DensityVariant::general).value;
  return p;
}

DensityVariant parse_density_variant(const std::string& s) {
  if (s == "general") return DensityVariant::general;
  if (s == "small_k") return DensityVariant::small_k;
  if (s == "large_k") return DensityVariant::large_k;
  if (s == "equal_size") return DensityVariant::equal_size;
  throw InvalidArgument("unknown density variant '" + s + "'");
}

std::string to_string(DensityVariant v) {
  switch (v) {
    case DensityVariant::general: return "general";
    case DensityVariant::small_k: return "small_k";
    case DensityVariant::large_k: return "large_k";
    case DensityVariant::equal_size: return "equal_size";
  }
  return "?";
}

DensityPrediction predicted_density(const AsymptoticProfile& p, DensityVariant v,
                                    const DensityOptions& opt) {
  DensityPrediction out;
  const std::size_t k = p.k;
  const double ly1 = std::log(p.y.front());
  const double lyk = std::log(p.y.back());

  // prod (log y_i / log y_{i-1})^{-Q((k-i+2)^alpha)}, y_0 = 3.
  double prod = 1.0;
  double prev = kLog3;
  for (std::size_t j = 0; j < k; ++j) {
    const double cur = std::log(p.y[j]);
    const double m = static_cast<double>(k - j + 1);
    prod *= std::pow(cur / prev, -q_of(std::pow(m, p.alpha)));
    prev = cur;
  }

  double ysz = 1.0;
  for (double yi : p.y) ysz *= 2.0 * yi;
  const bool have_x = opt.x > 0.0;
  const bool size_ok = !have_x || ysz <= opt.x / p.y.back();
  out.flags["x_given"] = have_x;
  out.flags["size_condition"] = size_ok;

  switch (v) {
    case DensityVariant::general:
    case DensityVariant::small_k: {
      out.value = p.beta / std::sqrt(std::log(lyk)) * prod;
      if (v == DensityVariant::general) {
        const bool kok = k >= 2;
        const bool e0 = kok && condition_e0(k, p.alpha, opt.epsilon);
        out.flags["k_ge_2"] = kok;
        out.flags["e0"] = e0;
        out.hypotheses_hold = kok && size_ok && e0;
      } else {
        const bool kok = k >= 2 && k <= 5;
        out.flags["k_in_2_5"] = kok;
        out.hypotheses_hold = kok && size_ok;
      }
      break;
    }
    case DensityVariant::large_k: {
      out.value = std::log(3.0 * lyk / ly1) / std::pow(std::log(ly1), 1.5) * prod;
      const bool kok = k >= 6;
      const bool close = lyk <= std::pow(ly1, 1.0 + opt.delta);
      out.flags["k_ge_6"] = kok;
      out.flags["log_yk_close"] = close;
      out.hypotheses_hold = kok && close && size_ok;
      break;
    }
    case DensityVariant::equal_size: {
      const double kk = static_cast<double>(k);
      out.value = std::pow(ly1, -q_of(kk / std::log(kk + 1.0))) *
                  std::pow(std::log(ly1), -1.5);
      const bool range = lyk <= opt.c * ly1;
      const bool size = !have_x || 2.0 * ysz <= opt.x / std::pow(p.y.front(), opt.delta);
      out.flags["yk_le_y1_pow_c"] = range;
      out.flags["size_condition"] = size;
      out.hypotheses_hold = range && size;
      break;
    }
  }
  if (!std::isfinite(out.value)) {
    out.value = 0.0;
    out.flags["finite"] = false;
    out.hypotheses_hold = false;
  }
  return out;
}

double e0_threshold(std::size_t k) {
  require_k2(k);
  const double kp = static_cast<double>(k) + 1.0;
  const double lk = std::log(kp);
  return 1.0 - std::log((kp * lk - 2.0 * kLog2) / (kp - 2.0)) / lk;
}

bool condition_e0(std::size_t k, double alpha, double epsilon) {
  return alpha >= epsilon + e0_threshold(k);
}

Interval e00_interval(std::size_t k) {
  Interval r;
  r.lo = alpha_seq(1);
  r.hi = e0_threshold(k);
  r.nonempty = r.lo < r.hi;
  return r;
}

bool e000_holds(std::size_t k) { return alpha_seq(k) > e0_threshold(k); }

double threshold_term(std::size_t n) {
  if (n == 0) throw InvalidArgument("n must be positive");
  const double m = static_cast<double>(n) + 2.0;
  const double lm = std::log(m);
  return 1.0 - std::log((m * lm - std::log(4.0)) / static_cast<double>(n)) / lm;
}

double rho(std::size_t m) {
  if (m == 0) throw InvalidArgument("rho_m requires m >= 1");
  const double mm = static_cast<double>(m);
  return std::pow(mm + 1.0, 1.0 / mm);
}

LambdaLadder build_lambda_ladder(std::size_t k, std::size_t i, std::span<const double> y,
                                 const PrimeSieve& sieve) {
  if (i < 1 || i > k || y.size() != k) {
    throw InvalidArgument("ladder needs 1 <= i <= k and k entries in y");
  }
  const auto ell = compute_ell(y);
  LambdaLadder L;
  L.k = k;
  L.i = i;
  const double yprev = i == 1 ? 3.0 : y[i - 2];
  L.lambda0 = std::max(static_cast<double>(k), yprev);
  L.log_rho = std::log(rho(k - i + 1));
  L.ell = ell[i - 1];
  L.predicted_v = L.ell / L.log_rho;

  const auto primes = sieve.primes_in(L.lambda0, y[i - 1]);
  std::size_t pos = 0;
  while (pos < primes.size()) {
    double s = 0.0;
    std::size_t end = pos;
    while (end < primes.size() && s + 1.0 / primes[end] <= L.log_rho) {
      s += 1.0 / primes[end];
      ++end;
    }
    if (end == pos) {
      // A single prime already exceeds log rho; the ladder stalls.
      L.covers_window = false;
      break;
    }
    L.lambdas.push_back(primes[end - 1]);
    L.reciprocal_sums.push_back(s);
    L.prime_counts.push_back(end - pos);
    pos = end;
  }
  L.v = L.lambdas.size();

  const double lyp = std::log(yprev);
  for (std::size_t j = 1; j <= L.v; ++j) {
    const double x =
        std::log(std::log(static_cast<double>(L.lambdas[j - 1])) / lyp) / L.log_rho;
    L.fitted_l = std::max(L.fitted_l, std::abs(x - static_cast<double>(j)));
  }
  return L;
}

double f_xh(double x, double h) {
  if (!(h > 0.0) || !(h <= x)) throw DomainError("F(x, h) requires 0 < h <= x");
  const double a = x + 1.0;
  const double b = x - h + 1.0;
  return (a * std::log(a) - b * std::log(b)) / h;
}

}  // namespace multab
