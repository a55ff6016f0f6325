#include "multab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "multab/asymptotics.hpp"
#include "multab/errors.hpp"

namespace multab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Streaming log-sum-exp.
struct LogSum {
  double m = kNegInf;
  double s = 0.0;
  void add(double lx) {
    if (lx == kNegInf) return;
    if (lx <= m) {
      s += std::exp(lx - m);
    } else {
      s = s * std::exp(m - lx) + 1.0;
      m = lx;
    }
  }
  double log() const { return s > 0.0 ? m + std::log(s) : kNegInf; }
  double value() const { return s > 0.0 ? std::exp(log()) : 0.0; }
};

// Cached log pmf per axis.
class LogPmf {
 public:
  explicit LogPmf(double z) : z_(z), lz_(std::log(z)) {}
  double operator()(std::int64_t r) {
    while (static_cast<std::int64_t>(cache_.size()) <= r) {
      const auto n = static_cast<double>(cache_.size());
      cache_.push_back(-z_ + n * lz_ - std::lgamma(n + 1.0));
    }
    return cache_[static_cast<std::size_t>(r)];
  }

 private:
  double z_, lz_;
  std::vector<double> cache_;
};

// Visits every r with low < s(r) <= high (low inclusive when low_inclusive),
// where s(r) = sum lambda_i r_i. The last axis is solved directly.
template <class Fn>
std::uint64_t enumerate_region(const PoissonSpec& spec, std::vector<LogPmf>& pmf,
                               double low, bool low_inclusive, double high, Fn&& fn) {
  const std::size_t k = spec.k();
  std::uint64_t terms = 0;
  auto above_low = [&](double s) { return low_inclusive ? s >= low : s > low; };
  auto rec = [&](auto&& self, std::size_t i, double s, double lp) -> void {
    const double lam = spec.lambda[i];
    if (i + 1 == k) {
      std::int64_t rmax = static_cast<std::int64_t>(std::floor((high - s) / lam));
      while (s + lam * static_cast<double>(rmax + 1) <= high) ++rmax;
      while (rmax >= 0 && s + lam * static_cast<double>(rmax) > high) --rmax;
      if (rmax < 0) return;
      std::int64_t rmin = 0;
      if (low != kNegInf) {
        rmin = std::max<std::int64_t>(
            0, static_cast<std::int64_t>(std::floor((low - s) / lam)) - 1);
        while (rmin <= rmax && !above_low(s + lam * static_cast<double>(rmin))) ++rmin;
      }
      for (std::int64_t r = rmin; r <= rmax; ++r) {
        fn(s + lam * static_cast<double>(r), lp + pmf[i](r));
        ++terms;
      }
      return;
    }
    for (std::int64_t r = 0; s + lam * static_cast<double>(r) <= high; ++r) {
      self(self, i + 1, s + lam * static_cast<double>(r), lp + pmf[i](r));
    }
  };
  rec(rec, 0, 0.0, 0.0);
  return terms;
}

std::vector<LogPmf> make_pmfs(const PoissonSpec& spec) {
  std::vector<LogPmf> out;
  for (double z : spec.z) out.emplace_back(z);
  return out;
}

double rounding_bound(const LogSum& acc, std::uint64_t terms) {
  return acc.value() * (static_cast<double>(terms) + 8.0) * 4.0 * kEps;
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

double PoissonSpec::big_lambda() const {
  return lambda.empty() ? 0.0 : *std::max_element(lambda.begin(), lambda.end());
}

double PoissonSpec::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) m += lambda[i] * z[i];
  return m;
}

void PoissonSpec::validate() const {
  if (z.empty() || z.size() != lambda.size()) {
    throw InvalidArgument("z and lambda must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 1.0)) throw InvalidArgument("Poisson means must be >= 1");
    if (!(lambda[i] > 0.0)) throw InvalidArgument("weights lambda_i must be positive");
  }
}

double alpha_R(const PoissonSpec& spec, double R) {
  spec.validate();
  if (!(R > 0.0)) throw DomainError("alpha(R) requires R > 0");
  auto f = [&](double a) {
    double v = 0.0, d = 0.0;
    for (std::size_t i = 0; i < spec.k(); ++i) {
      const double t = spec.lambda[i] * std::exp(a * spec.lambda[i]) * spec.z[i];
      v += t;
      d += t * spec.lambda[i];
    }
    return std::pair{v - R, d};
  };
  double lo = -1.0, hi = 1.0;
  while (f(lo).first > 0.0) lo *= 2.0;
  while (f(hi).first < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid).first < 0.0 ? lo : hi) = mid;
  }
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const auto [v, d] = f(a);
    if (d <= 0.0) break;
    const double next = a - v / d;
    if (!(next >= lo && next <= hi)) break;
    a = next;
  }
  return a;
}

ProbEstimate slab_prob_exact(const PoissonSpec& spec, double R) {
  spec.validate();
  const double L = spec.big_lambda();
  ProbEstimate out;
  out.hypothesis_ok = R >= L;
  auto pmf = make_pmfs(spec);
  LogSum acc;
  out.terms = enumerate_region(spec, pmf, R - L, false, R,
                               [&](double, double lp) { acc.add(lp); });
  out.log_value = acc.log();
  out.value = acc.value();
  out.error_bound = rounding_bound(acc, out.terms);
  return out;
}

ProbEstimate lower_region_prob(const PoissonSpec& spec, double R) {
  spec.validate();
  ProbEstimate out;
  auto pmf = make_pmfs(spec);
  LogSum acc;
  out.terms = enumerate_region(spec, pmf, kNegInf, false, R,
                               [&](double, double lp) { acc.add(lp); });
  out.log_value = acc.log();
  out.value = acc.value();
  out.error_bound = rounding_bound(acc, out.terms);
  return out;
}

double upper_tail_bound(const PoissonSpec& spec, double T) {
  spec.validate();
  if (T <= spec.mean()) return 1.0;
  const double a = alpha_R(spec, T);
  double e = 0.0;
  for (std::size_t i = 0; i < spec.k(); ++i) {
    e += q_of(std::exp(a * spec.lambda[i])) * spec.z[i];
  }
  return std::exp(-e);
}

ProbEstimate slab_prob_mc(const PoissonSpec& spec, double R, std::uint64_t n,
                          std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw InvalidArgument("sample count must be positive");
  const double L = spec.big_lambda();
  std::mt19937_64 rng(seed);
  std::vector<std::poisson_distribution<long long>> dists;
  for (double z : spec.z) dists.emplace_back(z);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < n; ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < spec.k(); ++i) {
      s += spec.lambda[i] * static_cast<double>(dists[i](rng));
    }
    if (s > R - L && s <= R) ++hits;
  }
  ProbEstimate out;
  out.hypothesis_ok = R >= L;
  out.terms = n;
  out.value = static_cast<double>(hits) / static_cast<double>(n);
  out.log_value = out.value > 0 ? std::log(out.value) : kNegInf;
  out.error_bound = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(n));
  return out;
}

SlabPartition slab_partition(const PoissonSpec& spec, double tail_target,
                             std::size_t max_slabs) {
  spec.validate();
  const double L = spec.big_lambda();
  std::size_t J = 1;
  while (J < max_slabs && upper_tail_bound(spec, static_cast<double>(J) * L) > tail_target) {
    ++J;
  }
  SlabPartition out;
  out.tail_bound = upper_tail_bound(spec, static_cast<double>(J) * L);
  std::vector<LogSum> acc(J + 1);
  auto pmf = make_pmfs(spec);
  enumerate_region(spec, pmf, kNegInf, false, static_cast<double>(J) * L,
                   [&](double s, double lp) {
                     std::size_t j = 0;
                     if (s > 0.0) {
                       j = static_cast<std::size_t>(std::ceil(s / L));
                       // Keep the bucket consistent with (jL - L, jL].
                       while (j > 1 && s <= static_cast<double>(j - 1) * L) --j;
                       while (s > static_cast<double>(j) * L) ++j;
                     }
                     acc[std::min(j, J)].add(lp);
                   });
  out.origin = acc[0].value();
  out.total = out.origin;
  for (std::size_t j = 1; j <= J; ++j) {
    out.slabs.push_back(acc[j].value());
    out.total += out.slabs.back();
  }
  return out;
}

double slab_bound_log_shape(const PoissonSpec& spec, double R) {
  const double a = alpha_R(spec, R);
  double e = 0.0;
  for (std::size_t i = 0; i < spec.k(); ++i) {
    e += q_of(std::exp(a * spec.lambda[i])) * spec.z[i];
  }
  return -e - 0.5 * std::log(R);
}

double slab_bound_shape(const PoissonSpec& spec, double R) {
  return std::exp(slab_bound_log_shape(spec, R));
}

TailSum upper_tail_sum(const PoissonSpec& spec, const std::vector<double>& mu, double C) {
  spec.validate();
  if (mu.size() != spec.k()) throw InvalidArgument("mu must have k entries");
  if (C < 0.0) throw InvalidArgument("C must be nonnegative");
  TailSum out;
  for (std::size_t i = 0; i < spec.k(); ++i) out.z_point += mu[i] * spec.z[i];
  const double Z = out.z_point;

  double var = 0.0;
  for (std::size_t i = 0; i < spec.k(); ++i) var += spec.lambda[i] * spec.lambda[i] * spec.z[i];
  const double T = std::max(Z, spec.mean()) + 60.0 * std::sqrt(var) + 60.0 * spec.big_lambda();

  auto pmf = make_pmfs(spec);
  LogSum acc;
  enumerate_region(spec, pmf, Z, true, T, [&](double s, double lp) {
    acc.add(lp + C * std::log1p(s - Z));
  });
  out.value = acc.value();

  // Beyond T: (1+s-Z)^C <= (C/(e th))^C e^{th(1+s-Z)} and
  // 1{s > T} <= e^{(a-th)(s-T)} with a = alpha(T).
  const double a = alpha_R(spec, T);
  const double th = std::min(0.5 * a, 1.0 / (1.0 + T - Z));
  double lg = th * (1.0 - Z) - (a - th) * T;
  if (C > 0.0) lg += C * std::log(C / (std::exp(1.0) * th));
  for (std::size_t i = 0; i < spec.k(); ++i) {
    lg += spec.z[i] * (std::exp(a * spec.lambda[i]) - 1.0);
  }
  out.error_bound = std::exp(lg);
  return out;
}

double qr_exact(int r, double u, double v) {
  if (r < 1) throw InvalidArgument("Q_r requires r >= 1");
  if (r > kMaxOrderStatR) {
    throw UnsupportedDimension("Q_r supports r <= " + std::to_string(kMaxOrderStatR));
  }
  if (!(u >= 0.0) || !(v > 0.0)) throw InvalidArgument("Q_r requires u >= 0 and v > 0");
  if (u >= r) return 1.0;
  auto b = [&](int j) { return std::max((j - u) / v, 0.0); };
  if (b(r) >= 1.0) return 0.0;

  // P_j as a polynomial in (t - c) with c = b(j). The antiderivative is
  // shifted to the next lower limit and its constant term dropped, since
  // P_j(b(j)) = 0. Every coefficient stays nonnegative.
  std::vector<double> a{1.0};
  double c = 0.0;
  for (int j = 1; j <= r; ++j) {
    std::vector<double> q(a.size() + 1, 0.0);
    for (std::size_t m = 0; m < a.size(); ++m) q[m + 1] = a[m] / static_cast<double>(m + 1);
    const double cj = b(j);
    const double d = cj - c;
    if (d > 0.0) {
      const std::size_t n = q.size() - 1;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = n - 1; t + 1 > i; --t) q[t] += d * q[t + 1];
      }
    }
    q[0] = 0.0;
    a = std::move(q);
    c = cj;
  }
  double val = 0.0;
  const double x = 1.0 - c;
  for (std::size_t m = a.size(); m-- > 0;) val = val * x + a[m];
  val *= std::exp(log_factorial(r));
  return std::clamp(val, 0.0, 1.0);
}

double qr_closed_form_u1(int r, double v) {
  if (r < 1 || !(v > 0.0)) throw InvalidArgument("closed form requires r >= 1, v > 0");
  const double lead = (1.0 + v - r) / v;
  if (lead <= 0.0) return 0.0;
  return lead * std::pow(1.0 + 1.0 / v, r - 1);
}

McEstimate qr_mc(int r, double u, double v, std::uint64_t n, std::uint64_t seed) {
  if (r < 1 || !(u >= 0.0) || !(v > 0.0)) throw InvalidArgument("bad Q_r parameters");
  if (n == 0) throw InvalidArgument("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> xi(static_cast<std::size_t>(r));
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < n; ++t) {
    for (auto& x : xi) x = unif(rng);
    std::sort(xi.begin(), xi.end());
    bool ok = true;
    for (int i = 1; i <= r && ok; ++i) ok = xi[static_cast<std::size_t>(i - 1)] >= (i - u) / v;
    if (ok) ++hits;
  }
  McEstimate out;
  out.estimate = static_cast<double>(hits) / static_cast<double>(n);
  out.stderr_ = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(n));
  return out;
}

double gr_sum(int r, double u, int v, GrMode mode) {
  if (r < 0 || v < 1 || !(u >= 0.0)) {
    throw InvalidArgument("G_r(u, v) requires r >= 0, v >= 1, u >= 0");
  }
  auto cap = [&](int i) { return static_cast<int>(std::floor(i + u)); };
  std::vector<double> inv_fact(static_cast<std::size_t>(r) + 1);
  for (int g = 0; g <= r; ++g) inv_fact[static_cast<std::size_t>(g)] = std::exp(-log_factorial(g));

  if (mode == GrMode::dp) {
    std::vector<double> dp(static_cast<std::size_t>(r) + 1, 0.0);
    dp[0] = 1.0;
    for (int i = 1; i <= v; ++i) {
      const int lim = std::min(r, cap(i));
      std::vector<double> next(dp.size(), 0.0);
      for (int s = 0; s <= lim; ++s) {
        double acc = 0.0;
        for (int g = 0; g <= s; ++g) {
          acc += dp[static_cast<std::size_t>(s - g)] * inv_fact[static_cast<std::size_t>(g)];
        }
        next[static_cast<std::size_t>(s)] = acc;
      }
      dp = std::move(next);
    }
    return dp[static_cast<std::size_t>(r)];
  }

  const double compositions =
      std::exp(std::lgamma(r + v) - std::lgamma(r + 1.0) - std::lgamma(static_cast<double>(v)));
  if (compositions > 1e7) {
    throw ResourceLimit("G_r enumeration needs " + std::to_string(compositions) +
                            " compositions",
                        static_cast<std::uint64_t>(compositions));
  }
  double total = 0.0;
  auto rec = [&](auto&& self, int i, int s, double w) -> void {
    if (i == v) {
      if (s == r) total += w;
      return;
    }
    const int lim = std::min(r, cap(i + 1));
    for (int g = 0; s + g <= lim; ++g) {
      self(self, i + 1, s + g, w * inv_fact[static_cast<std::size_t>(g)]);
    }
  };
  rec(rec, 0, 0, 1.0);
  return total;
}

}  // namespace multab
