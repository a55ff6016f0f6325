#include "multab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <bit>
#include <random>
#include <set>
#include <unordered_set>

#include "multab/asymptotics.hpp"
#include "multab/counting.hpp"
#include "multab/divisor_geometry.hpp"
#include "multab/errors.hpp"
#include "multab/poisson.hpp"

namespace multab {

namespace {

using Rng = std::mt19937_64;

const double kLog2 = std::log(2.0);

std::uint64_t pick(const SuiteParams& p, std::uint64_t fallback) {
  return p.trials ? p.trials : fallback;
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform_real(rng, std::log(lo), std::log(hi)));
}

std::vector<std::uint64_t> primes_upto(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 2; m <= n; ++m) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= m; ++d) {
      if (m % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(m);
  }
  return out;
}

// Chain count for a jointly squarefree assignment: a prime of a_j may sit
// in none of the d's or in exactly one d_i with i >= j.
double squarefree_tau(const std::vector<std::vector<std::uint64_t>>& coords) {
  const std::size_t k = coords.size();
  double t = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    t *= std::pow(static_cast<double>(k - j + 1), static_cast<double>(coords[j].size()));
  }
  return t;
}

FactoredTuple tuple_from(const std::vector<std::vector<std::uint64_t>>& coords) {
  std::vector<Factorization> parts;
  for (const auto& ps : coords) parts.push_back(Factorization::from_primes(ps));
  return FactoredTuple(std::move(parts));
}

// Random jointly squarefree tuple with disjoint prime supports drawn from
// primes, tau <= tau_max and product below 2^62.
std::vector<std::vector<std::uint64_t>> random_coords(Rng& rng, std::size_t k,
                                                      const std::vector<std::uint64_t>& primes,
                                                      double tau_max, int max_primes) {
  while (true) {
    std::vector<std::uint64_t> ps = primes;
    std::shuffle(ps.begin(), ps.end(), rng);
    const int m = uniform_int(rng, 0, std::min<int>(max_primes, static_cast<int>(ps.size())));
    std::vector<std::vector<std::uint64_t>> coords(k);
    unsigned __int128 prod = 1;
    for (int j = 0; j < m; ++j) {
      coords[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(k) - 1))].push_back(ps[static_cast<std::size_t>(j)]);
      prod *= ps[static_cast<std::size_t>(j)];
    }
    if (prod >= (static_cast<unsigned __int128>(1) << 62)) continue;
    if (squarefree_tau(coords) <= tau_max) return coords;
  }
}

// Random element of P_*^k(t) for random integer windows 1 = t_0 < ... < t_k = pmax.
SquarefreeTuple random_windowed(Rng& rng, std::size_t k, std::uint64_t pmax, double tau_max) {
  const auto primes = primes_upto(pmax);
  while (true) {
    std::vector<double> w{1.0};
    std::set<int> cuts;
    while (cuts.size() + 1 < k) cuts.insert(uniform_int(rng, 2, static_cast<int>(pmax) - 1));
    for (int c : cuts) w.push_back(c);
    w.push_back(static_cast<double>(pmax));
    const double q = uniform_real(rng, 0.05, 0.5);
    std::vector<std::vector<std::uint64_t>> coords(k);
    for (auto p : primes) {
      if (uniform_real(rng, 0.0, 1.0) >= q) continue;
      std::size_t i = 0;
      while (!(static_cast<double>(p) > w[i] && static_cast<double>(p) <= w[i + 1])) ++i;
      coords[i].push_back(p);
    }
    unsigned __int128 prod = 1;
    for (const auto& c : coords) {
      for (auto p : c) prod *= p;
    }
    if (prod >= (static_cast<unsigned __int128>(1) << 62)) continue;
    if (squarefree_tau(coords) > tau_max) continue;
    return SquarefreeTuple::from_primes(coords, w);
  }
}

// Chains of a jointly squarefree tuple by slot assignment of primes.
std::vector<std::vector<std::uint64_t>> oracle_chains(
    const std::vector<std::vector<std::uint64_t>>& coords) {
  const std::size_t k = coords.size();
  std::vector<std::pair<std::uint64_t, std::size_t>> items;
  for (std::size_t j = 0; j < k; ++j) {
    for (auto p : coords[j]) items.push_back({p, j});
  }
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> d(k, 1);
  auto rec = [&](auto&& self, std::size_t idx) -> void {
    if (idx == items.size()) {
      out.push_back(d);
      return;
    }
    self(self, idx + 1);
    const auto [p, j] = items[idx];
    for (std::size_t i = j; i < k; ++i) {
      d[i] *= p;
      self(self, idx + 1);
      d[i] /= p;
    }
  };
  rec(rec, 0);
  return out;
}

long double ld_coord(const LogCoordinate& c) {
  return std::log(static_cast<long double>(c.d)) - (c.halved ? std::log(2.0L) : 0.0L);
}

// Inclusion-exclusion over all nonempty subsets, in long double.
long double oracle_union_volume(const BoxUnion& u) {
  const std::size_t n = u.boxes.size();
  long double total = 0.0L;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    long double vol = 1.0L;
    for (std::size_t a = 0; a < u.k && vol > 0.0L; ++a) {
      long double lo = -1e300L, hi = 1e300L;
      for (std::size_t b = 0; b < n; ++b) {
        if (!(mask >> b & 1)) continue;
        lo = std::max(lo, ld_coord(u.boxes[b].lo[a]));
        hi = std::min(hi, ld_coord(u.boxes[b].hi[a]));
      }
      vol *= std::max(0.0L, hi - lo);
    }
    total += (std::popcount(mask) % 2 == 1) ? vol : -vol;
  }
  return total;
}

SuiteResult finish(SuiteResult r) {
  r.passed = r.violations == 0 && r.checks > 0;
  return r;
}

bool le_slack(double lhs, double rhs) { return lhs <= rhs * (1.0 + kInequalitySlack) + kInequalitySlack; }

// ---------------------------------------------------------------- asymptotics

SuiteResult suite_constants(const SuiteParams&) {
  SuiteResult r{.name = "constants"};
  const double a1 = alpha_seq(1);
  const double q1 = q_of(1.0);
  const double qe = q_of(std::exp(1.0));
  r.checks = 3;
  if (std::abs(a1 - 0.528766373) > 1e-8) ++r.violations;
  if (q1 != 0.0) ++r.violations;
  if (std::abs(qe - 1.0) > 1e-12) ++r.violations;
  r.details = {{"alpha_1", a1}, {"Q_1", q1}, {"Q_e", qe},
               {"Q_inv_log2", q_of(1.0 / kLog2)}};
  r.worst = std::abs(a1 - 0.528766373);
  return finish(r);
}

SuiteResult suite_alpha(const SuiteParams& p) {
  SuiteResult r{.name = "alpha"};
  Rng rng(p.seed);
  const auto n = pick(p, 10000);
  double worst_res = 0.0, worst_scale = 0.0;
  std::uint64_t out_of_range = 0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 8));
    std::vector<double> ell(k);
    for (auto& e : ell) e = log_uniform(rng, 1e-2, 1e2);
    const auto sol = solve_alpha(k, ell);
    ++r.checks;
    worst_res = std::max(worst_res, sol.residual);
    const bool in_range =
        sol.alpha >= alpha_seq(1) - 1e-12 && sol.alpha <= alpha_seq(k) + 1e-12;
    if (!in_range) ++out_of_range;
    if (sol.residual >= 1e-10 || !in_range) ++r.violations;
    std::vector<double> scaled = ell;
    const double c = log_uniform(rng, 0.1, 10.0);
    for (auto& e : scaled) e *= c;
    worst_scale = std::max(worst_scale, std::abs(solve_alpha(k, scaled).alpha - sol.alpha));
  }
  r.worst = worst_res;
  r.details = {{"max_residual", worst_res}, {"out_of_range", out_of_range},
               {"max_scaling_drift", worst_scale}};
  return finish(r);
}

SuiteResult suite_conditions(const SuiteParams&) {
  SuiteResult r{.name = "conditions"};
  Json e00 = Json::array();
  for (std::size_t k = 2; k <= 30; ++k) {
    const double kk = static_cast<double>(k);
    const bool direct = (kk + 1.0) * std::log(kk + 1.0) > kk * std::log(4.0);
    r.checks += 2;
    if (!e000_holds(k)) ++r.violations;
    if (direct != e000_holds(k)) ++r.violations;
  }
  for (std::size_t k = 2; k <= 12; ++k) {
    const auto iv = e00_interval(k);
    ++r.checks;
    if (iv.nonempty != (k >= 6)) ++r.violations;
    e00.push_back({{"k", k}, {"lo", iv.lo}, {"hi", iv.hi}, {"nonempty", iv.nonempty}});
  }
  r.details = {{"e00", e00}};
  return finish(r);
}

SuiteResult suite_monotonicity(const SuiteParams&) {
  SuiteResult r{.name = "monotonicity"};
  std::uint64_t seq_bad = 0, l82_bad = 0, f_bad = 0;
  for (std::size_t i = 1; i < 100; ++i) {
    r.checks += 2;
    if (!(alpha_seq(i) < alpha_seq(i + 1))) ++seq_bad;
    if (!(threshold_term(i) < threshold_term(i + 1))) ++l82_bad;
  }
  // 50 grid points (x, h) with 0 < h <= x - 1.
  std::uint64_t points = 0;
  for (int xi = 0; xi < 10; ++xi) {
    const double x = 2.0 + 3.7 * xi;
    for (int hj = 1; hj <= 5; ++hj) {
      const double h = (x - 1.0) * hj / 5.0;
      ++points;
      const double dh = 1e-4 * h;
      r.checks += 4;
      if (!(f_xh(x, h - dh) > f_xh(x, h))) ++f_bad;              // decreasing in h
      if (!(f_xh(x + 0.01, h) > f_xh(x, h))) ++f_bad;            // increasing in x
      if (!(f_xh(x + 0.01, x + 0.01) > f_xh(x, x))) ++f_bad;     // F(x, x) increasing
      if (!(f_xh(x, h) > f_xh(x - h, 1.0))) ++f_bad;             // (b)
    }
  }
  r.violations = seq_bad + l82_bad + f_bad;
  r.details = {{"alpha_seq_failures", seq_bad}, {"threshold_term_failures", l82_bad},
               {"f_failures", f_bad}, {"f_grid_points", points}};
  return finish(r);
}

SuiteResult suite_altbeta(const SuiteParams& p) {
  SuiteResult r{.name = "altbeta"};
  Rng rng(p.seed);
  const auto n = pick(p, 2000);
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 6));
    std::vector<double> ell(k);
    for (auto& e : ell) e = log_uniform(rng, std::log(3.0), 4.0);
    ell[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(k) - 1))] =
        log_uniform(rng, 20.0, 2000.0);
    const auto sol = solve_alpha(k, ell);
    const double ratio = altbeta(ell, find_i0(k, sol.alpha)) / compute_beta(ell, find_i1(ell));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++r.checks;
    if (!kAltbetaBand.contains(ratio)) ++r.violations;
  }
  r.worst = hi;
  r.details = {{"min_ratio", lo}, {"max_ratio", hi}, {"band", {kAltbetaBand.lo, kAltbetaBand.hi}}};
  return finish(r);
}

SuiteResult suite_ladder(const SuiteParams& p) {
  SuiteResult r{.name = "ladder"};
  const PrimeSieve local(200000);
  const PrimeSieve& sieve = p.sieve && p.sieve->limit() >= 200000 ? *p.sieve : local;
  struct Case {
    std::size_t k;
    std::vector<double> y;
  };
  const std::vector<Case> cases{{1, {1e4}},        {1, {1e5}},         {2, {100, 1e5}},
                                {2, {30, 200000}}, {3, {10, 100, 1e5}}, {3, {50, 5000, 150000}}};
  Json rows = Json::array();
  for (const auto& c : cases) {
    for (std::size_t i = 1; i <= c.k; ++i) {
      const auto L = build_lambda_ladder(c.k, i, c.y, sieve);
      const double yprev = i == 1 ? 3.0 : c.y[i - 2];
      const auto window = sieve.primes_in(std::max<double>(c.k, yprev), c.y[i - 1]);
      std::size_t covered = 0;
      bool sums_ok = true;
      for (std::size_t j = 0; j < L.v; ++j) {
        covered += L.prime_counts[j];
        sums_ok = sums_ok && L.reciprocal_sums[j] <= L.log_rho;
      }
      const bool partition = L.covers_window && covered == window.size();
      const bool v_close = std::abs(static_cast<double>(L.v) - L.predicted_v) <= 5.0;
      r.checks += 3;
      r.violations += !sums_ok + !partition + !v_close;
      rows.push_back({{"k", c.k}, {"i", i}, {"y", c.y}, {"v", L.v},
                      {"predicted_v", L.predicted_v}, {"fitted_L", L.fitted_l}});
      r.worst = std::max(r.worst, L.fitted_l);
    }
  }
  r.details = {{"ladders", rows}};
  return finish(r);
}

// ----------------------------------------------------------- divisor geometry

SuiteResult suite_volume_ie(const SuiteParams& p) {
  SuiteResult r{.name = "volume_ie"};
  Rng rng(p.seed);
  const auto n = pick(p, 500);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    BoxUnion u;
    u.k = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const int nb = uniform_int(rng, 1, 12);
    for (int b = 0; b < nb; ++b) {
      Box box;
      for (std::size_t a = 0; a < u.k; ++a) {
        LogCoordinate lo, hi;
        do {
          lo = {static_cast<std::uint64_t>(uniform_int(rng, 1, 32)), uniform_int(rng, 0, 1) == 1};
          hi = {static_cast<std::uint64_t>(uniform_int(rng, 1, 32)), uniform_int(rng, 0, 1) == 1};
        } while (!(lo < hi));
        box.lo[a] = lo;
        box.hi[a] = hi;
      }
      u.boxes.push_back(box);
    }
    const double got = box_union_volume(u);
    const long double want = oracle_union_volume(u);
    const double err = static_cast<double>(std::abs(static_cast<long double>(got) - want));
    worst = std::max(worst, err);
    ++r.checks;
    if (err > 1e-12 * std::max(1.0L, std::abs(want))) ++r.violations;
  }
  r.worst = worst;
  r.details = {{"max_abs_error", worst}};
  return finish(r);
}

SuiteResult suite_volume_mc(const SuiteParams& p) {
  SuiteResult r{.name = "volume_mc"};
  Rng rng(p.seed);
  const auto n = pick(p, 200);
  const std::uint64_t samples = p.samples ? p.samples : 1'000'000;
  double worst_z = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const auto a = random_windowed(rng, k, 100, 512);
    std::vector<std::vector<std::uint64_t>> coords(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& pp : a.tuple().part(i).parts) coords[i].push_back(pp.prime);
    }
    const auto chains = oracle_chains(coords);
    std::vector<std::vector<double>> logs;
    for (const auto& c : chains) {
      std::vector<double> l;
      for (auto d : c) l.push_back(std::log(static_cast<double>(d)));
      logs.push_back(l);
    }
    std::sort(logs.begin(), logs.end());
    std::vector<double> hi(k, 0.0);
    for (const auto& l : logs) {
      for (std::size_t i = 0; i < k; ++i) hi[i] = std::max(hi[i], l[i]);
    }
    double box = 1.0;
    for (std::size_t i = 0; i < k; ++i) box *= hi[i] + kLog2;
    std::vector<double> first;
    for (const auto& l : logs) first.push_back(l[0]);

    std::uint64_t hits = 0;
    std::vector<double> x(k);
    for (std::uint64_t s = 0; s < samples; ++s) {
      for (std::size_t i = 0; i < k; ++i) x[i] = uniform_real(rng, -kLog2, hi[i]);
      // Chains with log(d_1/2) <= x_1 < log d_1.
      auto it = std::upper_bound(first.begin(), first.end(), x[0]);
      bool in = false;
      for (; it != first.end() && *it - kLog2 <= x[0] && !in; ++it) {
        const auto& l = logs[static_cast<std::size_t>(it - first.begin())];
        bool ok = true;
        for (std::size_t i = 1; i < k && ok; ++i) ok = l[i] - kLog2 <= x[i] && x[i] < l[i];
        in = ok;
      }
      hits += in;
    }
    const double exact = l_volume(a.tuple());
    const double pr = std::clamp(exact / box, 0.0, 1.0);
    const double se = box * std::sqrt(pr * (1.0 - pr) / static_cast<double>(samples));
    const double est = box * static_cast<double>(hits) / static_cast<double>(samples);
    const double z = se > 0 ? std::abs(est - exact) / se : (est == exact ? 0.0 : 1e300);
    worst_z = std::max(worst_z, z);
    ++r.checks;
    if (z > 4.0) ++r.violations;
  }
  r.worst = worst_z;
  r.details = {{"max_abs_z", worst_z}, {"samples_per_tuple", samples}};
  return finish(r);
}

SuiteResult suite_l_bound(const SuiteParams& p) {
  SuiteResult r{.name = "l_bound"};
  Rng rng(p.seed);
  const auto primes = primes_upto(100);
  const auto n = pick(p, 1000);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const auto a = tuple_from(random_coords(rng, k, primes, 65536.0, 16));
    const double L = l_volume(a, std::uint64_t{1} << 16);
    const auto b = l_bounds(a);
    ++r.checks;
    if (!le_slack(L, b.bound_a)) ++r.violations;
    worst = std::max(worst, L / b.bound_a);
  }
  r.worst = worst;
  r.details = {{"max_L_over_bound", worst}};
  return finish(r);
}

SuiteResult suite_l_product(const SuiteParams& p) {
  SuiteResult r{.name = "l_product"};
  Rng rng(p.seed);
  const auto primes = primes_upto(100);
  const auto n = pick(p, 300);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const auto all = random_coords(rng, k, primes, 4096.0, 12);
    std::vector<std::vector<std::uint64_t>> ca(k), cb(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (auto q : all[i]) (uniform_int(rng, 0, 1) ? ca : cb)[i].push_back(q);
    }
    const auto a = tuple_from(ca);
    const auto b = tuple_from(cb);
    const double lhs = l_volume(a.times(b));
    const double rhs = l_product_bound(a, b);
    ++r.checks;
    if (!le_slack(lhs, rhs)) ++r.violations;
    worst = std::max(worst, lhs / rhs);
  }
  r.worst = worst;
  r.details = {{"max_lhs_over_rhs", worst}};
  return finish(r);
}

SuiteResult suite_convolution(const SuiteParams& p) {
  SuiteResult r{.name = "convolution"};
  Rng rng(p.seed);
  const auto primes = primes_upto(100);
  const auto n = pick(p, 200);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const auto a = tuple_from(random_coords(rng, k, primes, 4096.0, 10));
    const double L = l_volume(a);
    for (const auto& z : admissible_zseqs(k)) {
      const double bound = conv_ineq_bound(a, z);
      ++r.checks;
      if (!le_slack(L, bound)) ++r.violations;
      worst = std::max(worst, L / bound);
    }
  }
  r.worst = worst;
  r.details = {{"max_L_over_bound", worst}};
  return finish(r);
}

SuiteResult suite_holder(const SuiteParams& p) {
  SuiteResult r{.name = "holder"};
  Rng rng(p.seed);
  const auto primes = primes_upto(100);
  const auto n = pick(p, 100);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const int size = uniform_int(rng, 3, 20);
    std::vector<FactoredTuple> set;
    std::set<std::vector<std::uint64_t>> seen;
    while (static_cast<int>(set.size()) < size) {
      auto a = tuple_from(random_coords(rng, k, primes, 1024.0, 8));
      if (seen.insert(a.values()).second) set.push_back(std::move(a));
    }
    const double lk = std::pow(kLog2, static_cast<double>(k));
    for (double P : {1.25, 1.5, 2.0}) {
      double sw = 0.0, sl = 0.0, st = 0.0;
      for (const auto& a : set) {
        const double prod = static_cast<double>(a.product());
        sw += w_moment(a, P) / prod;
        sl += l_volume(a) / lk / prod;
        st += static_cast<double>(tau_chain(a)) / prod;
      }
      const double lhs = std::pow(sw, 1.0 / P) * std::pow(sl, 1.0 - 1.0 / P);
      ++r.checks;
      if (!(lhs >= st * (1.0 - kInequalitySlack) - kInequalitySlack)) ++r.violations;
      worst = std::max(worst, st / lhs);
    }
  }
  r.worst = worst;
  r.details = {{"max_rhs_over_lhs", worst}};
  return finish(r);
}

SuiteResult suite_cylinder(const SuiteParams& p) {
  SuiteResult r{.name = "cylinder"};
  Rng rng(p.seed);
  const auto primes = primes_upto(100);
  const auto n = pick(p, 200);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 2, 4));
    const auto coords = random_coords(rng, k, primes, 8192.0, 12);
    const double L = l_volume(tuple_from(coords));
    for (std::size_t l = 1; l < k; ++l) {
      std::vector<std::vector<std::uint64_t>> merged(1);
      for (std::size_t i = 0; i <= l; ++i) {
        merged[0].insert(merged[0].end(), coords[i].begin(), coords[i].end());
      }
      for (std::size_t i = l + 1; i < k; ++i) merged.push_back(coords[i]);
      const double rhs = std::pow(kLog2, static_cast<double>(l)) * l_volume(tuple_from(merged));
      ++r.checks;
      if (!le_slack(rhs, L)) ++r.violations;
      worst = std::max(worst, rhs / L);
    }
  }
  r.worst = worst;
  r.details = {{"max_rhs_over_L", worst}};
  return finish(r);
}

// ------------------------------------------------------------ order statistics

SuiteResult suite_qr_closed(const SuiteParams&) {
  SuiteResult r{.name = "qr_closed"};
  double worst = 0.0;
  for (int rr = 1; rr <= 20; ++rr) {
    for (int v = 1; v <= 40; ++v) {
      const double err = std::abs(qr_exact(rr, 1.0, v) - qr_closed_form_u1(rr, v));
      worst = std::max(worst, err);
      ++r.checks;
      if (err > 1e-9) ++r.violations;
    }
  }
  r.worst = worst;
  r.details = {{"max_abs_error", worst}};
  return finish(r);
}

SuiteResult suite_qr_mc(const SuiteParams& p) {
  SuiteResult r{.name = "qr_mc"};
  Rng rng(p.seed);
  const std::uint64_t samples = p.samples ? p.samples : 200'000;
  const auto n = pick(p, 20);
  Json pts = Json::array();
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const int rr = uniform_int(rng, 1, 12);
    const double u = uniform_real(rng, 0.0, rr + 1.0);
    const double v = uniform_real(rng, 1.0, 2.0 * rr + 2.0);
    const double exact = qr_exact(rr, u, v);
    const auto mc = qr_mc(rr, u, v, samples, p.seed + t);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(samples));
    const double z = se > 0 ? std::abs(mc.estimate - exact) / se
                            : (std::abs(mc.estimate - exact) < 1e-12 ? 0.0 : 1e300);
    worst = std::max(worst, z);
    ++r.checks;
    if (z > 4.0) ++r.violations;
    pts.push_back({{"r", rr}, {"u", u}, {"v", v}, {"exact", exact}, {"mc", mc.estimate}});
  }
  r.worst = worst;
  r.details = {{"max_abs_z", worst}, {"points", pts}};
  return finish(r);
}

SuiteResult suite_order_band(const SuiteParams&) {
  SuiteResult r{.name = "order_band"};
  double lo = 1e300, hi = 0.0;
  for (int rr = 1; rr <= 40; ++rr) {
    for (int u = 1; u <= rr; ++u) {
      for (int v = std::max(1, rr + 1 - u); v <= 2 * rr + 1; ++v) {
        const double w = u + v - rr;
        const double ratio = qr_exact(rr, u, v) / std::min(1.0, u * w / rr);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++r.checks;
        if (!kOrderStatBand.contains(ratio)) ++r.violations;
      }
    }
  }
  r.worst = lo;
  r.details = {{"min_ratio", lo}, {"max_ratio", hi}, {"band", {kOrderStatBand.lo, kOrderStatBand.hi}}};
  return finish(r);
}

SuiteResult suite_composition_band(const SuiteParams&) {
  SuiteResult r{.name = "composition_band"};
  double lo = 1e300, hi = 0.0;
  std::uint64_t dp_mismatch = 0;
  for (int rr = 1; rr <= 10; ++rr) {
    for (int v = 1; v <= 10; ++v) {
      for (int u = std::max(0, rr - v); u <= rr; ++u) {
        const double w = u + v - rr;
        const double g = gr_sum(rr, u, v, GrMode::dp);
        const double ge = gr_sum(rr, u, v, GrMode::enumerate);
        if (std::abs(g - ge) > 1e-12 * std::max(1.0, ge)) ++dp_mismatch;
        const double norm = g * std::exp(std::lgamma(rr + 1.0)) / std::pow(v, rr);
        const double ratio = norm / std::min(1.0, (u + 1.0) * (w + 1.0) / rr);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        r.checks += 2;
        if (!kCompositionBand.contains(ratio)) ++r.violations;
      }
    }
  }
  r.violations += dp_mismatch;
  r.worst = lo;
  r.details = {{"min_ratio", lo}, {"max_ratio", hi}, {"dp_mismatch", dp_mismatch},
               {"band", {kCompositionBand.lo, kCompositionBand.hi}}};
  return finish(r);
}

// -------------------------------------------------------------------- Poisson

PoissonSpec random_spec(Rng& rng, int kmax, double zmax) {
  PoissonSpec s;
  const int k = uniform_int(rng, 1, kmax);
  for (int i = 0; i < k; ++i) {
    s.z.push_back(uniform_real(rng, 1.0, zmax));
    s.lambda.push_back(uniform_real(rng, 0.5, 2.0));
  }
  return s;
}

SuiteResult suite_slab_partition(const SuiteParams& p) {
  SuiteResult r{.name = "slab_partition"};
  Rng rng(p.seed);
  const auto n = pick(p, 20);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto spec = random_spec(rng, 3, 50.0);
    const auto part = slab_partition(spec, 1e-10);
    const double gap = std::abs(1.0 - part.total);
    worst = std::max(worst, gap);
    ++r.checks;
    if (gap > part.tail_bound + 1e-9) ++r.violations;
  }
  r.worst = worst;
  r.details = {{"max_gap", worst}};
  return finish(r);
}

SuiteResult suite_alpha_r(const SuiteParams& p) {
  SuiteResult r{.name = "alpha_r"};
  Rng rng(p.seed);
  const auto n = pick(p, 1000);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto spec = random_spec(rng, 4, 100.0);
    const double R = log_uniform(rng, 0.05 * spec.mean(), 50.0 * spec.mean());
    const double a = alpha_R(spec, R);
    double lhs = 0.0;
    for (std::size_t i = 0; i < spec.k(); ++i) {
      lhs += spec.lambda[i] * std::exp(a * spec.lambda[i]) * spec.z[i];
    }
    const double res = std::abs(lhs - R) / R;
    worst = std::max(worst, res);
    ++r.checks;
    if (res >= 1e-12) ++r.violations;
  }
  r.worst = worst;
  r.details = {{"max_relative_residual", worst}};
  return finish(r);
}

SuiteResult suite_slab_shape(const SuiteParams& p) {
  SuiteResult r{.name = "slab_shape"};
  Rng rng(p.seed);
  const auto n = pick(p, 10);
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto spec = random_spec(rng, 2, 20.0);
    const double L = spec.big_lambda();
    const double top = 40.0 * spec.mean();
    for (int j = 0; j <= 16; ++j) {
      const double R = L * std::pow(top / L, j / 16.0);
      const auto slab = slab_prob_exact(spec, R);
      const double ratio = std::exp(slab.log_value - slab_bound_log_shape(spec, R));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++r.checks;
      if (!kSlabShapeBand.contains(ratio)) ++r.violations;
    }
  }
  r.worst = hi;
  r.details = {{"min_ratio", lo}, {"max_ratio", hi},
               {"band", {kSlabShapeBand.lo, kSlabShapeBand.hi}}};
  return finish(r);
}

SuiteResult suite_tail_sum(const SuiteParams& p) {
  SuiteResult r{.name = "tail_sum"};
  Rng rng(p.seed);
  const auto n = pick(p, 30);
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto spec = random_spec(rng, 2, 20.0);
    std::vector<double> mu;
    for (double l : spec.lambda) mu.push_back(l * uniform_real(rng, 1.2, 3.0));
    for (double C : {0.0, 1.0, 2.0}) {
      const auto tail = upper_tail_sum(spec, mu, C);
      if (tail.z_point < spec.big_lambda()) continue;
      const auto slab = slab_prob_exact(spec, tail.z_point);
      const double ratio = tail.value / slab.value;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++r.checks;
      if (!kTailSumBand.contains(ratio)) ++r.violations;
    }
  }
  r.worst = hi;
  r.details = {{"min_ratio", lo}, {"max_ratio", hi},
               {"band", {kTailSumBand.lo, kTailSumBand.hi}}};
  return finish(r);
}

// ------------------------------------------------------------------- counting

std::uint64_t oracle_count_a(const std::vector<std::uint64_t>& sides) {
  std::unordered_set<std::uint64_t> seen{1};
  for (auto n : sides) {
    std::unordered_set<std::uint64_t> next;
    for (auto m : seen) {
      for (std::uint64_t b = 1; b <= n; ++b) next.insert(m * b);
    }
    seen = std::move(next);
  }
  return seen.size();
}

SuiteResult suite_counting(const SuiteParams& p) {
  SuiteResult r{.name = "counting"};
  const PrimeSieve local(70000);
  const PrimeSieve& sieve = p.sieve && p.sieve->limit() >= 70000 ? *p.sieve : local;
  Rng rng(p.seed);
  Json det = Json::object();

  const std::vector<std::uint64_t> s44{4, 4}, s222{2, 2, 2};
  const auto a44 = count_A(s44), a222 = count_A(s222);
  r.checks += 4;
  r.violations += (a44 != 9) + (a222 != 4);
  r.violations += (a44 != oracle_count_a(s44)) + (a222 != oracle_count_a(s222));
  det["A(4,4)"] = a44;
  det["A(2,2,2)"] = a222;

  const std::vector<double> y{2.0}, z{4.0};
  const auto h = count_H(20, y, z, sieve);
  std::uint64_t direct = 0;
  for (std::uint64_t m = 1; m <= 20; ++m) direct += (m % 3 == 0 || m % 4 == 0);
  r.checks += 2;
  r.violations += (h != 10) + (h != direct);
  det["H(20,2,4)"] = h;

  std::uint64_t star_bad = 0;
  for (int t = 0; t < 100; ++t) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    std::vector<double> yy(k), zz(k);
    for (std::size_t i = 0; i < k; ++i) {
      yy[i] = uniform_real(rng, 0.5, 30.0);
      zz[i] = yy[i] + uniform_real(rng, 0.5, 30.0);
    }
    const auto x = static_cast<std::uint64_t>(uniform_int(rng, 1, 3000));
    ++r.checks;
    if (count_H_star(x, yy, zz, sieve) > count_H(x, yy, zz, sieve)) ++star_bad;
  }
  r.violations += star_bad;
  det["H_star_violations"] = star_bad;

  std::uint64_t sandwich_bad = 0, pairs = 0;
  std::vector<std::uint64_t> grid{1, 2, 3, 4, 5, 7, 8, 12, 16, 25, 31, 32, 50, 64, 100, 128, 200, 255, 256};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i; j < grid.size(); ++j) {
      const std::vector<std::uint64_t> sides{grid[i], grid[j]};
      const auto sw = table_sandwich(sides, sieve);
      ++pairs;
      r.checks += 3;
      if (sw.a != oracle_count_a(sides)) ++sandwich_bad;
      if (sw.lower > sw.a) ++sandwich_bad;
      if (sw.a > sw.upper) ++sandwich_bad;
    }
  }
  r.violations += sandwich_bad;
  det["sandwich_pairs"] = pairs;
  det["sandwich_violations"] = sandwich_bad;
  r.details = det;
  return finish(r);
}

}  // namespace

const std::map<std::string, SuiteFn>& suite_registry() {
  static const std::map<std::string, SuiteFn> reg{
      {"constants", suite_constants},   {"alpha", suite_alpha},
      {"conditions", suite_conditions}, {"monotonicity", suite_monotonicity},
      {"altbeta", suite_altbeta},       {"ladder", suite_ladder},
      {"volume_ie", suite_volume_ie},   {"volume_mc", suite_volume_mc},
      {"l_bound", suite_l_bound},     {"l_product", suite_l_product},
      {"convolution", suite_convolution},       {"holder", suite_holder},
      {"cylinder", suite_cylinder},     {"qr_closed", suite_qr_closed},
      {"qr_mc", suite_qr_mc},           {"order_band", suite_order_band},
      {"composition_band", suite_composition_band},       {"slab_partition", suite_slab_partition},
      {"alpha_r", suite_alpha_r},       {"slab_shape", suite_slab_shape},
      {"tail_sum", suite_tail_sum},       {"counting", suite_counting},
  };
  return reg;
}

SuiteResult run_suite(const std::string& name, const SuiteParams& p) {
  const auto& reg = suite_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw InvalidArgument("unknown suite '" + name + "'");
  return it->second(p);
}

}  // namespace multab
