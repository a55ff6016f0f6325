#include "multab/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <thread>

#include "multab/errors.hpp"

namespace multab {

namespace {

constexpr std::uint64_t kWindowBits = std::uint64_t{1} << 23;
constexpr std::uint64_t kU64Max = std::numeric_limits<std::uint64_t>::max();

std::uint64_t floor_bound(double v) {
  if (!(v >= 0.0)) return 0;
  if (v >= 18446744073709551615.0) return kU64Max;
  return static_cast<std::uint64_t>(std::floor(v));
}

std::vector<std::uint64_t> sorted_sides(std::span<const std::uint64_t> sides) {
  if (sides.empty()) throw InvalidArgument("at least one side is required");
  std::vector<std::uint64_t> s(sides.begin(), sides.end());
  for (auto n : s) {
    if (n == 0) throw InvalidArgument("table sides must be positive");
  }
  std::sort(s.begin(), s.end());
  return s;
}

std::uint64_t checked_range(std::span<const std::uint64_t> sides,
                            std::uint64_t budget_bits) {
  std::uint64_t p = 1;
  for (auto n : sides) {
    if (__builtin_mul_overflow(p, n, &p)) {
      throw ResourceLimit("table range exceeds 64 bits", kU64Max);
    }
  }
  if (p > budget_bits) {
    throw ResourceLimit("table range " + std::to_string(p) +
                            " exceeds bit budget " + std::to_string(budget_bits),
                        (p + 7) / 8);
  }
  return p;
}

// Marks every m*b (m in prefix, b <= last) that falls in [lo, hi].
// With sym set (two sides), pairs with b < m are skipped: m*b is then
// reached as b*m with b in the prefix and m <= last.
void fill_window(std::vector<std::uint64_t>& words, std::uint64_t lo,
                 std::uint64_t hi, const std::vector<std::uint64_t>& prefix,
                 std::uint64_t last, bool sym) {
  std::fill(words.begin(), words.end(), 0);
  for (std::uint64_t m : prefix) {
    if (m > hi) break;
    std::uint64_t bmin = (lo + m - 1) / m;
    if (sym) bmin = std::max(bmin, m);
    bmin = std::max<std::uint64_t>(bmin, 1);
    const std::uint64_t bmax = std::min(last, hi / m);
    std::uint64_t idx = m * bmin - lo;
    for (std::uint64_t b = bmin; b <= bmax; ++b, idx += m) {
      words[idx >> 6] |= std::uint64_t{1} << (idx & 63);
    }
  }
}

struct Plan {
  std::vector<std::uint64_t> prefix;
  std::uint64_t last = 0;
  std::uint64_t range = 0;
  bool sym = false;
};

std::vector<std::uint64_t> members_sorted(const std::vector<std::uint64_t>& s,
                                          std::uint64_t budget_bits);

Plan make_plan(const std::vector<std::uint64_t>& s, std::uint64_t budget_bits) {
  Plan plan;
  plan.range = checked_range(s, budget_bits);
  plan.last = s.back();
  std::vector<std::uint64_t> head(s.begin(), s.end() - 1);
  plan.prefix = members_sorted(head, budget_bits);
  plan.sym = s.size() == 2;
  return plan;
}

std::vector<std::uint64_t> members_sorted(const std::vector<std::uint64_t>& s,
                                          std::uint64_t budget_bits) {
  if (s.size() == 1) {
    std::vector<std::uint64_t> out(s[0]);
    for (std::uint64_t i = 0; i < s[0]; ++i) out[i] = i + 1;
    return out;
  }
  const Plan plan = make_plan(s, budget_bits);
  std::vector<std::uint64_t> out;
  std::vector<std::uint64_t> words(kWindowBits / 64);
  for (std::uint64_t lo = 1; lo <= plan.range; lo += kWindowBits) {
    const std::uint64_t hi = std::min(plan.range, lo + kWindowBits - 1);
    fill_window(words, lo, hi, plan.prefix, plan.last, plan.sym);
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits) {
        const int t = std::countr_zero(bits);
        out.push_back(lo + w * 64 + static_cast<std::uint64_t>(t));
        bits &= bits - 1;
      }
    }
  }
  return out;
}

template <class Fn>
std::uint64_t sharded_sum(std::uint64_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) return fn(0, count);
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t b = std::min(count, w * chunk);
    const std::uint64_t e = std::min(count, b + chunk);
    pool.emplace_back([&, w, b, e] { partial[w] = fn(b, e); });
  }
  for (auto& t : pool) t.join();
  std::uint64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

struct Windows {
  std::vector<std::uint64_t> lo, hi;
  std::vector<std::size_t> order;
  bool empty = false;
};

Windows make_windows(std::span<const double> y, std::span<const double> z) {
  if (y.size() != z.size() || y.empty()) {
    throw InvalidArgument("y and z must be nonempty vectors of equal length");
  }
  Windows w;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] < z[i])) throw InvalidArgument("window requires y_i < z_i");
    w.lo.push_back(floor_bound(y[i]));
    w.hi.push_back(floor_bound(z[i]));
    if (w.hi.back() <= w.lo.back()) w.empty = true;
    w.order.push_back(i);
  }
  // Widest window last: the narrow ones prune first.
  std::stable_sort(w.order.begin(), w.order.end(), [&](std::size_t a, std::size_t b) {
    return w.hi[a] - w.lo[a] < w.hi[b] - w.lo[b];
  });
  return w;
}

bool search(const std::vector<std::uint64_t>& divs, std::uint64_t rem,
            const Windows& w, std::size_t pos) {
  if (pos == w.order.size()) return true;
  const std::size_t i = w.order[pos];
  auto it = std::upper_bound(divs.begin(), divs.end(), w.lo[i]);
  for (; it != divs.end() && *it <= w.hi[i] && *it <= rem; ++it) {
    if (rem % *it == 0 && search(divs, rem / *it, w, pos + 1)) return true;
  }
  return false;
}

bool member(const Factorization& f, const Windows& w) {
  const auto divs = divisors(f);
  return search(divs, f.n, w, 0);
}

std::uint64_t count_h_impl(std::uint64_t x, std::span<const double> y,
                           std::span<const double> z, const PrimeSieve& sieve,
                           unsigned workers, bool squarefree_only) {
  const Windows w = make_windows(y, z);
  if (x > sieve.limit()) {
    throw OutOfRange("x = " + std::to_string(x) + " above sieve limit " +
                     std::to_string(sieve.limit()));
  }
  if (w.empty || x == 0) return 0;
  return sharded_sum(x, workers, [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t c = 0;
    for (std::uint64_t n = b + 1; n <= e; ++n) {
      const auto f = factorize(n, sieve);
      if (squarefree_only && !f.squarefree()) continue;
      if (member(f, w)) ++c;
    }
    return c;
  });
}

}  // namespace

std::uint64_t count_A(std::span<const std::uint64_t> sides,
                      std::uint64_t budget_bits, unsigned workers) {
  const auto s = sorted_sides(sides);
  if (s.size() == 1) {
    checked_range(s, budget_bits);
    return s[0];
  }
  const Plan plan = make_plan(s, budget_bits);
  const std::uint64_t nwin = (plan.range + kWindowBits - 1) / kWindowBits;
  return sharded_sum(nwin, workers, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<std::uint64_t> words(kWindowBits / 64);
    std::uint64_t c = 0;
    for (std::uint64_t j = b; j < e; ++j) {
      const std::uint64_t lo = 1 + j * kWindowBits;
      const std::uint64_t hi = std::min(plan.range, lo + kWindowBits - 1);
      fill_window(words, lo, hi, plan.prefix, plan.last, plan.sym);
      for (auto v : words) c += static_cast<std::uint64_t>(std::popcount(v));
    }
    return c;
  });
}

std::vector<std::uint64_t> table_members(std::span<const std::uint64_t> sides,
                                         std::uint64_t budget_bits) {
  const auto s = sorted_sides(sides);
  checked_range(s, budget_bits);
  return members_sorted(s, budget_bits);
}

bool has_divisor_tuple(const Factorization& n, std::span<const double> y,
                       std::span<const double> z) {
  const Windows w = make_windows(y, z);
  return !w.empty && member(n, w);
}

std::uint64_t count_H(std::uint64_t x, std::span<const double> y,
                      std::span<const double> z, const PrimeSieve& sieve,
                      unsigned workers) {
  return count_h_impl(x, y, z, sieve, workers, false);
}

std::uint64_t count_H_star(std::uint64_t x, std::span<const double> y,
                           std::span<const double> z, const PrimeSieve& sieve,
                           unsigned workers) {
  return count_h_impl(x, y, z, sieve, workers, true);
}

std::vector<Factorization> enumerate_pstar_factored(double y, double z,
                                                    const PrimeSieve& sieve,
                                                    std::uint64_t cap,
                                                    std::uint64_t max_count) {
  const auto primes = sieve.primes_in(y, z);
  if (cap == kU64Max && primes.size() < 64 &&
      (std::uint64_t{1} << primes.size()) > max_count) {
    throw ResourceLimit("P_*(" + std::to_string(y) + ", " + std::to_string(z) +
                            ") has 2^" + std::to_string(primes.size()) + " elements",
                        std::uint64_t{1} << primes.size());
  }
  std::vector<Factorization> out;
  Factorization cur;
  // Primes ascending, so the first product above cap ends the level.
  auto dfs = [&](auto&& self, std::size_t from) -> void {
    if (out.size() >= max_count) {
      throw ResourceLimit("P_* enumeration exceeds " + std::to_string(max_count) +
                              " elements",
                          max_count + 1);
    }
    out.push_back(cur);
    for (std::size_t j = from; j < primes.size(); ++j) {
      const std::uint64_t p = primes[j];
      std::uint64_t next = 0;
      if (__builtin_mul_overflow(cur.n, p, &next) || next > cap) break;
      const std::uint64_t saved = cur.n;
      cur.n = next;
      cur.parts.push_back({p, 1});
      self(self, j + 1);
      cur.parts.pop_back();
      cur.n = saved;
    }
  };
  dfs(dfs, 0);
  std::sort(out.begin(), out.end(),
            [](const Factorization& a, const Factorization& b) { return a.n < b.n; });
  return out;
}

std::vector<std::uint64_t> enumerate_pstar(double y, double z, const PrimeSieve& sieve,
                                           std::uint64_t cap, std::uint64_t max_count) {
  std::vector<std::uint64_t> out;
  for (const auto& f : enumerate_pstar_factored(y, z, sieve, cap, max_count)) {
    out.push_back(f.n);
  }
  return out;
}

void for_each_pstar_k(std::span<const double> t, std::span<const double> caps,
                      const PrimeSieve& sieve,
                      const std::function<void(const SquarefreeTuple&)>& fn,
                      std::uint64_t max_count) {
  const std::size_t k = t.size();
  if (k == 0 || k > kMaxDimension) throw InvalidArgument("need 1 <= k <= 6 windows");
  if (!caps.empty() && caps.size() != k) {
    throw InvalidArgument("caps must be empty or have one entry per window");
  }
  std::vector<double> windows{1.0};
  windows.insert(windows.end(), t.begin(), t.end());
  for (std::size_t i = 1; i <= k; ++i) {
    if (windows[i] < windows[i - 1]) throw InvalidArgument("windows must be nondecreasing");
  }
  std::vector<std::vector<Factorization>> lists;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t cap = caps.empty() ? kU64Max : floor_bound(caps[i]);
    lists.push_back(enumerate_pstar_factored(windows[i], windows[i + 1], sieve, cap,
                                             max_count));
    if (__builtin_mul_overflow(total, lists.back().size(), &total) ||
        total > max_count) {
      throw ResourceLimit("P_*^k enumeration exceeds " + std::to_string(max_count) +
                              " tuples",
                          total);
    }
  }
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    std::vector<Factorization> parts;
    parts.reserve(k);
    for (std::size_t i = 0; i < k; ++i) parts.push_back(lists[i][idx[i]]);
    fn(SquarefreeTuple::from_factored(FactoredTuple(std::move(parts)), windows));
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (++idx[i] < lists[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
  }
}

std::vector<SquarefreeTuple> enumerate_pstar_k(std::span<const double> t,
                                               std::span<const double> caps,
                                               const PrimeSieve& sieve,
                                               std::uint64_t max_count) {
  std::vector<SquarefreeTuple> out;
  for_each_pstar_k(
      t, caps, sieve, [&](const SquarefreeTuple& a) { out.push_back(a); }, max_count);
  return out;
}

std::vector<double> default_caps(std::span<const double> t, double exponent) {
  std::vector<double> caps;
  for (double v : t) caps.push_back(std::pow(v, exponent));
  return caps;
}

SSumResult s_sum(std::span<const double> t, std::span<const double> caps,
                 const PrimeSieve& sieve, std::uint64_t max_count) {
  SSumResult r;
  for_each_pstar_k(
      t, caps, sieve,
      [&](const SquarefreeTuple& a) {
        double denom = 1.0;
        for (std::size_t i = 0; i < a.k(); ++i) {
          denom *= static_cast<double>(a.tuple().value(i));
        }
        r.sum += l_volume(a.tuple()) / denom;
        ++r.tuples;
      },
      max_count);
  return r;
}

bool local_global_admissible(double x, std::span<const double> y) {
  if (y.empty()) return false;
  double lhs = 1.0;
  for (double v : y) lhs *= 2.0 * v;
  return lhs <= x / y.back();
}

LocalGlobalResult local_global_ratio(std::uint64_t x, std::span<const double> y,
                                     std::span<const double> caps,
                                     const PrimeSieve& sieve, unsigned workers) {
  if (y.empty()) throw InvalidArgument("y must be nonempty");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 3.0 || (i > 0 && y[i] < y[i - 1])) {
      throw InvalidArgument("y must satisfy 3 <= y_1 <= ... <= y_k");
    }
  }
  LocalGlobalResult r;
  const std::size_t k = y.size();
  std::vector<double> z;
  for (double v : y) z.push_back(2.0 * v);
  r.admissible = local_global_admissible(static_cast<double>(x), y);
  r.h_count = count_H(x, y, z, sieve, workers);
  r.lhs = static_cast<double>(r.h_count) / static_cast<double>(x);

  double f = 1.0;
  double prev = std::log(3.0);
  for (std::size_t i = 0; i < k; ++i) {
    const double cur = std::log(y[i]);
    f *= std::pow(cur / prev, -static_cast<double>(k - i + 1));
    prev = cur;
  }
  r.log_ratio_factor = f;

  std::vector<double> c(caps.begin(), caps.end());
  if (c.empty()) c = default_caps(y);
  std::vector<double> half;
  for (double v : c) half.push_back(v / 2.0);
  r.s = s_sum(y, c, sieve);
  r.s_half = s_sum(y, half, sieve);
  r.rhs = f * r.s.sum;
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : std::numeric_limits<double>::infinity();
  return r;
}

SandwichResult table_sandwich(std::span<const std::uint64_t> sides,
                              const PrimeSieve& sieve, std::uint64_t budget_bits) {
  const auto s = sorted_sides(sides);
  if (s.size() < 2) throw InvalidArgument("sandwich needs at least two sides");
  const std::size_t k = s.size() - 1;
  SandwichResult r;
  r.a = count_A(s, budget_bits);

  std::uint64_t prod = 1;
  for (auto n : s) prod = checked_mul(prod, n);

  std::vector<double> lo(k), hi(k);
  for (std::size_t i = 0; i < k; ++i) {
    lo[i] = std::ldexp(static_cast<double>(s[i]), -static_cast<int>(k));
    hi[i] = std::ldexp(static_cast<double>(s[i]), 1 - static_cast<int>(k));
  }
  const std::uint64_t xl = prod >> std::min<std::size_t>(k * k, 63);
  r.lower = xl == 0 ? 0 : count_H(xl, lo, hi, sieve);

  std::vector<int> m(k, 0);
  std::vector<int> mmax(k);
  for (std::size_t i = 0; i < k; ++i) mmax[i] = std::bit_width(s[i]) - 1;
  while (true) {
    int total = 0;
    for (std::size_t i = 0; i < k; ++i) {
      lo[i] = std::ldexp(static_cast<double>(s[i]), -(m[i] + 1));
      hi[i] = std::ldexp(static_cast<double>(s[i]), -m[i]);
      total += m[i];
    }
    const std::uint64_t xu = prod >> total;
    if (xu > 0) r.upper += count_H(xu, lo, hi, sieve);
    std::size_t i = 0;
    while (i < k && ++m[i] > mmax[i]) m[i++] = 0;
    if (i == k) break;
  }
  return r;
}

}  // namespace multab
