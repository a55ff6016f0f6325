#include "multab/divisor_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "multab/errors.hpp"

namespace multab {

namespace {

constexpr double kLog2 = std::numbers::ln2;

// Exponent table of a tuple over the union of its primes.
struct ExponentTable {
  std::vector<std::uint64_t> primes;
  std::vector<std::vector<std::uint32_t>> exps;  // exps[i][j]: p_j in a_i

  explicit ExponentTable(const FactoredTuple& a) {
    std::map<std::uint64_t, std::size_t> index;
    for (const auto& f : a.parts()) {
      for (const auto& pp : f.parts) index.emplace(pp.prime, 0);
    }
    for (auto& [p, j] : index) {
      j = primes.size();
      primes.push_back(p);
    }
    exps.assign(a.k(), std::vector<std::uint32_t>(primes.size(), 0));
    for (std::size_t i = 0; i < a.k(); ++i) {
      for (const auto& pp : a.part(i).parts) exps[i][index[pp.prime]] = pp.exponent;
    }
  }
};

// Integer form of a real window bound: d > y iff d > floor(y), and
// d <= z iff d <= floor(z), for positive integers d.
std::uint64_t floor_bound(double v) {
  if (!(v >= 0.0)) return 0;
  if (v >= 18446744073709551615.0) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::floor(v));
}

// Depth-first walk over chains. At level i the exponents of a_i are added
// to the pool and d_i takes any sub-vector of the pool.
class ChainWalker {
 public:
  ChainWalker(const FactoredTuple& a, std::span<const double> y,
              std::span<const double> z)
      : table_(a), k_(a.k()), pool_(table_.primes.size(), 0), chain_(k_, 1),
        ylo_(k_, 0), zhi_(k_, std::numeric_limits<std::uint64_t>::max()) {
    for (std::size_t i = 0; i < y.size() && i < k_; ++i) ylo_[i] = floor_bound(y[i]);
    for (std::size_t i = 0; i < z.size() && i < k_; ++i) zhi_[i] = floor_bound(z[i]);
  }

  template <typename Fn>
  void run(Fn&& fn) {
    level(0, fn);
  }

 private:
  template <typename Fn>
  void level(std::size_t i, Fn& fn) {
    if (i == k_) {
      fn(std::span<const std::uint64_t>(chain_));
      return;
    }
    for (std::size_t j = 0; j < pool_.size(); ++j) pool_[j] += table_.exps[i][j];
    pick(i, 0, 1, fn);
    for (std::size_t j = 0; j < pool_.size(); ++j) pool_[j] -= table_.exps[i][j];
  }

  template <typename Fn>
  void pick(std::size_t i, std::size_t j, std::uint64_t value, Fn& fn) {
    if (j == pool_.size()) {
      if (value <= ylo_[i] || value > zhi_[i]) return;
      chain_[i] = value;
      level(i + 1, fn);
      return;
    }
    const std::uint32_t avail = pool_[j];
    const std::uint64_t p = table_.primes[j];
    std::uint64_t v = value;
    for (std::uint32_t e = 0; e <= avail; ++e) {
      pool_[j] = avail - e;
      pick(i, j + 1, v, fn);
      if (e == avail) break;
      const auto next = static_cast<unsigned __int128>(v) * p;
      if (next > zhi_[i]) break;
      v = static_cast<std::uint64_t>(next);
    }
    pool_[j] = avail;
  }

  ExponentTable table_;
  std::size_t k_;
  std::vector<std::uint32_t> pool_;
  std::vector<std::uint64_t> chain_;
  std::vector<std::uint64_t> ylo_;
  std::vector<std::uint64_t> zhi_;
};

// Measure of a union of boxes by recursive slab sweep over the sorted
// distinct coordinates of each axis.
class UnionMeasure {
 public:
  explicit UnionMeasure(const BoxUnion& u) : u_(u) {}

  double operator()() {
    std::vector<std::uint32_t> ids(u_.boxes.size());
    for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
    if (ids.empty()) return 0.0;
    return measure(ids, 0);
  }

 private:
  double measure(std::vector<std::uint32_t>& ids, std::size_t axis) {
    const auto& bx = u_.boxes;
    std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
      return bx[a].lo[axis] < bx[b].lo[axis];
    });
    if (axis + 1 == u_.k) {
      double total = 0.0;
      LogCoordinate run_lo = bx[ids[0]].lo[axis];
      LogCoordinate run_hi = bx[ids[0]].hi[axis];
      for (std::size_t t = 1; t < ids.size(); ++t) {
        const Box& b = bx[ids[t]];
        if (b.lo[axis] > run_hi) {
          total += log_width(run_lo, run_hi);
          run_lo = b.lo[axis];
          run_hi = b.hi[axis];
        } else if (b.hi[axis] > run_hi) {
          run_hi = b.hi[axis];
        }
      }
      return total + log_width(run_lo, run_hi);
    }

    std::vector<LogCoordinate> coords;
    coords.reserve(2 * ids.size());
    for (auto id : ids) {
      coords.push_back(bx[id].lo[axis]);
      coords.push_back(bx[id].hi[axis]);
    }
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

    double total = 0.0;
    std::vector<std::uint32_t> active;
    std::vector<std::uint32_t> sub;
    std::size_t next = 0;
    for (std::size_t c = 0; c + 1 < coords.size(); ++c) {
      const LogCoordinate& at = coords[c];
      while (next < ids.size() && !(bx[ids[next]].lo[axis] > at)) {
        active.push_back(ids[next++]);
      }
      std::erase_if(active, [&](std::uint32_t id) { return !(bx[id].hi[axis] > at); });
      if (active.empty()) continue;
      sub = active;
      total += log_width(at, coords[c + 1]) * measure(sub, axis + 1);
    }
    return total;
  }

  const BoxUnion& u_;
};

}  // namespace

FactoredTuple::FactoredTuple(std::vector<Factorization> parts)
    : parts_(std::move(parts)) {}

FactoredTuple FactoredTuple::from_values(std::span<const std::uint64_t> a,
                                         const PrimeSieve& sieve) {
  std::vector<Factorization> parts;
  parts.reserve(a.size());
  for (auto v : a) parts.push_back(factorize(v, sieve));
  return FactoredTuple(std::move(parts));
}

std::vector<std::uint64_t> FactoredTuple::values() const {
  std::vector<std::uint64_t> v;
  for (const auto& f : parts_) v.push_back(f.n);
  return v;
}

std::uint64_t FactoredTuple::product() const {
  std::uint64_t r = 1;
  for (const auto& f : parts_) r = checked_mul(r, f.n);
  return r;
}

std::vector<double> FactoredTuple::log_prefix_products() const {
  std::vector<double> out{0.0};
  double acc = 0.0;
  for (const auto& f : parts_) {
    acc += std::log(static_cast<double>(f.n));
    out.push_back(acc);
  }
  return out;
}

bool FactoredTuple::jointly_squarefree() const {
  std::vector<std::uint64_t> ps;
  for (const auto& f : parts_) {
    if (!f.squarefree()) return false;
    for (const auto& pp : f.parts) ps.push_back(pp.prime);
  }
  std::sort(ps.begin(), ps.end());
  return std::adjacent_find(ps.begin(), ps.end()) == ps.end();
}

FactoredTuple FactoredTuple::times(const FactoredTuple& other) const {
  if (other.k() != k()) throw InvalidArgument("tuple dimensions differ");
  std::vector<Factorization> out;
  for (std::size_t i = 0; i < k(); ++i) {
    std::map<std::uint64_t, std::uint32_t> merged;
    for (const auto& pp : parts_[i].parts) merged[pp.prime] += pp.exponent;
    for (const auto& pp : other.parts_[i].parts) merged[pp.prime] += pp.exponent;
    Factorization f;
    for (auto [p, e] : merged) f.parts.push_back({p, e});
    f.n = checked_mul(parts_[i].n, other.parts_[i].n);
    out.push_back(std::move(f));
  }
  return FactoredTuple(std::move(out));
}

void SquarefreeTuple::validate(const FactoredTuple& t, std::span<const double> w) {
  if (w.size() != t.k() + 1) {
    throw InvalidArgument("window list must hold t_0..t_k");
  }
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] < w[i - 1]) throw InvalidArgument("windows must be nondecreasing");
  }
  for (std::size_t i = 0; i < t.k(); ++i) {
    const auto& f = t.part(i);
    if (!f.squarefree()) {
      throw InvalidArgument("a_" + std::to_string(i + 1) + " = " +
                            std::to_string(f.n) + " is not squarefree");
    }
    for (const auto& pp : f.parts) {
      const auto p = static_cast<double>(pp.prime);
      if (!(p > w[i] && p <= w[i + 1])) {
        throw InvalidArgument("prime " + std::to_string(pp.prime) + " of a_" +
                              std::to_string(i + 1) + " outside its window");
      }
    }
  }
}

SquarefreeTuple SquarefreeTuple::make(std::span<const std::uint64_t> a,
                                      std::vector<double> windows,
                                      const PrimeSieve& sieve) {
  auto t = FactoredTuple::from_values(a, sieve);
  validate(t, windows);
  return SquarefreeTuple(std::move(t), std::move(windows));
}

SquarefreeTuple SquarefreeTuple::from_primes(
    const std::vector<std::vector<std::uint64_t>>& primes,
    std::vector<double> windows) {
  std::vector<Factorization> parts;
  for (const auto& ps : primes) parts.push_back(Factorization::from_primes(ps));
  FactoredTuple t(std::move(parts));
  validate(t, windows);
  return SquarefreeTuple(std::move(t), std::move(windows));
}

SquarefreeTuple SquarefreeTuple::from_factored(FactoredTuple t,
                                               std::vector<double> windows) {
  validate(t, windows);
  return SquarefreeTuple(std::move(t), std::move(windows));
}

double LogCoordinate::value() const noexcept {
  return std::log(static_cast<double>(d)) - (halved ? kLog2 : 0.0);
}

double log_width(const LogCoordinate& lo, const LogCoordinate& hi) noexcept {
  const double ratio = static_cast<double>(hi.d) / static_cast<double>(lo.d);
  const int shift = (lo.halved ? 1 : 0) - (hi.halved ? 1 : 0);
  return std::log(ratio) + shift * kLog2;
}

bool BoxUnion::well_formed() const noexcept {
  return std::all_of(boxes.begin(), boxes.end(), [this](const Box& b) {
    for (std::size_t i = 0; i < k; ++i) {
      if (!(b.lo[i] < b.hi[i])) return false;
    }
    return true;
  });
}

std::uint64_t tau_chain(const FactoredTuple& a) {
  const ExponentTable table(a);
  const std::size_t k = a.k();
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < table.primes.size(); ++j) {
    // ways[F]: number of exponent choices so far whose running sum is F.
    std::vector<std::uint64_t> ways{1};
    std::uint32_t cap = 0;
    for (std::size_t i = 0; i < k; ++i) {
      cap += table.exps[i][j];
      std::vector<std::uint64_t> next(cap + 1, 0);
      for (std::size_t f = 0; f < ways.size(); ++f) {
        if (ways[f] == 0) continue;
        for (std::size_t g = f; g <= cap; ++g) next[g] += ways[f];
      }
      ways = std::move(next);
    }
    std::uint64_t count = 0;
    for (auto w : ways) count += w;
    total = checked_mul(total, count);
  }
  return total;
}

void for_each_chain(const FactoredTuple& a,
                    const std::function<void(std::span<const std::uint64_t>)>& fn,
                    std::uint64_t cap) {
  const std::uint64_t tau = tau_chain(a);
  if (tau > cap) throw EnumerationOverflow(tau, cap);
  ChainWalker walker(a, {}, {});
  walker.run(fn);
}

ChainSet divisor_chains(const FactoredTuple& a, std::uint64_t cap) {
  ChainSet out;
  out.k = a.k();
  const std::uint64_t tau = tau_chain(a);
  if (tau > cap) throw EnumerationOverflow(tau, cap);
  out.d.reserve(tau * a.k());
  ChainWalker walker(a, {}, {});
  walker.run([&](std::span<const std::uint64_t> d) {
    out.d.insert(out.d.end(), d.begin(), d.end());
  });
  return out;
}

std::uint64_t tau_chain_window(const FactoredTuple& a, std::span<const double> y,
                               std::span<const double> z) {
  if (y.size() != a.k() || z.size() != a.k()) {
    throw InvalidArgument("window vectors must have length k");
  }
  for (std::size_t i = 0; i < a.k(); ++i) {
    if (!(y[i] < z[i])) throw InvalidArgument("window requires y_i < z_i");
  }
  std::uint64_t count = 0;
  ChainWalker walker(a, y, z);
  walker.run([&](std::span<const std::uint64_t>) { ++count; });
  return count;
}

BoxUnion build_l_boxes(const FactoredTuple& a, std::uint64_t cap) {
  if (a.k() > kMaxDimension) {
    throw UnsupportedDimension("dimension " + std::to_string(a.k()) +
                               " above supported maximum " +
                               std::to_string(kMaxDimension));
  }
  BoxUnion u;
  u.k = a.k();
  const std::uint64_t tau = tau_chain(a);
  if (tau > cap) throw EnumerationOverflow(tau, cap);
  u.boxes.reserve(tau);
  ChainWalker walker(a, {}, {});
  walker.run([&](std::span<const std::uint64_t> d) {
    Box b;
    for (std::size_t i = 0; i < d.size(); ++i) {
      b.lo[i] = {d[i], true};
      b.hi[i] = {d[i], false};
    }
    u.boxes.push_back(b);
  });
  return u;
}

double box_union_volume(const BoxUnion& u, std::size_t max_dim) {
  if (u.k > max_dim || u.k > kMaxDimension) {
    throw UnsupportedDimension("box union of dimension " + std::to_string(u.k) +
                               " above cap " + std::to_string(max_dim));
  }
  if (u.k == 0) return u.boxes.empty() ? 0.0 : 1.0;
  return UnionMeasure(u)();
}

double l_volume(const FactoredTuple& a, std::uint64_t cap) {
  return box_union_volume(build_l_boxes(a, cap));
}

LBounds l_bounds(const FactoredTuple& a) {
  const double k = static_cast<double>(a.k());
  LBounds b{};
  b.tau_bound = static_cast<double>(tau_chain(a)) * std::pow(kLog2, k);
  const auto logs = a.log_prefix_products();
  b.log_bound = 1.0;
  for (std::size_t i = 1; i < logs.size(); ++i) b.log_bound *= logs[i] + kLog2;
  b.bound_a = std::min(b.tau_bound, b.log_bound);
  return b;
}

double l_product_bound(const FactoredTuple& a, const FactoredTuple& b,
                             std::uint64_t cap) {
  if (a.k() != b.k()) throw InvalidArgument("tuple dimensions differ");
  if (gcd(a.product(), b.product()) != 1) {
    throw InvalidArgument("product bound needs coprime supports");
  }
  return static_cast<double>(tau_chain(a)) * l_volume(b, cap);
}

bool is_admissible_zseq(std::span<const int> z) {
  const int k = static_cast<int>(z.size());
  int prev = 0;
  for (int i = 1; i <= k; ++i) {
    const int zi = z[i - 1];
    if (zi < prev || zi > k || zi < i - 1) return false;
    prev = zi;
  }
  return true;
}

std::vector<std::vector<int>> admissible_zseqs(std::size_t k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k, 0);
  const int kk = static_cast<int>(k);
  std::function<void(int, int)> rec = [&](int i, int lo) {
    if (i > kk) {
      out.push_back(cur);
      return;
    }
    for (int v = std::max(lo, i - 1); v <= kk; ++v) {
      cur[i - 1] = v;
      rec(i + 1, v);
    }
  };
  rec(1, 0);
  return out;
}

double conv_ineq_bound(const FactoredTuple& a, std::span<const int> zseq) {
  const std::size_t k = a.k();
  if (zseq.size() != k || !is_admissible_zseq(zseq)) {
    throw InvalidArgument("inadmissible z-sequence for the convolution bound");
  }
  if (!a.jointly_squarefree()) {
    throw InvalidArgument("convolution bound needs mu^2(a_1...a_k) = 1");
  }
  const int kk = static_cast<int>(k);
  // First branch of the min does not depend on d.
  const auto logs = a.log_prefix_products();
  double first = 1.0;
  for (int j = 0; j <= kk; ++j) {
    const int zj = j == 0 ? 0 : zseq[j - 1];
    const int zn = j == kk ? kk : zseq[j];
    first *= std::pow(logs[j] + kLog2, zn - zj);
  }
  const double log2k = std::pow(kLog2, kk);

  // Group the divisors d_j | a_j by s_j = omega(d_j): C(omega(a_j), s_j) each.
  std::vector<std::uint32_t> om(k);
  for (std::size_t j = 0; j < k; ++j) om[j] = a.part(j).omega();
  auto ipow = [](double base, std::uint32_t e) {
    return e == 0 ? 1.0 : std::pow(base, static_cast<double>(e));  // 0^0 = 1
  };
  double total = 0.0;
  std::vector<std::uint32_t> s(k, 0);
  std::function<void(std::size_t, double, double)> rec =
      [&](std::size_t j, double weight, double second) {
        if (j == k) {
          total += weight * std::min(first, log2k * second);
          return;
        }
        const int jj = static_cast<int>(j) + 1;
        const double inner = zseq[j] - jj + 1;
        const double outer = kk - zseq[j] + 1;
        for (std::uint32_t sj = 0; sj <= om[j]; ++sj) {
          const double w = static_cast<double>(binomial(om[j], sj)) * ipow(inner, sj);
          if (w == 0.0) continue;
          rec(j + 1, weight * w, second * ipow(outer, om[j] - sj));
        }
      };
  rec(0, 1.0, 1.0);
  return total;
}

double w_moment(const FactoredTuple& a, double p, std::uint64_t cap) {
  if (!(p > 1.0 && p <= 2.0)) throw InvalidArgument("w_moment needs 1 < P <= 2");
  ChainSet chains = divisor_chains(a, cap);
  const std::size_t k = chains.k;
  const std::size_t n = chains.size();
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  if (k == 0) return static_cast<double>(n);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return chains[x][0] < chains[y][0];
  });
  std::vector<std::uint64_t> first(n);
  for (std::size_t t = 0; t < n; ++t) first[t] = chains[order[t]][0];

  auto close = [](std::uint64_t u, std::uint64_t v) {
    const auto uu = static_cast<unsigned __int128>(u);
    const auto vv = static_cast<unsigned __int128>(v);
    return uu < 2 * vv && vv < 2 * uu;
  };
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto d = chains[order[t]];
    // d'_1 ranges over (d_1/2, 2 d_1).
    auto lo = std::upper_bound(first.begin(), first.end(), d[0] / 2);
    std::uint64_t neighbours = 0;
    for (auto it = lo; it != first.end(); ++it) {
      if (!close(*it, d[0])) {
        if (*it > d[0]) break;
        continue;
      }
      const auto e = chains[order[static_cast<std::size_t>(it - first.begin())]];
      bool ok = true;
      for (std::size_t i = 1; i < k && ok; ++i) ok = close(d[i], e[i]);
      if (ok) ++neighbours;
    }
    total += std::pow(static_cast<double>(neighbours), p - 1.0);
  }
  return total;
}

}  // namespace multab
