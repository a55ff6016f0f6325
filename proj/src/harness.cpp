#include "multab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "multab/arith.hpp"
#include "multab/asymptotics.hpp"
#include "multab/counting.hpp"
#include "multab/errors.hpp"
#include "multab/suites.hpp"

namespace multab {

OutputFormat parse_format(const std::string& s) {
  if (s == "jsonl" || s == "json-lines" || s == "json") return OutputFormat::jsonl;
  if (s == "csv") return OutputFormat::csv;
  throw InvalidArgument("unknown format '" + s + "' (expected jsonl or csv)");
}

std::uint32_t default_sieve_limit(std::uint32_t fallback) {
  const char* env = std::getenv(kSieveLimitEnv);
  if (!env || !*env) return fallback;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || v < 2 || v > 0xFFFFFFFFull) {
    throw InvalidArgument(std::string(kSieveLimitEnv) + " must be an integer in [2, 2^32)");
  }
  return static_cast<std::uint32_t>(v);
}

ExperimentConfig ExperimentConfig::from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, val] : doc.items()) {
      if (key == "experiment") {
        c.experiment = val.get<std::string>();
      } else if (key == "seed") {
        c.seed = val.get<std::uint64_t>();
      } else if (key == "sieve_limit") {
        c.sieve_limit = val.get<std::uint32_t>();
      } else if (key == "budget_bits") {
        c.budget_bits = val.get<std::uint64_t>();
      } else if (key == "workers") {
        c.workers = std::max(1u, val.get<unsigned>());
      } else if (key == "format") {
        c.format = parse_format(val.get<std::string>());
      } else if (key == "output") {
        c.output = val.get<std::string>();
      } else {
        c.grid[key] = val;
      }
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
  if (c.experiment.empty()) throw InvalidArgument("config is missing 'experiment'");
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

Json ResultRecord::to_json(bool with_meta) const {
  Json j{{"experiment", experiment}, {"seed", seed},     {"params", params},
         {"values", values},         {"status", status}, {"error", error}};
  if (with_meta) j["meta"] = meta;
  return j;
}

namespace {

struct Point {
  Json params;
  std::function<Json()> run;
};

template <class T>
std::vector<T> grid_list(const Json& grid, const char* key, std::vector<T> fallback) {
  if (!grid.contains(key)) return fallback;
  try {
    return grid.at(key).get<std::vector<T>>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("grid key '") + key + "': " + e.what());
  }
}

double table_exponent() { return q_of(1.0 / std::log(2.0)); }

std::vector<Point> points_e1(const ExperimentConfig& cfg) {
  std::vector<int> logs = grid_list<int>(cfg.grid, "log2_n", {});
  if (!cfg.grid.contains("log2_n")) {
    for (int e = 10; e <= 22; ++e) logs.push_back(e);
  }
  std::vector<Point> pts;
  for (int e : logs) {
    if (e < 1 || e > 31) throw InvalidArgument("log2_n entries must lie in [1, 31]");
    const std::uint64_t n = std::uint64_t{1} << e;
    pts.push_back({{{"N", n}, {"log2_n", e}}, [n, &cfg] {
                     const std::vector<std::uint64_t> sides{n, n};
                     const auto a = count_A(sides, cfg.budget_bits, cfg.workers);
                     const double L = std::log(static_cast<double>(n));
                     const double ratio = static_cast<double>(a) * std::pow(L, table_exponent()) *
                                          std::pow(std::log(L), 1.5) /
                                          (static_cast<double>(n) * static_cast<double>(n));
                     return Json{{"A", a}, {"ratio", ratio}};
                   }});
  }
  return pts;
}

std::vector<Point> points_e2(const ExperimentConfig& cfg, const PrimeSieve& sieve) {
  const auto sides_list = grid_list<std::vector<std::uint64_t>>(
      cfg.grid, "sides", {{16, 16}, {32, 64}, {64, 64}, {100, 200}, {8, 8, 8}, {16, 16, 32}});
  std::vector<Point> pts;
  for (const auto& sides : sides_list) {
    if (sides.size() < 2) throw InvalidArgument("each sides entry needs at least two values");
    pts.push_back({{{"sides", sides}}, [sides, &cfg, &sieve] {
                     std::vector<std::uint64_t> s = sides;
                     std::sort(s.begin(), s.end());
                     const std::size_t k = s.size() - 1;
                     std::uint64_t prod = 1;
                     std::vector<double> y(k), z(k);
                     for (std::size_t i = 0; i < k; ++i) {
                       prod = checked_mul(prod, s[i]);
                       y[i] = static_cast<double>(s[i]) / 2.0;
                       z[i] = static_cast<double>(s[i]);
                     }
                     const std::uint64_t x = checked_mul(prod, s[k]);
                     if (x > sieve.limit()) {
                       throw ResourceLimit("product exceeds sieve limit", x);
                     }
                     const auto sw = table_sandwich(sides, sieve, cfg.budget_bits);
                     const auto h = count_H(x, y, z, sieve, cfg.workers);
                     return Json{{"A", sw.a},
                                 {"H", h},
                                 {"ratio", static_cast<double>(sw.a) / static_cast<double>(h)},
                                 {"lower", sw.lower},
                                 {"upper", sw.upper}};
                   }});
  }
  return pts;
}

std::vector<Point> points_e3(const ExperimentConfig& cfg, const PrimeSieve& sieve) {
  const auto xs = grid_list<std::uint64_t>(cfg.grid, "x", {2000, 4000, 8000});
  const auto ys = grid_list<std::vector<double>>(cfg.grid, "y", {{10.0}});
  const auto caps = grid_list<double>(cfg.grid, "caps", {});
  std::vector<Point> pts;
  for (const auto& y : ys) {
    for (auto x : xs) {
      Json params{{"x", x}, {"y", y}};
      if (!caps.empty()) params["caps"] = caps;
      pts.push_back({params, [x, y, caps, &cfg, &sieve] {
                       const auto r = local_global_ratio(x, y, caps, sieve, cfg.workers);
                       return Json{{"H", r.h_count},
                                   {"lhs", r.lhs},
                                   {"log_factor", r.log_ratio_factor},
                                   {"S", r.s.sum},
                                   {"S_tuples", r.s.tuples},
                                   {"S_half", r.s_half.sum},
                                   {"rhs", r.rhs},
                                   {"ratio", r.ratio},
                                   {"admissible", r.admissible}};
                     }});
    }
  }
  return pts;
}

Json suite_json(const SuiteResult& s) {
  return Json{{"passed", s.passed},
              {"checks", s.checks},
              {"violations", s.violations},
              {"worst", s.worst},
              {"details", s.details}};
}

std::vector<Point> points_suites(const ExperimentConfig& cfg, const PrimeSieve& sieve,
                                 std::vector<std::string> fallback) {
  const auto names = grid_list<std::string>(cfg.grid, "suites", std::move(fallback));
  const auto trials = cfg.grid.value("trials", std::uint64_t{0});
  const auto samples = cfg.grid.value("samples", std::uint64_t{0});
  std::vector<Point> pts;
  for (const auto& n : names) {
    if (!suite_registry().contains(n)) throw InvalidArgument("unknown suite '" + n + "'");
    pts.push_back({{{"suite", n}}, [n, trials, samples, &cfg, &sieve] {
                     SuiteParams p{cfg.seed, trials, samples, &sieve};
                     return suite_json(run_suite(n, p));
                   }});
  }
  return pts;
}

std::vector<Point> points_e6(const ExperimentConfig& cfg, const PrimeSieve& sieve) {
  const auto xs = grid_list<std::uint64_t>(cfg.grid, "x", {100000, 1000000});
  const auto ys = grid_list<std::vector<double>>(cfg.grid, "y", {{10.0}, {100.0}, {10.0, 100.0}});
  const double eps = cfg.grid.value("epsilon", 0.0);
  const double delta = cfg.grid.value("delta", 0.1);
  const double c = cfg.grid.value("c", 2.0);
  std::vector<Point> pts;
  for (const auto& y : ys) {
    for (auto x : xs) {
      pts.push_back({{{"x", x}, {"y", y}}, [x, y, eps, delta, c, &cfg, &sieve] {
                       std::vector<double> yi, z;
                       for (double v : y) {
                         yi.push_back(std::floor(v));
                         z.push_back(2.0 * std::floor(v));
                       }
                       const auto h = count_H(x, yi, z, sieve, cfg.workers);
                       const double measured = static_cast<double>(h) / static_cast<double>(x);
                       const auto prof = profile(yi);
                       Json pred = Json::object();
                       for (auto v : {DensityVariant::general, DensityVariant::small_k,
                                      DensityVariant::large_k, DensityVariant::equal_size}) {
                         DensityOptions opt;
                         opt.x = static_cast<double>(x);
                         opt.epsilon = eps;
                         opt.delta = delta;
                         opt.c = c;
                         const auto d = predicted_density(prof, v, opt);
                         pred[to_string(v)] = {{"value", d.value},
                                               {"ratio", measured / d.value},
                                               {"hypotheses_hold", d.hypotheses_hold},
                                               {"flags", d.flags}};
                       }
                       return Json{{"H", h},
                                   {"measured", measured},
                                   {"alpha", prof.alpha},
                                   {"beta", prof.beta},
                                   {"i0", prof.i0},
                                   {"i1", prof.i1},
                                   {"predicted", pred}};
                     }});
    }
  }
  if (cfg.grid.contains("suites")) {
    auto extra = points_suites(cfg, sieve, {});
    pts.insert(pts.end(), extra.begin(), extra.end());
  }
  return pts;
}

std::uint32_t needed_sieve(const ExperimentConfig& cfg) {
  std::uint64_t need = 1000;
  if (cfg.experiment == "E2") {
    for (const auto& s : grid_list<std::vector<std::uint64_t>>(cfg.grid, "sides", {{16, 16}, {32, 64}, {64, 64}, {100, 200}, {8, 8, 8}, {16, 16, 32}})) {
      std::uint64_t p = 1;
      for (auto v : s) p = checked_mul(p, v);
      need = std::max(need, p);
    }
  } else if (cfg.experiment == "E3" || cfg.experiment == "E6") {
    for (auto x : grid_list<std::uint64_t>(cfg.grid, "x", {1000000})) need = std::max(need, x);
  }
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(need, 0xFFFFFFFFull));
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  for (const char* key : {"log2_n", "sides", "x", "y", "suites"}) {
    if (cfg.grid.contains(key) && cfg.grid.at(key).is_array() && cfg.grid.at(key).empty()) {
      throw InvalidArgument(std::string("grid key '") + key + "' is empty");
    }
  }
  std::uint32_t limit = cfg.sieve_limit ? cfg.sieve_limit : default_sieve_limit();
  if (cfg.experiment == "E2" || cfg.experiment == "E3" || cfg.experiment == "E6") {
    // The counting experiments only need primes up to their largest x.
    if (!cfg.sieve_limit) limit = std::max<std::uint32_t>(needed_sieve(cfg), 200000);
  } else if (!cfg.sieve_limit) {
    limit = std::min<std::uint32_t>(limit, 200000);
  }
  const PrimeSieve sieve(limit);

  std::vector<Point> pts;
  if (cfg.experiment == "E1") {
    pts = points_e1(cfg);
  } else if (cfg.experiment == "E2") {
    pts = points_e2(cfg, sieve);
  } else if (cfg.experiment == "E3") {
    pts = points_e3(cfg, sieve);
  } else if (cfg.experiment == "E4") {
    pts = points_suites(cfg, sieve, {"volume_ie", "volume_mc", "l_bound", "l_product", "convolution",
                                     "holder", "cylinder", "counting"});
  } else if (cfg.experiment == "E5") {
    pts = points_suites(cfg, sieve, {"qr_closed", "qr_mc", "order_band", "composition_band",
                                     "slab_partition", "alpha_r", "slab_shape", "tail_sum"});
  } else if (cfg.experiment == "E6") {
    pts = points_e6(cfg, sieve);
  } else {
    throw InvalidArgument("unknown experiment '" + cfg.experiment + "' (expected E1..E6)");
  }
  if (pts.empty()) throw InvalidArgument("experiment grid is empty");

  std::vector<ResultRecord> out(pts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      ResultRecord& r = out[i];
      r.experiment = cfg.experiment;
      r.seed = cfg.seed;
      r.params = pts[i].params;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        r.values = pts[i].run();
      } catch (const ResourceLimit& e) {
        r.status = "resource-limit";
        r.error = e.what();
        r.values = Json{{"required", e.required()}};
      } catch (const std::exception& e) {
        r.status = "error";
        r.error = e.what();
      }
      const auto dt = std::chrono::steady_clock::now() - t0;
      r.meta["runtime_ms"] =
          std::chrono::duration_cast<std::chrono::microseconds>(dt).count() / 1000.0;
    }
  };
  const unsigned nthreads = std::min<std::size_t>(cfg.workers, pts.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::stable_sort(out.begin(), out.end(),
                   [](const ResultRecord& a, const ResultRecord& b) { return a.params < b.params; });
  return out;
}

namespace {

void flatten(const std::string& prefix, const Json& j, std::map<std::string, std::string>& row) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) flatten(prefix + "." + k, v, row);
    return;
  }
  row[prefix] = j.is_string() ? j.get<std::string>() : j.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_records(std::ostream& os, const std::vector<ResultRecord>& records, OutputFormat fmt,
                   bool with_meta) {
  if (fmt == OutputFormat::jsonl) {
    for (const auto& r : records) os << r.to_json(with_meta).dump() << '\n';
    return;
  }
  std::vector<std::map<std::string, std::string>> rows;
  std::set<std::string> cols;
  for (const auto& r : records) {
    std::map<std::string, std::string> row{{"experiment", r.experiment},
                                           {"seed", std::to_string(r.seed)},
                                           {"status", r.status},
                                           {"error", r.error}};
    flatten("params", r.params, row);
    flatten("values", r.values, row);
    if (with_meta) flatten("meta", r.meta, row);
    for (const auto& [k, v] : row) cols.insert(k);
    rows.push_back(std::move(row));
  }
  std::vector<std::string> order{"experiment", "seed", "status", "error"};
  for (const auto& c : cols) {
    if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
  }
  for (std::size_t i = 0; i < order.size(); ++i) os << (i ? "," : "") << csv_escape(order[i]);
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto it = row.find(order[i]);
      os << (i ? "," : "") << (it == row.end() ? "" : csv_escape(it->second));
    }
    os << '\n';
  }
}

std::string render_records(const std::vector<ResultRecord>& records, OutputFormat fmt,
                           bool with_meta) {
  std::ostringstream os;
  write_records(os, records, fmt, with_meta);
  return os.str();
}

}  // namespace multab
