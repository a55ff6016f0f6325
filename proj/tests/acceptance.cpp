// One line per criterion: "criterion N: PASS|FAIL <summary>". Exit status is
// nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "multab/harness.hpp"
#include "multab/suites.hpp"

using namespace multab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

const PrimeSieve& sieve() {
  static const PrimeSieve s(1'000'000);
  return s;
}

Outcome suites(std::initializer_list<const char*> names, std::uint64_t seed = 1) {
  Outcome o;
  std::ostringstream os;
  for (const char* n : names) {
    const auto r = run_suite(n, SuiteParams{seed, 0, 0, &sieve()});
    o.pass = o.pass && r.passed;
    os << n << " " << r.violations << "/" << r.checks << " worst=" << r.worst << "; ";
  }
  o.detail = os.str();
  return o;
}

Outcome ratio_spread(const std::vector<ResultRecord>& rows, double limit, const char* label,
                     std::ostringstream& os) {
  double lo = 1e300, hi = 0.0;
  bool ok = !rows.empty();
  for (const auto& r : rows) {
    if (r.status != "ok") {
      ok = false;
      continue;
    }
    const double v = r.values["ratio"].get<double>();
    if (!(v > 0)) ok = false;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double spread = hi / lo;
  ok = ok && spread < limit;
  os << label << " n=" << rows.size() << " ratio in [" << lo << ", " << hi
     << "] spread=" << spread << "; ";
  return {ok, ""};
}

Outcome criterion10() {
  // Admissible points with x = 10^6 for k = 1 and k = 2.
  auto k1 = ExperimentConfig::from_json(Json::parse(
      R"({"experiment":"E3","x":[1000000],"y":[[10],[20],[40],[80],[160],[320]]})"));
  auto k2 = ExperimentConfig::from_json(Json::parse(
      R"({"experiment":"E3","x":[1000000],
          "y":[[10,10],[10,20],[20,20],[20,40],[40,40],[10,80],[20,80],[10,100]]})"));
  const auto r1 = run_experiment(k1);
  const auto r2 = run_experiment(k2);
  bool admissible = true;
  for (const auto* rows : {&r1, &r2}) {
    for (const auto& r : *rows) admissible = admissible && r.values.value("admissible", false);
  }
  std::ostringstream os;
  const bool a = ratio_spread(r1, kLocalGlobalSpread, "k=1", os).pass;
  const bool b = ratio_spread(r2, kLocalGlobalSpread, "k=2", os).pass;
  std::vector<ResultRecord> all = r1;
  all.insert(all.end(), r2.begin(), r2.end());
  const bool c = ratio_spread(all, kLocalGlobalSpread, "pooled", os).pass;
  os << "admissible=" << (admissible ? "all" : "not all");
  return {a && b && c && admissible, os.str()};
}

Outcome criterion11() {
  auto cfg = ExperimentConfig::from_json(Json::parse(R"({"experiment":"E1"})"));
  const auto rows = run_experiment(cfg);
  std::ostringstream os;
  std::vector<ResultRecord> top;
  std::size_t limited = 0;
  for (const auto& r : rows) {
    if (r.params["log2_n"].get<int>() >= 16) top.push_back(r);
    limited += r.status == "resource-limit";
  }
  const bool ok = ratio_spread(top, kNormalizationSpread, "N>=2^16", os).pass;
  os << "rows=" << rows.size() << " resource-limit=" << limited;
  for (const auto& r : rows) {
    if (r.status == "ok") {
      os << " [2^" << r.params["log2_n"] << ": " << r.values["ratio"].get<double>() << "]";
    }
  }
  return {ok, os.str()};
}

Outcome criterion12() {
  const char* configs[] = {
      R"({"experiment":"E1","log2_n":[8,9,10],"workers":2})",
      R"({"experiment":"E2","sides":[[16,16],[8,8,8]],"workers":2})",
      R"({"experiment":"E3","x":[2000,4000,8000],"y":[[10]],"workers":3})",
      R"({"experiment":"E4","suites":["volume_mc","l_product"],"trials":5,"samples":20000,"seed":9,"workers":2})",
      R"({"experiment":"E5","suites":["qr_mc","alpha_r"],"trials":5,"samples":20000,"seed":9,"workers":2})",
      R"({"experiment":"E6","x":[20000],"y":[[10],[10,100]],"suites":["altbeta"],"trials":50,"workers":2})"};
  Outcome o;
  std::ostringstream os;
  for (const char* text : configs) {
    const auto cfg = ExperimentConfig::from_json(Json::parse(text));
    bool same = true;
    for (auto fmt : {OutputFormat::jsonl, OutputFormat::csv}) {
      const auto a = render_records(run_experiment(cfg), fmt, false);
      const auto b = render_records(run_experiment(cfg), fmt, false);
      same = same && a == b && !a.empty();
    }
    o.pass = o.pass && same;
    os << cfg.experiment << (same ? " identical; " : " DIFFERS; ");
  }
  o.detail = os.str();
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c{
      {1, "exact constants", 1, [] { return suites({"constants"}); }},
      {2, "alpha solver", 10, [] { return suites({"alpha"}); }},
      {3, "condition arithmetic", 1, [] { return suites({"conditions"}); }},
      {4, "monotonicity", 1, [] { return suites({"monotonicity"}); }},
      {5, "volume engine", 120, [] { return suites({"volume_ie", "volume_mc"}); }},
      {6, "geometry inequality suites", 300,
       [] { return suites({"l_bound", "l_product", "convolution", "holder", "cylinder"}); }},
      {7, "order statistics", 120,
       [] { return suites({"qr_closed", "qr_mc", "order_band", "composition_band"}); }},
      {8, "Poisson slabs", 120, [] { return suites({"slab_partition", "alpha_r", "slab_shape"}); }},
      {9, "counting cross-checks", 60, [] { return suites({"counting"}); }},
      {10, "local-global ratio", 600, criterion10},
      {11, "two-factor table normalization", 900, criterion11},
      {12, "determinism", 600, criterion12},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: multab_acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& c : criteria()) selected.push_back(c.id);
  }
  int failures = 0;
  for (int id : selected) {
    auto it = std::find_if(criteria().begin(), criteria().end(),
                           [&](const Criterion& c) { return c.id == id; });
    if (it == criteria().end()) {
      std::cerr << "no criterion " << id << "\n";
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= it->budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %d: %s %s (%.2fs of %.0fs%s) %s\n", it->id, pass ? "PASS" : "FAIL",
                it->title, secs, it->budget_s, in_time ? "" : ", over time", o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
