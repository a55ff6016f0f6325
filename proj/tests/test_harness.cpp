#include <doctest.h>

#include <cstdlib>

#include "multab/errors.hpp"
#include "multab/harness.hpp"
#include "multab/suites.hpp"

using namespace multab;

TEST_CASE("config parsing") {
  const auto c = ExperimentConfig::from_json(
      Json::parse(R"({"experiment":"E3","seed":5,"x":[2000],"y":[[10]],"format":"csv"})"));
  CHECK(c.experiment == "E3");
  CHECK(c.seed == 5);
  CHECK(c.format == OutputFormat::csv);
  CHECK(c.grid.contains("x"));
  CHECK_THROWS_AS(ExperimentConfig::from_json(Json::parse(R"({"seed":1})")), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(Json::parse(R"({"experiment":"E1","seed":"x"})")),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_format("xml"), InvalidArgument);
}

TEST_CASE("empty grid and unknown experiment are rejected") {
  auto c = ExperimentConfig::from_json(Json::parse(R"({"experiment":"E1","log2_n":[]})"));
  CHECK_THROWS_AS(run_experiment(c), InvalidArgument);
  c = ExperimentConfig::from_json(Json::parse(R"({"experiment":"E9"})"));
  CHECK_THROWS_AS(run_experiment(c), InvalidArgument);
}

TEST_CASE("E1 rows and resource-limit rows") {
  auto c = ExperimentConfig::from_json(
      Json::parse(R"({"experiment":"E1","log2_n":[12,10,11],"budget_bits":8388608})"));
  const auto rows = run_experiment(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].params["log2_n"] == 10);
  CHECK(rows[2].params["log2_n"] == 12);
  CHECK(rows[0].status == "ok");
  std::vector<bool> seen(1 << 20);
  std::uint64_t distinct = 0;
  for (std::uint64_t a = 1; a <= 1024; ++a) {
    for (std::uint64_t b = 1; b <= 1024; ++b) {
      if (!seen[a * b - 1]) seen[a * b - 1] = true, ++distinct;
    }
  }
  CHECK(rows[0].values["A"] == distinct);
  CHECK(rows[2].status == "resource-limit");
  CHECK(rows[2].values["required"].get<std::uint64_t>() == (1ull << 24) / 8);
}

TEST_CASE("records render as JSON lines and CSV without meta") {
  ResultRecord r;
  r.experiment = "E1";
  r.params = {{"N", 4}};
  r.values = {{"A", 9}, {"note", "a,b"}};
  r.meta = {{"runtime_ms", 1.5}};
  const auto j = render_records({r}, OutputFormat::jsonl, false);
  CHECK(j.find("runtime_ms") == std::string::npos);
  CHECK(Json::parse(j)["values"]["A"] == 9);
  const auto csv = render_records({r}, OutputFormat::csv, true);
  CHECK(csv.find("experiment,seed,status,error,") == 0);
  CHECK(csv.find("\"a,b\"") != std::string::npos);
  CHECK(csv.find("meta.runtime_ms") != std::string::npos);
}

TEST_CASE("sieve limit environment variable") {
  ::setenv(kSieveLimitEnv, "12345", 1);
  CHECK(default_sieve_limit() == 12345);
  ::setenv(kSieveLimitEnv, "12x", 1);
  CHECK_THROWS_AS(default_sieve_limit(), InvalidArgument);
  ::unsetenv(kSieveLimitEnv);
  CHECK(default_sieve_limit(77) == 77);
}

TEST_CASE("suite registry") {
  CHECK(suite_registry().size() == 22);
  CHECK_THROWS_AS(run_suite("nope", {}), InvalidArgument);
  CHECK(run_suite("constants", {}).passed);
}
