#pragma once

// Experiment orchestration: flat JSON configs, per-point result records,
// JSON-lines and CSV emission.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace multab {

using Json = nlohmann::json;

enum class OutputFormat { jsonl, csv };

OutputFormat parse_format(const std::string& s);

inline constexpr const char* kSieveLimitEnv = "MULTAB_SIEVE_LIMIT";

/// Sieve limit from MULTAB_SIEVE_LIMIT, or fallback when unset.
/// Throws InvalidArgument on a malformed value.
std::uint32_t default_sieve_limit(std::uint32_t fallback = 10'000'000);

struct ExperimentConfig {
  std::string experiment;       // E1 .. E6
  std::uint64_t seed = 0;
  std::uint32_t sieve_limit = 0;  // 0: environment / built-in default
  std::uint64_t budget_bits = std::uint64_t{1} << 33;
  unsigned workers = 1;
  OutputFormat format = OutputFormat::jsonl;
  std::string output;           // empty: stdout
  Json grid = Json::object();   // experiment-specific keys

  /// Reads the flat document; unknown top-level keys become grid entries.
  static ExperimentConfig from_json(const Json& doc);
  static ExperimentConfig from_file(const std::string& path);
};

struct ResultRecord {
  std::string experiment;
  std::uint64_t seed = 0;
  Json params = Json::object();
  Json values = Json::object();
  std::string status = "ok";    // ok | resource-limit | error
  std::string error;
  Json meta = Json::object();   // runtime and other non-deterministic fields

  Json to_json(bool with_meta = true) const;
};

/// Runs every grid point, records per-point failures in-row, and returns
/// the records sorted by parameter tuple. Throws InvalidArgument for an
/// unknown experiment or an empty grid.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

void write_records(std::ostream& os, const std::vector<ResultRecord>& records,
                   OutputFormat fmt, bool with_meta = true);

std::string render_records(const std::vector<ResultRecord>& records, OutputFormat fmt,
                           bool with_meta = true);

}  // namespace multab
