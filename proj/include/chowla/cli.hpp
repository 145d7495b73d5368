#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chowla/moment_lab.hpp"
#include "chowla/sieve.hpp"

namespace chowla {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable naming a default LIOUSPF1 cache.
inline constexpr const char* kSieveCacheEnv = "CHOWLA_SIEVE_CACHE";

/// Ensembles above this size switch to Monte Carlo under --mode auto.
inline constexpr std::uint64_t kMonteCarloThreshold = 100'000'000;

/// Largest sieve the CLI builds on its own (400 MB of table).
inline constexpr std::uint64_t kAutoSieveCap = 100'000'000;

/// Every parameter of a run. Serialized verbatim into each report.
struct RunConfig {
  std::string subcommand;

  std::uint64_t limit = 0;

  std::vector<int> degrees = {1};
  std::int64_t height = 1;
  double x = 10.0;
  int k_max = 2;
  std::string weights = "ones";
  std::string degree_mode = "exact";
  std::string mode = "auto";
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  double y = 1.0;
  int m = 1;

  int d = 1;
  int L = 1;
  std::vector<std::int64_t> points = {1};
  std::optional<double> tol;
  std::uint64_t oversample = 1;

  std::uint64_t grid = 0;

  std::string format = "json";
  std::string out;
  unsigned workers = 1;
  bool force = false;
  std::uint64_t budget = 100'000'000;
  std::string sieve_cache;
  bool timing = true;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

struct CommandResult {
  nlohmann::json report;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  bool passed = true;
};

/// Writes the LIOUSPF1 cache for config.limit to config.out.
CommandResult cmd_sieve(const RunConfig& config);
CommandResult cmd_moments(const RunConfig& config);
CommandResult cmd_verify_identity(const RunConfig& config);
CommandResult cmd_davenport(const RunConfig& config);
CommandResult cmd_exceedance(const RunConfig& config);
CommandResult cmd_probe(const RunConfig& config);

/// Dispatches on config.subcommand.
CommandResult run_command(const RunConfig& config);

/// Loads the configured or environment cache when present, otherwise builds
/// a sieve of min(required, kAutoSieveCap) entries. Values beyond the table
/// use the factorization fallback either way.
FactorSieve obtain_sieve(std::uint64_t required, const RunConfig& config);

/// JSON text (one object, LF-terminated) or CSV (header + rows).
std::string render(const CommandResult& result, const std::string& format);

/// Moment report rows as CSV-ready strings, in column order
/// spec, interval, k, raw_sum, empirical, predicted, ratio, stderr, count, elapsed_ms.
std::vector<std::string> moment_csv_header();
nlohmann::json moment_report_json(const MomentReport& report);

}  // namespace chowla
