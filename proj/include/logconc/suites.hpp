#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logconc/rational.hpp"
#include "logconc/report.hpp"
#include "logconc/series.hpp"

namespace logconc {

using LogSink = std::function<void(const std::string&)>;

/// Everything a command needs. Loaded from a JSON file, then overridden by
/// command-line flags; see apply_overrides.
struct RunConfig {
  std::string series = "sigma-shifted";
  unsigned K = 8;
  std::size_t N = 500;
  long precision_bits = 256;
  std::filesystem::path cache_dir = "logconc-cache";
  std::filesystem::path output = "logconc-out";
  unsigned jobs = 1;
  double tolerance = 0.10;  // relative stability tolerance for fitted constants

  // command-specific options; empty means "choose from the series"
  std::optional<Rational> C;
  std::optional<Rational> alpha;
  std::size_t identity_n = 60;      // decomposition: n range of the exact identities
  unsigned bruteforce_k = 5;        // decomposition: brute-force tuple oracle up to this k
  std::vector<unsigned> residual_ks = {3, 5, 8};
  std::vector<std::pair<unsigned, unsigned>> saddle_points = {{10, 50}, {20, 200}, {40, 1000}};
  long saddle_bits = 128;
  double quad_tolerance = 1e-12;
  std::size_t nk_spotcheck_N = 60;
  std::size_t max_table_bytes = std::size_t(3) << 30;

  /// Throws Error(invalid_argument) on K = 0, N = 0, an unknown series id and
  /// similar misconfiguration.
  void validate() const;
  nlohmann::ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

RunConfig load_config(const std::filesystem::path& path);
/// Keys in `flags` replace the corresponding fields; the caller passes only
/// the flags that were given, so flags always win over the file.
void apply_overrides(RunConfig& cfg, const nlohmann::json& flags);

inline const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> s = {"prefix", "breakpoints", "decomposition", "saddle", "nk", "growth"};
  return s;
}

struct TableSource {
  PowerTable table;
  std::filesystem::path path;
  bool cache_hit = false;
  bool rebuilt_corrupt = false;
  std::vector<std::uint64_t> checksums;
};

/// Loads (series, K, N) from the cache or builds and stores it. A cache file
/// that fails to parse is rebuilt with a warning on `log`.
TableSource obtain_table(const std::string& series_id, unsigned K, std::size_t N,
                         const std::filesystem::path& cache_dir, std::size_t max_bytes, const LogSink& log);

nlohmann::ordered_json cmd_gen_table(const RunConfig& cfg, const LogSink& log);

/// Runs the suite and writes <output>/check-<suite>.json plus any CSV dumps.
/// Throws Error(invalid_argument) listing the suites for an unknown name.
VerificationReport cmd_check(const RunConfig& cfg, std::string_view suite, const LogSink& log);

/// Aggregates residual CSV dumps and saddle manifests found in <output>.
VerificationReport cmd_constants(const RunConfig& cfg, const LogSink& log);

struct CacheEntry {
  std::filesystem::path path;
  std::string series_id;
  unsigned K = 0;
  std::size_t N = 0;
  int format_version = 0;
  std::uintmax_t bytes = 0;
  bool readable = true;
};

std::vector<CacheEntry> cache_list(const std::filesystem::path& cache_dir);
/// Removes entries matching the filter (empty optional matches anything).
/// Returns the number of files removed.
std::size_t cache_remove(const std::filesystem::path& cache_dir, std::optional<std::string> series_id,
                         std::optional<unsigned> K, std::optional<std::size_t> N);

/// Writes `report` to `path` (pretty JSON, trailing newline).
void write_report(const std::filesystem::path& path, const VerificationReport& report);

}  // namespace logconc
