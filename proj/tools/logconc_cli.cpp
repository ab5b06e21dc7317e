// logconc: table generation, verification suites and constant fits.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "logconc/logconc.h"

namespace {

enum Exit { kOk = 0, kFailRecords = 1, kUsage = 2, kError = 3 };

struct Flags {
  std::string config;
  std::optional<std::string> series;
  std::optional<unsigned> K;
  std::optional<std::size_t> N;
  std::optional<long> bits;
  std::optional<std::string> cache_dir;
  std::optional<std::string> out;
  std::optional<unsigned> jobs;
  std::optional<double> tolerance;
  bool quiet = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its keys");
  app->add_option("--series", f.series,
                  "series id: geometric[:c], constant:C, sigma-shifted, sigma, file:PATH");
  app->add_option("-K", f.K, "largest power k");
  app->add_option("-N", f.N, "truncation order / n range");
  app->add_option("--bits", f.bits, "working precision in bits");
  app->add_option("--cache-dir", f.cache_dir, "table cache directory");
  app->add_option("--out", f.out, "directory for reports and dumps");
  app->add_option("--jobs", f.jobs, "worker threads");
  app->add_option("--tolerance", f.tolerance, "relative stability tolerance for fitted constants");
  app->add_flag("-q,--quiet", f.quiet, "no progress lines on stderr");
}

/// Config file contents with the given flags layered on top.
nlohmann::json merged_config(const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + f.config);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ValidationError("--config", e.what());
    }
    if (!j.is_object()) throw CLI::ValidationError("--config", "top level must be an object");
  }
  if (f.series) j["series"] = *f.series;
  if (f.K) j["K"] = *f.K;
  if (f.N) j["N"] = *f.N;
  if (f.bits) j["precision_bits"] = *f.bits;
  if (f.cache_dir) j["cache_dir"] = *f.cache_dir;
  if (f.out) j["output"] = *f.out;
  if (f.jobs) j["jobs"] = *f.jobs;
  if (f.tolerance) j["tolerance"] = *f.tolerance;
  return j;
}

void log_line(const char* line, void* user) {
  if (!*static_cast<bool*>(user)) std::fprintf(stderr, "%s\n", line);
}

int finish(lc_status s, char* result, bool print_result) {
  if (result) {
    if (print_result) std::printf("%s\n", result);
    lc_string_free(result);
  }
  switch (s) {
    case LC_OK: return kOk;
    case LC_CHECK_FAILED: return kFailRecords;
    case LC_ERR_INVALID_ARGUMENT:
      std::fprintf(stderr, "usage error: %s\n", lc_last_error());
      return kUsage;
    default:
      std::fprintf(stderr, "error (%s): %s\n", lc_status_name(s), lc_last_error());
      return kError;
  }
}

void print_summary(const char* report_json) {
  const auto j = nlohmann::json::parse(report_json);
  for (const auto& r : j["records"]) {
    std::string line = r["status"].get<std::string>() + "  " + r["id"].get<std::string>();
    std::printf("%s\n", line.c_str());
  }
  const auto& s = j["summary"];
  std::printf("suite %s: %d pass, %d fail, %d reported\n", j["suite"].get<std::string>().c_str(),
              s["pass"].get<int>(), s["fail"].get<int>(), s["reported"].get<int>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-concavity toolkit for powers of power series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lc_version()));

  Flags gen_flags, check_flags, const_flags;
  auto* gen = app.add_subcommand("gen-table", "build (or reuse) the cached table of f^1..f^K");
  add_common(gen, gen_flags);

  auto* check = app.add_subcommand("check", "run a verification suite");
  std::string suite;
  check->add_option("suite", suite, "prefix | breakpoints | decomposition | saddle | nk | growth")->required();
  add_common(check, check_flags);
  bool json_out = false;
  check->add_flag("--json", json_out, "print the full report instead of the summary");

  auto* constants = app.add_subcommand("constants", "fit constants from residual dumps and saddle manifests");
  add_common(constants, const_flags);
  bool const_json = false;
  constants->add_flag("--json", const_json, "print the full report instead of the summary");

  auto* cache = app.add_subcommand("cache", "inspect or clear the table cache");
  cache->require_subcommand(1);
  std::string cache_dir = "logconc-cache";
  auto* ls = cache->add_subcommand("ls", "list cached tables");
  ls->add_option("--cache-dir", cache_dir, "table cache directory");
  auto* rm = cache->add_subcommand("rm", "remove cached tables");
  rm->add_option("--cache-dir", cache_dir, "table cache directory");
  std::optional<std::string> rm_series;
  std::optional<unsigned> rm_K;
  std::optional<std::size_t> rm_N;
  bool rm_all = false;
  rm->add_option("--series", rm_series, "only this series id");
  rm->add_option("-K", rm_K, "only this K");
  rm->add_option("-N", rm_N, "only this N");
  rm->add_flag("--all", rm_all, "remove every cached table");

  try {
    app.parse(argc, argv);
    if (*gen) {
      const auto cfg = merged_config(gen_flags).dump();
      char* res = nullptr;
      const auto s = lc_run_gen_table(cfg.c_str(), log_line, &gen_flags.quiet, &res);
      return finish(s, res, true);
    }
    if (*check) {
      const auto cfg = merged_config(check_flags).dump();
      char* res = nullptr;
      const auto s = lc_run_check(cfg.c_str(), suite.c_str(), log_line, &check_flags.quiet, &res);
      if (res && !json_out) {
        print_summary(res);
        return finish(s, res, false);
      }
      return finish(s, res, true);
    }
    if (*constants) {
      const auto cfg = merged_config(const_flags).dump();
      char* res = nullptr;
      const auto s = lc_run_constants(cfg.c_str(), log_line, &const_flags.quiet, &res);
      if (res && !const_json) {
        print_summary(res);
        return finish(s, res, false);
      }
      return finish(s, res, true);
    }
    if (*ls) {
      char* res = nullptr;
      const auto s = lc_cache_list(cache_dir.c_str(), &res);
      return finish(s, res, true);
    }
    if (*rm) {
      if (!rm_all && !rm_series && !rm_K && !rm_N)
        throw CLI::ValidationError("cache rm", "give --series/-K/-N filters or --all");
      if (rm_K && *rm_K == 0) throw CLI::ValidationError("-K", "must be positive");
      if (rm_N && *rm_N == 0) throw CLI::ValidationError("-N", "must be positive");
      std::size_t removed = 0;
      const auto s = lc_cache_remove(cache_dir.c_str(), rm_series ? rm_series->c_str() : nullptr, rm_K.value_or(0),
                                     rm_N.value_or(0), &removed);
      if (s == LC_OK) std::printf("removed %zu\n", removed);
      return finish(s, nullptr, false);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kUsage;
}
