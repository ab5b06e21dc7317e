#include "logconc/logconc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "logconc/error.hpp"
#include "logconc/logconcavity.hpp"
#include "logconc/report.hpp"
#include "logconc/sequences.hpp"
#include "logconc/series.hpp"
#include "logconc/suites.hpp"
#include "logconc/table_cache.hpp"

struct lc_series {
  logconc::TruncatedSeries f;
};

struct lc_table {
  logconc::PowerTable t;
};

namespace {

thread_local std::string g_last_error;

lc_status code_for(logconc::ErrorKind k) {
  using logconc::ErrorKind;
  switch (k) {
    case ErrorKind::invalid_argument: return LC_ERR_INVALID_ARGUMENT;
    case ErrorKind::resource: return LC_ERR_RESOURCE;
    case ErrorKind::precision: return LC_ERR_PRECISION;
    case ErrorKind::format: return LC_ERR_FORMAT;
    case ErrorKind::domain: return LC_ERR_DOMAIN;
    case ErrorKind::identity: return LC_ERR_IDENTITY;
    case ErrorKind::io: return LC_ERR_IO;
    case ErrorKind::internal: return LC_ERR_INTERNAL;
  }
  return LC_ERR_INTERNAL;
}

template <class Fn>
lc_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const logconc::Error& e) {
    g_last_error = e.what();
    return code_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LC_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LC_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

lc_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return LC_ERR_INVALID_ARGUMENT;
}

logconc::RunConfig parse_config(const char* config_json) {
  logconc::RunConfig cfg;
  if (config_json && *config_json) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      logconc::fail(logconc::ErrorKind::format, std::string("config: ") + e.what());
    }
    logconc::apply_overrides(cfg, j);
  }
  return cfg;
}

logconc::LogSink sink(lc_log_fn log, void* user) {
  if (!log) return [](const std::string&) {};
  return [log, user](const std::string& line) { log(line.c_str(), user); };
}

}  // namespace

extern "C" {

const char* lc_last_error(void) { return g_last_error.c_str(); }
const char* lc_version(void) { return logconc::kToolkitVersion; }

const char* lc_status_name(lc_status s) {
  switch (s) {
    case LC_OK: return "ok";
    case LC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case LC_ERR_RESOURCE: return "resource";
    case LC_ERR_PRECISION: return "precision";
    case LC_ERR_FORMAT: return "format";
    case LC_ERR_DOMAIN: return "domain";
    case LC_ERR_IDENTITY: return "identity";
    case LC_ERR_IO: return "io";
    case LC_ERR_INTERNAL: return "internal";
    case LC_CHECK_FAILED: return "check_failed";
  }
  return "unknown";
}

void lc_string_free(char* s) { std::free(s); }

lc_status lc_series_generate(const char* series_id, size_t order, lc_series** out) {
  if (!series_id) return null_arg("series_id");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto spec = logconc::SeriesSpec::parse(series_id);
    *out = new lc_series{logconc::generate(spec, order)};
    return LC_OK;
  });
}

lc_status lc_series_from_file(const char* path, size_t order, lc_series** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    logconc::SeriesSpec spec;
    spec.kind = logconc::SeriesKind::custom_file;
    spec.path = path;
    *out = new lc_series{logconc::generate(spec, order)};
    return LC_OK;
  });
}

void lc_series_free(lc_series* s) { delete s; }

size_t lc_series_order(const lc_series* s) { return s ? s->f.order() : 0; }

lc_status lc_series_coeff(const lc_series* s, size_t n, char** out) {
  if (!s) return null_arg("series");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = dup(logconc::to_fraction_string(s->f.at(n)));
    return LC_OK;
  });
}

lc_status lc_series_mul(const lc_series* a, const lc_series* b, size_t order, lc_series** out) {
  if (!a || !b) return null_arg("series");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new lc_series{logconc::series_mul(a->f, b->f, order)};
    return LC_OK;
  });
}

lc_status lc_series_pow(const lc_series* f, unsigned k, size_t order, lc_series** out) {
  if (!f) return null_arg("series");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new lc_series{logconc::series_pow(f->f, k, order)};
    return LC_OK;
  });
}

lc_status lc_series_derivative(const lc_series* f, unsigned i, lc_series** out) {
  if (!f) return null_arg("series");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new lc_series{logconc::derivative(f->f, i)};
    return LC_OK;
  });
}

lc_status lc_table_build(const lc_series* f, unsigned K, size_t N, lc_table** out) {
  if (!f) return null_arg("series");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new lc_table{logconc::power_table(f->f, K, N)};
    return LC_OK;
  });
}

void lc_table_free(lc_table* t) { delete t; }

lc_status lc_table_coeff(const lc_table* t, unsigned k, size_t n, char** out) {
  if (!t) return null_arg("table");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = dup(logconc::to_fraction_string(t->t.row(k).at(n)));
    return LC_OK;
  });
}

lc_status lc_table_save(const lc_table* t, const char* series_id, const char* path) {
  if (!t) return null_arg("table");
  if (!series_id || !path) return null_arg("series_id/path");
  return guarded([&] {
    logconc::save_table(path, t->t, series_id);
    return LC_OK;
  });
}

lc_status lc_table_load(const char* path, lc_table** out, char** series_id) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto tf = logconc::load_table(path);
    if (series_id) *series_id = dup(tf.series_id);
    *out = new lc_table{std::move(tf.table)};
    return LC_OK;
  });
}

unsigned lc_table_K(const lc_table* t) { return t ? t->t.K() : 0; }
size_t lc_table_N(const lc_table* t) { return t ? t->t.N() : 0; }

lc_status lc_table_first_violation(const lc_table* t, unsigned k, long* out) {
  if (!t) return null_arg("table");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto r = logconc::logconcave_prefix(t->t.row(k));
    *out = r.first_violation ? static_cast<long>(*r.first_violation) : -1;
    return LC_OK;
  });
}

lc_status lc_run_gen_table(const char* config_json, lc_log_fn log, void* user, char** result_json) {
  if (!result_json) return null_arg("result_json");
  return guarded([&] {
    auto cfg = parse_config(config_json);
    *result_json = dup(logconc::cmd_gen_table(cfg, sink(log, user)).dump(2));
    return LC_OK;
  });
}

lc_status lc_run_check(const char* config_json, const char* suite, lc_log_fn log, void* user, char** result_json) {
  if (!suite) return null_arg("suite");
  if (!result_json) return null_arg("result_json");
  return guarded([&] {
    auto cfg = parse_config(config_json);
    auto rep = logconc::cmd_check(cfg, suite, sink(log, user));
    *result_json = dup(rep.to_json().dump(2));
    return rep.any_fail() ? LC_CHECK_FAILED : LC_OK;
  });
}

lc_status lc_run_constants(const char* config_json, lc_log_fn log, void* user, char** result_json) {
  if (!result_json) return null_arg("result_json");
  return guarded([&] {
    auto cfg = parse_config(config_json);
    auto rep = logconc::cmd_constants(cfg, sink(log, user));
    *result_json = dup(rep.to_json().dump(2));
    return rep.any_fail() ? LC_CHECK_FAILED : LC_OK;
  });
}

lc_status lc_cache_list(const char* cache_dir, char** result_json) {
  if (!cache_dir) return null_arg("cache_dir");
  if (!result_json) return null_arg("result_json");
  return guarded([&] {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& e : logconc::cache_list(cache_dir)) {
      nlohmann::ordered_json j;
      j["path"] = e.path.string();
      j["readable"] = e.readable;
      if (e.readable) {
        j["series_id"] = e.series_id;
        j["K"] = e.K;
        j["N"] = e.N;
        j["format_version"] = e.format_version;
      }
      j["bytes"] = e.bytes;
      a.push_back(std::move(j));
    }
    *result_json = dup(a.dump(2));
    return LC_OK;
  });
}

lc_status lc_cache_remove(const char* cache_dir, const char* series_id, unsigned K, size_t N, size_t* removed) {
  if (!cache_dir) return null_arg("cache_dir");
  return guarded([&] {
    std::optional<std::string> sid;
    if (series_id) sid = series_id;
    std::optional<unsigned> k;
    if (K) k = K;
    std::optional<std::size_t> n;
    if (N) n = N;
    const std::size_t r = logconc::cache_remove(cache_dir, sid, k, n);
    if (removed) *removed = r;
    return LC_OK;
  });
}

lc_status lc_check_suites(char** result_json) {
  if (!result_json) return null_arg("result_json");
  return guarded([&] {
    *result_json = dup(nlohmann::json(logconc::check_suites()).dump());
    return LC_OK;
  });
}

}  // extern "C"
