#ifndef LOGCONC_H
#define LOGCONC_H

#include <stddef.h>

#if defined(LOGCONC_BUILDING_LIBRARY)
#define LC_API __attribute__((visibility("default")))
#else
#define LC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lc_status {
  LC_OK = 0,
  LC_ERR_INVALID_ARGUMENT = 1,
  LC_ERR_RESOURCE = 2,
  LC_ERR_PRECISION = 3,
  LC_ERR_FORMAT = 4,
  LC_ERR_DOMAIN = 5,
  LC_ERR_IDENTITY = 6,
  LC_ERR_IO = 7,
  LC_ERR_INTERNAL = 8,
  /* a check suite ran and produced at least one "fail" record */
  LC_CHECK_FAILED = 9
} lc_status;

typedef struct lc_series lc_series;
typedef struct lc_table lc_table;

/* Message of the last error on the calling thread; never NULL. */
LC_API const char* lc_last_error(void);
LC_API const char* lc_version(void);
LC_API const char* lc_status_name(lc_status s);

/* Strings returned through char** out-parameters are owned by the caller. */
LC_API void lc_string_free(char* s);

/* ---- series ---- */
LC_API lc_status lc_series_generate(const char* series_id, size_t order, lc_series** out);
LC_API lc_status lc_series_from_file(const char* path, size_t order, lc_series** out);
LC_API void lc_series_free(lc_series* s);
LC_API size_t lc_series_order(const lc_series* s);
/* Coefficient n as "numerator/denominator". */
LC_API lc_status lc_series_coeff(const lc_series* s, size_t n, char** out);
LC_API lc_status lc_series_mul(const lc_series* a, const lc_series* b, size_t order, lc_series** out);
LC_API lc_status lc_series_pow(const lc_series* f, unsigned k, size_t order, lc_series** out);
LC_API lc_status lc_series_derivative(const lc_series* f, unsigned i, lc_series** out);

/* ---- power tables ---- */
LC_API lc_status lc_table_build(const lc_series* f, unsigned K, size_t N, lc_table** out);
LC_API void lc_table_free(lc_table* t);
LC_API lc_status lc_table_coeff(const lc_table* t, unsigned k, size_t n, char** out);
LC_API lc_status lc_table_save(const lc_table* t, const char* series_id, const char* path);
LC_API lc_status lc_table_load(const char* path, lc_table** out, char** series_id);
LC_API unsigned lc_table_K(const lc_table* t);
LC_API size_t lc_table_N(const lc_table* t);

/* ---- log-concavity ---- */
/* First violating index of a_n^2 >= a_{n-1} a_{n+1} in row k, or -1. */
LC_API lc_status lc_table_first_violation(const lc_table* t, unsigned k, long* out);

/* ---- commands ----
 * config_json: a JSON object with RunConfig keys (may be NULL or "{}").
 * log may be NULL; it receives one line per call.
 * Results come back as JSON text in *result_json. */
typedef void (*lc_log_fn)(const char* line, void* user);

LC_API lc_status lc_run_gen_table(const char* config_json, lc_log_fn log, void* user, char** result_json);
LC_API lc_status lc_run_check(const char* config_json, const char* suite, lc_log_fn log, void* user,
                              char** result_json);
LC_API lc_status lc_run_constants(const char* config_json, lc_log_fn log, void* user, char** result_json);
LC_API lc_status lc_cache_list(const char* cache_dir, char** result_json);
/* NULL filters match anything; K = 0 or N = 0 also match anything. */
LC_API lc_status lc_cache_remove(const char* cache_dir, const char* series_id, unsigned K, size_t N,
                                 size_t* removed);
/* JSON array of suite names. */
LC_API lc_status lc_check_suites(char** result_json);

#ifdef __cplusplus
}
#endif

#endif
