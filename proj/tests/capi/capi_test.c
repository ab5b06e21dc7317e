/* Plain C client of the shared library. Usage: capi_test WORKDIR */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

#include "logconc/logconc.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static int coeff_is(const lc_series* s, size_t n, const char* want) {
  char* got = NULL;
  if (lc_series_coeff(s, n, &got) != LC_OK) return 0;
  int ok = strcmp(got, want) == 0;
  if (!ok) fprintf(stderr, "coefficient %zu: got %s, want %s\n", n, got, want);
  lc_string_free(got);
  return ok;
}

static int table_coeff_is(const lc_table* t, unsigned k, size_t n, const char* want) {
  char* got = NULL;
  if (lc_table_coeff(t, k, n, &got) != LC_OK) return 0;
  int ok = strcmp(got, want) == 0;
  if (!ok) fprintf(stderr, "table (%u, %zu): got %s, want %s\n", k, n, got, want);
  lc_string_free(got);
  return ok;
}

static void count_lines(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

int main(int argc, char** argv) {
  const char* work = argc > 1 ? argv[1] : "capi_work";
  mkdir(work, 0755);

  EXPECT(strlen(lc_version()) > 0);
  EXPECT(strcmp(lc_status_name(LC_ERR_FORMAT), "format") == 0);

  lc_series* g = NULL;
  EXPECT(lc_series_generate("sigma-shifted", 12, &g) == LC_OK);
  EXPECT(lc_series_order(g) == 12);
  EXPECT(coeff_is(g, 0, "1/1"));
  EXPECT(coeff_is(g, 1, "3/2"));
  EXPECT(coeff_is(g, 3, "7/4"));

  lc_series* d = NULL;
  EXPECT(lc_series_derivative(g, 1, &d) == LC_OK);
  EXPECT(coeff_is(d, 0, "3/2"));
  EXPECT(coeff_is(d, 1, "8/3"));
  EXPECT(coeff_is(d, 2, "21/4"));
  lc_series_free(d);

  lc_series* one = NULL;
  lc_series* sq = NULL;
  lc_series* cube = NULL;
  EXPECT(lc_series_generate("geometric", 20, &one) == LC_OK);
  EXPECT(lc_series_mul(one, one, 20, &sq) == LC_OK);
  EXPECT(coeff_is(sq, 7, "8/1"));
  EXPECT(lc_series_pow(one, 3, 20, &cube) == LC_OK);
  EXPECT(coeff_is(cube, 4, "15/1"));
  lc_series_free(sq);
  lc_series_free(cube);

  lc_series* bad = NULL;
  EXPECT(lc_series_generate("no-such-series", 5, &bad) == LC_ERR_INVALID_ARGUMENT);
  EXPECT(bad == NULL);
  EXPECT(strstr(lc_last_error(), "no-such-series") != NULL);
  EXPECT(lc_series_coeff(g, 99, &(char*){NULL}) != LC_OK);
  EXPECT(lc_series_generate("geometric", 5, NULL) == LC_ERR_INVALID_ARGUMENT);

  lc_table* t = NULL;
  EXPECT(lc_table_build(one, 5, 20, &t) == LC_OK);
  EXPECT(lc_table_K(t) == 5);
  EXPECT(lc_table_N(t) == 20);
  EXPECT(table_coeff_is(t, 5, 3, "35/1"));
  long v = 0;
  EXPECT(lc_table_first_violation(t, 4, &v) == LC_OK);
  EXPECT(v == -1);
  EXPECT(lc_table_coeff(t, 0, 3, &(char*){NULL}) == LC_ERR_INVALID_ARGUMENT);

  char path[1024];
  snprintf(path, sizeof path, "%s/table.json", work);
  EXPECT(lc_table_save(t, "geometric:1", path) == LC_OK);
  lc_table* back = NULL;
  char* sid = NULL;
  EXPECT(lc_table_load(path, &back, &sid) == LC_OK);
  EXPECT(sid && strcmp(sid, "geometric:1") == 0);
  EXPECT(back && table_coeff_is(back, 5, 3, "35/1"));
  lc_string_free(sid);
  lc_table_free(back);

  FILE* junk = fopen(path, "w");
  fputs("{ truncated", junk);
  fclose(junk);
  back = NULL;
  EXPECT(lc_table_load(path, &back, NULL) == LC_ERR_FORMAT);
  EXPECT(back == NULL);

  lc_table* gt = NULL;
  EXPECT(lc_table_build(g, 3, 12, &gt) == LC_OK);
  EXPECT(lc_table_first_violation(gt, 1, &v) == LC_OK);
  EXPECT(v > 0);
  lc_table_free(gt);

  char config[2048];
  snprintf(config, sizeof config,
           "{\"series\": \"geometric\", \"K\": 4, \"N\": 40, \"cache_dir\": \"%s/cache\", \"output\": \"%s/out\"}",
           work, work);
  int lines = 0;
  char* result = NULL;
  EXPECT(lc_run_gen_table(config, count_lines, &lines, &result) == LC_OK);
  EXPECT(result && strstr(result, "row_checksums") != NULL);
  EXPECT(lines > 0);
  lc_string_free(result);

  result = NULL;
  EXPECT(lc_run_check(config, "prefix", NULL, NULL, &result) == LC_OK);
  EXPECT(result && strstr(result, "\"fail\": 0") != NULL);
  lc_string_free(result);

  result = NULL;
  EXPECT(lc_run_check(config, "bogus", NULL, NULL, &result) == LC_ERR_INVALID_ARGUMENT);
  EXPECT(strstr(lc_last_error(), "prefix") != NULL);

  EXPECT(lc_run_check("{\"K\": 0}", "prefix", NULL, NULL, &result) == LC_ERR_INVALID_ARGUMENT);
  EXPECT(lc_run_check("not json", "prefix", NULL, NULL, &result) == LC_ERR_FORMAT);

  result = NULL;
  EXPECT(lc_check_suites(&result) == LC_OK);
  EXPECT(result && strstr(result, "decomposition") != NULL);
  lc_string_free(result);

  char cache[1024];
  snprintf(cache, sizeof cache, "%s/cache", work);
  result = NULL;
  EXPECT(lc_cache_list(cache, &result) == LC_OK);
  EXPECT(result && strstr(result, "geometric") != NULL);
  lc_string_free(result);
  size_t removed = 0;
  EXPECT(lc_cache_remove(cache, NULL, 0, 0, &removed) == LC_OK);
  EXPECT(removed == 1);

  lc_table_free(t);
  lc_series_free(one);
  lc_series_free(g);

  if (failures) {
    fprintf(stderr, "%d C API expectations failed\n", failures);
    return 1;
  }
  printf("C API: all expectations met\n");
  return 0;
}
