#pragma once

#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logconc/rational.hpp"
#include "logconc/series.hpp"

namespace logconc {

struct ConcavityReport {
  std::size_t prefix_length = 0;  // largest L with a_n^2 >= a_{n-1} a_{n+1} for all 1 <= n <= L
  std::optional<std::size_t> first_violation;
  std::size_t scanned_up_to = 0;  // last index N of the sequence
  std::size_t first_nonzero = 0;  // leading zeros are skipped
};

/// Exact scan of a_n^2 >= a_{n-1} a_{n+1}. Works on rationals or on integer
/// numerators sharing a common denominator (the test is scale invariant).
/// Sequences shorter than 3 have nothing to check.
ConcavityReport logconcave_prefix(std::span<const Rational> seq);
ConcavityReport logconcave_prefix(std::span<const Integer> seq);
inline ConcavityReport logconcave_prefix(const TruncatedSeries& f) { return logconcave_prefix(f.coeffs()); }

enum class UnimodalMode {
  strict,  // a_0 < ... < a_M > ... > a_N; plateaus are offenses
  weak,    // <= then >=, diagnostics only
};

struct UnimodalityReport {
  bool unimodal = false;
  std::optional<std::size_t> mode_index;
  std::optional<std::pair<std::size_t, std::size_t>> first_offense;
};

UnimodalityReport unimodal_check(std::span<const Rational> seq, UnimodalMode mode = UnimodalMode::strict);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t points = 0;
};

struct BreakpointEntry {
  unsigned k = 0;
  std::size_t prefix_length = 0;
  std::optional<std::size_t> first_violation;
  bool censored = false;  // whole row log-concave, so L is only a lower bound
};

struct BreakpointCurve {
  std::vector<BreakpointEntry> entries;
  std::optional<LinearFit> fit_cuberoot;  // log L against k^{1/3}
  std::optional<LinearFit> fit_linear;    // log L against k
  std::string diagnostics;                // why a fit is missing, if it is
};

BreakpointCurve breakpoint_curve(const PowerTable& table);
/// Same, from precomputed per-row reports (k = 1, 2, ... in order).
BreakpointCurve breakpoint_curve(std::span<const ConcavityReport> rows, std::span<const unsigned> ks);

struct RatioResult {
  std::size_t n = 0;
  unsigned k = 0;
  std::optional<Rational> ratio;      // nullopt when a_n = a_{n-1}
  std::optional<Rational> reference;  // (k-2)/(k-1), for k >= 2
  int versus_reference = 0;           // sign of ratio - reference
  bool log_concave_at_n = false;      // decided directly when the ratio is undefined
};

/// a_{n-1}(a_{n+1} - 2a_n + a_{n-1}) / (a_n - a_{n-1})^2; log-concavity at n
/// is equivalent to ratio <= 1.
RatioResult ratio_criterion(std::span<const Rational> row, unsigned k, std::size_t n);

nlohmann::ordered_json to_json(const ConcavityReport& r);
nlohmann::ordered_json to_json(const UnimodalityReport& r);
nlohmann::ordered_json to_json(const BreakpointCurve& c);
nlohmann::ordered_json to_json(const RatioResult& r);

/// {series_id, k, N, prefix_length, first_violation, ratios_sampled}
nlohmann::ordered_json row_report_json(const std::string& series_id, unsigned k, const ConcavityReport& r,
                                       std::span<const RatioResult> ratios_sampled);

/// Indices 1, 2, 4, ... plus N-1, all inside [1, N-1].
std::vector<std::size_t> ratio_sample_points(std::size_t N);

std::string decimal(const Rational& q, int digits = 17);

}  // namespace logconc
