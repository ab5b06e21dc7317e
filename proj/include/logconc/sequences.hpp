#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logconc/evaluator.hpp"
#include "logconc/real.hpp"
#include "logconc/series.hpp"

namespace logconc {

enum class SeriesKind {
  geometric,      // c/(1-z): every coefficient c
  constant,       // every coefficient C (same values as geometric, separate id)
  sigma_shifted,  // g(z) = f(z)/z, coefficient n is sigma_{-1}(n+1)
  sigma,          // f(z) = sum_{n>=1} sigma_{-1}(n) z^n, a_0 = 0
  custom_file,
};

/// Series identifiers: "geometric", "geometric:<c>", "constant:<C>",
/// "sigma-shifted", "sigma", "file:<path>". Scales are exact rationals >= 1.
struct SeriesSpec {
  SeriesKind kind = SeriesKind::geometric;
  Rational scale = 1;
  std::filesystem::path path;

  static SeriesSpec parse(std::string_view id);
  std::string id() const;
};

/// sigma_1(0..N) by a divisor sieve (entry 0 is 0).
std::vector<std::uint64_t> sigma_one_table(std::size_t N);
std::uint64_t sigma_one(std::uint64_t n);
Rational sigma_minus_one(std::uint64_t n);
/// sigma_{-1}(0..N) with entry 0 set to 0.
std::vector<Rational> sigma_minus_one_table(std::size_t N);

/// Coefficients a_0..a_N. CustomFile errors carry the offending line number.
TruncatedSeries generate(const SeriesSpec& spec, std::size_t N);

/// One coefficient per line, "p/q" or an integer; '#' starts a comment.
TruncatedSeries read_custom_series(std::istream& in, std::size_t N, const std::string& source_name);

/// Coefficient bound valid for every n, proven for each generated kind.
/// Custom files have none (nullopt); use a growth certificate instead.
std::optional<CoefficientMajorant> analytic_majorant(const SeriesSpec& spec);

struct AverageBoundCheck {
  bool holds = true;
  std::optional<std::size_t> first_violation;
  std::string max_average;  // upper bound, decimal
  std::size_t argmax = 0;
  std::size_t scanned_up_to = 0;
};

/// (a_0 + ... + a_n)/(n+1) <= C for every n in the series.
AverageBoundCheck check_average_bound(const TruncatedSeries& f, const Rational& C);

struct GrowthCertificate {
  Rational C;
  Rational D;      // upper bound on max_n (C(n+1) - S_n)/(n+1)^alpha
  Rational alpha;
  std::size_t verified_up_to = 0;
  Real growth_base;  // (C/(C-1))^{1/(2+alpha)}

  /// From differencing the certificate: a_n <= C + D (n+1)^alpha. Valid beyond
  /// verified_up_to only if the certified condition extends there.
  CoefficientMajorant majorant() const { return CoefficientMajorant{C, D, alpha}; }
};

struct GrowthScan {
  bool ok = false;
  std::optional<std::size_t> first_negative;   // C(n+1) - S_n < 0
  std::optional<std::size_t> first_over_cap;   // deviation above D_cap (n+1)^alpha
  Rational D;                                  // over the full scan
  Rational D_half;                             // over n <= N/2, for saturation diagnostics
  std::optional<GrowthCertificate> certificate;
  std::string reason;

  /// The certificate, or Error(domain) carrying the reason.
  const GrowthCertificate& get() const;
};

/// Scans 0 <= C(n+1) - (a_0+...+a_n) <= D(n+1)^alpha for n <= order, choosing
/// the minimal D. With D_cap set, a deviation needing D > D_cap also fails.
GrowthScan certify_growth(const TruncatedSeries& f, const Rational& C, const Rational& alpha,
                          std::optional<Rational> D_cap = std::nullopt);

Real growth_base(const Rational& C, const Rational& alpha, mpfr_prec_t bits = 256);

/// sqrt(pi^2/(pi^2 - 6)) with rounding direction rnd.
Real eta0(mpfr_prec_t bits = 256, mpfr_rnd_t rnd = MPFR_RNDN);

/// Smallest rational with denominator 10^digits strictly above pi^2/6.
Rational rational_above_pi2_over_6(unsigned digits);

struct PartialSumBounds {
  std::size_t checked_up_to = 0;
  bool all_hold = true;
  std::optional<std::size_t> first_failure;
  Real min_upper_margin;  // min over n of pi^2/6 (n+1) - S
  std::size_t argmin_upper = 0;
  Real min_lower_margin;  // min over n of S - (pi^2/6 (n+1) - log(n+1) - 1)
  std::size_t argmin_lower = 0;
};

/// For n = 0..N: pi^2/6 (n+1) - log(n+1) - 1 <= sigma_{-1}(1) + ... + sigma_{-1}(n+1) <= pi^2/6 (n+1).
/// All comparisons use directed rounding at `bits`; an undecidable comparison
/// throws Error(precision).
PartialSumBounds sigma_partial_sum_bounds(std::size_t N, mpfr_prec_t bits = 256);

}  // namespace logconc
