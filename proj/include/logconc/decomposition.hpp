#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logconc/real.hpp"
#include "logconc/report.hpp"
#include "logconc/series.hpp"

namespace logconc {

/// a_n = a^(0)_n + a^(1)_n with a^(0)_n = 1 and a^(1)_n = a_n - 1.
struct SplitSeries {
  TruncatedSeries source;
  std::vector<Rational> ones_part;  // may hold negative entries if the source is not 1-lower bounded

  static SplitSeries from(const TruncatedSeries& f);
  std::size_t order() const { return source.order(); }
};

/// a^I_n for a tuple I with k0 zeros and k1 ones. The value depends only on
/// (k0, k1): it is coefficient n of (ones_part)^{k1} / (1 - z)^{k0}, which is
/// the k0-fold prefix sum of (ones_part)^{k1}.
class Decomposition {
 public:
  Decomposition(const TruncatedSeries& source, std::size_t N,
                ConvolutionKernel kernel = ConvolutionKernel::automatic);

  const SplitSeries& split() const noexcept { return split_; }
  std::size_t N() const noexcept { return N_; }

  /// (ones_part)^{k1} truncated at N, cached.
  std::shared_ptr<const ScaledSeries> ones_power(unsigned k1);
  /// a^I_0 .. a^I_N, cached. k0 = k1 = 0 is the series 1.
  std::shared_ptr<const ScaledSeries> row(unsigned k0, unsigned k1);
  /// Throws Error(resource) if n > N. Negative n gives 0.
  Rational a_I(unsigned k0, unsigned k1, long n);

  void clear_cache();

 private:
  SplitSeries split_;
  ScaledSeries ones_scaled_;
  std::size_t N_;
  ConvolutionKernel kernel_;
  std::mutex mu_;
  std::map<unsigned, std::shared_ptr<const ScaledSeries>> powers_;
  std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const ScaledSeries>> rows_;
};

/// Independent oracle: sums over every I in {0,1}^k by direct convolution of
/// the k factor sequences. Exponential in k; keep k small.
Rational a_I_bruteforce_tuples(const SplitSeries& split, std::span<const int> tuple, std::size_t n);
/// Coefficients 0..n of the same convolution.
std::vector<Rational> a_I_bruteforce_sequence(const SplitSeries& split, std::span<const int> tuple, std::size_t n);
/// Sum over all 2^k tuples, each computed by brute force.
Rational tuple_sum_bruteforce(const SplitSeries& split, unsigned k, std::size_t n);
std::vector<Rational> tuple_sum_bruteforce_sequence(const SplitSeries& split, unsigned k, std::size_t n);

/// sum_{k1} binom(k, k1) a_I(k - k1, k1, n) == a_{n,k}; mismatches are `fail`.
CheckRecord partition_sum_identity(const PowerTable& table, Decomposition& d, unsigned k, std::size_t n);
/// a^I_{n+1} - 2 a^I_n + a^I_{n-1} == a^{I'}_{n+1}, I' with two zeros removed.
/// Indices below 0 count as 0, so n = -1 is allowed.
CheckRecord second_diff_identity(Decomposition& d, unsigned k0, unsigned k1, long n);

enum class ResidualKind {
  one_zero,           // R_{n,k}: a^{(1..1,0)}_n = binom(n+k-1,k-1)(C-1)^{k-1}(1 - R)
  at_least_one_zero,  // S0_{n,I}: a^I_n = binom(n+k-1,k-1)(C-1)^{k1}(1 - S0)
  aux_second_diff,    // S2_{n,I}: second difference of a^I = (n+k)^{k-3}/(k-3)! (C-1)^{k1}(1 - S2)
  second_diff,        // R2: second difference of a_{.,k} = C^k (n+k)^{k-3}/(k-3)! (1 + R2)
  first_diff,         // R1: a_{n,k} - a_{n-1,k} = C^k (n+k)^{k-2}/(k-2)! (1 + R1)
  zeroth,             // R0: a_{n-1,k} = C^k (n+k)^{k-1}/(k-1)! (1 + R0)
};

const char* to_string(ResidualKind k) noexcept;
std::optional<ResidualKind> residual_kind_from_string(std::string_view s);

struct ResidualRecord {
  ResidualKind kind = ResidualKind::one_zero;
  unsigned k0 = 0, k1 = 0;
  long n = 0;
  int sign = 0;                   // exact
  Real value;                     // residual, rounded to nearest at working precision
  std::optional<Rational> exact;  // kept only on request
  Real envelope;                  // bound shape with unit constant, rounded down
  bool in_window = false;         // second-order records: k^{5/(1-alpha)} <= n <= A^k/k^2
  bool sign_as_claimed = true;    // one_zero, at_least_one_zero: residual >= 0

  unsigned k() const { return k0 + k1; }
};

struct ResidualOptions {
  Rational C;
  Rational alpha;
  mpfr_prec_t bits = 256;
  bool keep_exact = false;
};

ResidualRecord residual_one_zero(Decomposition& d, unsigned k, std::size_t n, const ResidualOptions& opt);
ResidualRecord residual_at_least_one_zero(Decomposition& d, unsigned k0, unsigned k1, std::size_t n,
                                          const ResidualOptions& opt);
ResidualRecord residual_aux_second_diff(Decomposition& d, unsigned k0, unsigned k1, long n,
                                        const ResidualOptions& opt);

/// R2, R1, R0 at (k, n) from the exact row k of f^k. Needs k >= 3, 1 <= n < N.
std::array<ResidualRecord, 3> residual_differences(const ScaledSeries& row_k, unsigned k, std::size_t n,
                                                   const ResidualOptions& opt);

/// Range helpers; the numeric work is split across `jobs` threads.
std::vector<ResidualRecord> one_zero_records(Decomposition& d, unsigned k, std::size_t n_max,
                                             const ResidualOptions& opt, unsigned jobs = 1);
std::vector<ResidualRecord> difference_records(const ScaledSeries& row_k, unsigned k, std::size_t n_max,
                                               const ResidualOptions& opt, unsigned jobs = 1);

struct ConstantFit {
  ResidualKind kind = ResidualKind::one_zero;
  unsigned k = 0;
  std::size_t records = 0;
  long n_max = 0;
  Real constant;       // max |residual| / envelope over all records (rounded up)
  long argmax = 0;
  Real constant_half;  // same over records with n <= n_max/2
  double growth = 1;   // constant / constant_half (1 when both vanish)
  bool stable = true;  // growth <= 1 + tolerance
  std::size_t sign_violations = 0;
  std::size_t window_records = 0;
  std::size_t window_within_one_over_k2 = 0;
};

inline constexpr double kStabilityTolerance = 0.10;

/// Fits one constant per (kind, k) group. Records of different groups are
/// separated automatically.
std::vector<ConstantFit> fit_constants(std::span<const ResidualRecord> records,
                                       double tolerance = kStabilityTolerance);

nlohmann::ordered_json to_json(const ConstantFit& f);

/// CSV columns: series_id, lemma, k0, k1, n, residual_num, residual_den,
/// residual_decimal, envelope, pass. Exact num/den are written only for records
/// that kept them. `pass` means the sign is as claimed and the residual is within
/// the envelope scaled by the constant fitted on the lower half of the n-range.
void write_residual_csv(std::ostream& out, const std::string& series_id, std::span<const ResidualRecord> records,
                        std::span<const ConstantFit> fits, bool header = true);

/// Minimal parsed form of a CSV row, used by the constants command.
struct ResidualCsvRow {
  std::string series_id;
  ResidualKind kind = ResidualKind::one_zero;
  unsigned k0 = 0, k1 = 0;
  long n = 0;
  double residual = 0;
  double envelope = 0;
  bool pass = true;
};
std::vector<ResidualCsvRow> read_residual_csv(std::istream& in, const std::string& source_name);

}  // namespace logconc
