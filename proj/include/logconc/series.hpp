#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "logconc/rational.hpp"

namespace logconc {

/// Exact truncated power series a_0 + a_1 z + ... + a_N z^N with
/// non-negative rational coefficients in lowest terms.
class TruncatedSeries {
 public:
  TruncatedSeries() : coeffs_{Rational(0)} {}
  /// Throws Error(invalid_argument) on an empty vector or a negative entry.
  explicit TruncatedSeries(std::vector<Rational> coeffs);

  static TruncatedSeries constant(const Rational& c, std::size_t order);
  static TruncatedSeries one(std::size_t order) { return constant(Rational(1), order); }

  std::size_t order() const noexcept { return coeffs_.size() - 1; }
  const Rational& operator[](std::size_t n) const { return coeffs_[n]; }
  const Rational& at(std::size_t n) const;
  std::span<const Rational> coeffs() const noexcept { return coeffs_; }

  TruncatedSeries truncated(std::size_t order) const;
  bool one_lower_bounded() const;

  friend bool operator==(const TruncatedSeries&, const TruncatedSeries&) = default;

 private:
  std::vector<Rational> coeffs_;
};

/// Same value as a TruncatedSeries, stored as integer numerators over one
/// common (not necessarily minimal) denominator. Products stay in integers,
/// which is what makes large tables affordable.
struct ScaledSeries {
  std::vector<Integer> numerators;
  Integer denominator = 1;

  static ScaledSeries from_series(const TruncatedSeries& f);
  TruncatedSeries to_series() const;
  std::size_t order() const noexcept { return numerators.size() - 1; }
  Rational coefficient(std::size_t n) const;
  /// Divides out the gcd of the denominator and all numerators.
  void reduce();
};

enum class ConvolutionKernel {
  automatic,   // schoolbook for short inputs, kronecker otherwise
  schoolbook,
  kronecker,   // pack into one big integer, multiply with GMP, unpack
};

/// Truncated Cauchy product of non-negative integer sequences, terms 0..N.
std::vector<Integer> convolve(std::span<const Integer> a, std::span<const Integer> b, std::size_t N,
                              ConvolutionKernel kernel = ConvolutionKernel::automatic);

ScaledSeries scaled_mul(const ScaledSeries& a, const ScaledSeries& b, std::size_t N,
                        ConvolutionKernel kernel = ConvolutionKernel::automatic);
/// Repeated squaring, truncating at N after every product. k = 0 gives 1.
ScaledSeries scaled_pow(const ScaledSeries& f, unsigned k, std::size_t N,
                        ConvolutionKernel kernel = ConvolutionKernel::automatic);

/// Coefficient n of the result is sum_{i+j=n} a_i b_j exactly, 0 <= n <= N.
/// Both inputs must have order >= N.
TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b, std::size_t N,
                           ConvolutionKernel kernel = ConvolutionKernel::automatic);
/// f^k truncated at N; f^0 is the constant series 1 (a convention, not an error).
TruncatedSeries series_pow(const TruncatedSeries& f, unsigned k, std::size_t N,
                           ConvolutionKernel kernel = ConvolutionKernel::automatic);

/// i-th derivative: coefficient n becomes (n+i)!/n! * a_{n+i}, order drops by i.
/// Only i in 0..3 is supported.
TruncatedSeries derivative(const TruncatedSeries& f, unsigned i);

/// z^shift * f, truncated to `order`.
TruncatedSeries shift_up(const TruncatedSeries& f, std::size_t shift, std::size_t order);
/// f / z^shift; the first `shift` coefficients must vanish.
TruncatedSeries shift_down(const TruncatedSeries& f, std::size_t shift);

/// Rows k = 1..K of f^k, all truncated to a common order N.
class PowerTable {
 public:
  PowerTable(TruncatedSeries base, std::vector<TruncatedSeries> rows);

  const TruncatedSeries& base() const noexcept { return base_; }
  const TruncatedSeries& row(unsigned k) const;  // 1-based
  unsigned K() const noexcept { return static_cast<unsigned>(rows_.size()); }
  std::size_t N() const noexcept { return base_.order(); }
  const Rational& coefficient(std::size_t n, unsigned k) const { return row(k)[n]; }

  friend bool operator==(const PowerTable&, const PowerTable&) = default;

 private:
  TruncatedSeries base_;
  std::vector<TruncatedSeries> rows_;
};

struct TableBudget {
  std::size_t max_bytes = std::size_t(3) << 30;
};

/// Rough size of the finished table in bytes; used for the budget check.
std::size_t estimate_table_bytes(const TruncatedSeries& f, unsigned K, std::size_t N);

/// Throws Error(resource) naming (K, N) when the estimate exceeds the budget.
PowerTable power_table(const TruncatedSeries& f, unsigned K, std::size_t N, TableBudget budget = {},
                       ConvolutionKernel kernel = ConvolutionKernel::automatic);

}  // namespace logconc
