#include "logconc/series.hpp"

#include <algorithm>
#include <cstring>

#include "logconc/error.hpp"

namespace logconc {

TruncatedSeries::TruncatedSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) fail(ErrorKind::invalid_argument, "a truncated series needs at least one coefficient");
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    coeffs_[n].canonicalize();
    if (sgn(coeffs_[n]) < 0)
      fail(ErrorKind::invalid_argument, "negative coefficient at index " + std::to_string(n));
  }
}

TruncatedSeries TruncatedSeries::constant(const Rational& c, std::size_t order) {
  return TruncatedSeries(std::vector<Rational>(order + 1, c));
}

const Rational& TruncatedSeries::at(std::size_t n) const {
  if (n >= coeffs_.size())
    fail(ErrorKind::invalid_argument,
         "coefficient " + std::to_string(n) + " beyond truncation order " + std::to_string(order()));
  return coeffs_[n];
}

TruncatedSeries TruncatedSeries::truncated(std::size_t order) const {
  if (order > this->order())
    fail(ErrorKind::invalid_argument, "cannot extend a series of order " + std::to_string(this->order()) +
                                          " to order " + std::to_string(order));
  return TruncatedSeries(std::vector<Rational>(coeffs_.begin(), coeffs_.begin() + order + 1));
}

bool TruncatedSeries::one_lower_bounded() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return q >= 1; });
}

ScaledSeries ScaledSeries::from_series(const TruncatedSeries& f) {
  ScaledSeries s;
  s.denominator = common_denominator(f.coeffs());
  s.numerators.resize(f.order() + 1);
  for (std::size_t n = 0; n <= f.order(); ++n) {
    const Rational& q = f[n];
    if (q.get_den() == s.denominator) {
      s.numerators[n] = q.get_num();
    } else {
      mpz_divexact(s.numerators[n].get_mpz_t(), s.denominator.get_mpz_t(), q.get_den_mpz_t());
      s.numerators[n] *= q.get_num();
    }
  }
  return s;
}

Rational ScaledSeries::coefficient(std::size_t n) const {
  Rational q(numerators.at(n), denominator);
  q.canonicalize();
  return q;
}

TruncatedSeries ScaledSeries::to_series() const {
  std::vector<Rational> out(numerators.size());
  for (std::size_t n = 0; n < numerators.size(); ++n) out[n] = coefficient(n);
  return TruncatedSeries(std::move(out));
}

void ScaledSeries::reduce() {
  Integer g = denominator;
  for (const Integer& a : numerators) {
    if (g == 1) return;
    if (sgn(a) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  }
  if (g == 1) return;
  for (Integer& a : numerators) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
  mpz_divexact(denominator.get_mpz_t(), denominator.get_mpz_t(), g.get_mpz_t());
}

namespace {

std::vector<Integer> convolve_schoolbook(std::span<const Integer> a, std::span<const Integer> b, std::size_t N) {
  std::vector<Integer> out(N + 1);
  const std::size_t la = a.size(), lb = b.size();
  for (std::size_t n = 0; n <= N; ++n) {
    if (la == 0 || lb == 0) break;
    std::size_t lo = n >= lb ? n - lb + 1 : 0;
    std::size_t hi = std::min(n, la - 1);
    mpz_ptr acc = out[n].get_mpz_t();
    for (std::size_t i = lo; i <= hi && i <= n; ++i) {
      if (sgn(a[i]) == 0 || sgn(b[n - i]) == 0) continue;
      mpz_addmul(acc, a[i].get_mpz_t(), b[n - i].get_mpz_t());
    }
  }
  return out;
}

std::size_t max_bits(std::span<const Integer> v) {
  std::size_t m = 0;
  for (const Integer& z : v) m = std::max(m, bit_length(z));
  return m;
}

// Each entry occupies `slot` limbs; entries must be non-negative and fit.
Integer kronecker_pack(std::span<const Integer> v, std::size_t slot) {
  Integer z;
  const std::size_t total = v.size() * slot;
  if (total == 0) return z;
  mp_limb_t* dst = mpz_limbs_write(z.get_mpz_t(), static_cast<mp_size_t>(total));
  std::memset(dst, 0, total * sizeof(mp_limb_t));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t used = mpz_size(v[i].get_mpz_t());
    if (used) std::memcpy(dst + i * slot, mpz_limbs_read(v[i].get_mpz_t()), used * sizeof(mp_limb_t));
  }
  mpz_limbs_finish(z.get_mpz_t(), static_cast<mp_size_t>(total));
  return z;
}

std::vector<Integer> kronecker_unpack(const Integer& z, std::size_t slot, std::size_t count) {
  std::vector<Integer> out(count);
  const mp_limb_t* src = mpz_limbs_read(z.get_mpz_t());
  const std::size_t size = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * slot;
    if (start >= size) break;
    const std::size_t n = std::min(slot, size - start);
    mp_limb_t* dst = mpz_limbs_write(out[i].get_mpz_t(), static_cast<mp_size_t>(n));
    std::memcpy(dst, src + start, n * sizeof(mp_limb_t));
    mpz_limbs_finish(out[i].get_mpz_t(), static_cast<mp_size_t>(n));
  }
  return out;
}

std::vector<Integer> convolve_kronecker(std::span<const Integer> a, std::span<const Integer> b, std::size_t N) {
  const bool square = a.data() == b.data() && a.size() == b.size();
  a = a.first(std::min(a.size(), N + 1));
  b = b.first(std::min(b.size(), N + 1));
  if (a.empty() || b.empty()) return std::vector<Integer>(N + 1);
  for (const Integer& z : a)
    if (sgn(z) < 0) fail(ErrorKind::invalid_argument, "kronecker kernel needs non-negative integers");
  for (const Integer& z : b)
    if (sgn(z) < 0) fail(ErrorKind::invalid_argument, "kronecker kernel needs non-negative integers");
  const std::size_t terms = std::min(a.size(), b.size());
  const std::size_t slot_bits = max_bits(a) + max_bits(b) + bit_length(Integer(static_cast<unsigned long>(terms))) + 1;
  const std::size_t slot = (slot_bits + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;
  Integer pa = kronecker_pack(a, slot);
  Integer prod;
  if (square) {
    mpz_mul(prod.get_mpz_t(), pa.get_mpz_t(), pa.get_mpz_t());
  } else {
    Integer pb = kronecker_pack(b, slot);
    mpz_mul(prod.get_mpz_t(), pa.get_mpz_t(), pb.get_mpz_t());
  }
  pa = 0;
  return kronecker_unpack(prod, slot, N + 1);
}

}  // namespace

std::vector<Integer> convolve(std::span<const Integer> a, std::span<const Integer> b, std::size_t N,
                              ConvolutionKernel kernel) {
  if (kernel == ConvolutionKernel::automatic)
    kernel = std::min({a.size(), b.size(), N + 1}) >= 24 ? ConvolutionKernel::kronecker : ConvolutionKernel::schoolbook;
  return kernel == ConvolutionKernel::kronecker ? convolve_kronecker(a, b, N) : convolve_schoolbook(a, b, N);
}

ScaledSeries scaled_mul(const ScaledSeries& a, const ScaledSeries& b, std::size_t N, ConvolutionKernel kernel) {
  if (a.order() < N || b.order() < N)
    fail(ErrorKind::invalid_argument, "operands truncated below requested order " + std::to_string(N));
  ScaledSeries out;
  out.numerators = convolve(a.numerators, b.numerators, N, kernel);
  out.denominator = a.denominator * b.denominator;
  out.reduce();
  return out;
}

ScaledSeries scaled_pow(const ScaledSeries& f, unsigned k, std::size_t N, ConvolutionKernel kernel) {
  if (f.order() < N) fail(ErrorKind::invalid_argument, "series truncated below requested order " + std::to_string(N));
  ScaledSeries result;
  result.numerators.assign(N + 1, Integer(0));
  result.numerators[0] = 1;
  if (k == 0) return result;
  ScaledSeries base;
  base.numerators.assign(f.numerators.begin(), f.numerators.begin() + N + 1);
  base.denominator = f.denominator;
  bool have_result = false;
  while (true) {
    if (k & 1u) {
      result = have_result ? scaled_mul(result, base, N, kernel) : base;
      have_result = true;
    }
    k >>= 1u;
    if (k == 0) break;
    base = scaled_mul(base, base, N, kernel);
  }
  return result;
}

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b, std::size_t N, ConvolutionKernel kernel) {
  if (a.order() < N || b.order() < N)
    fail(ErrorKind::invalid_argument, "operands truncated below requested order " + std::to_string(N));
  return scaled_mul(ScaledSeries::from_series(a.truncated(N)), ScaledSeries::from_series(b.truncated(N)), N, kernel)
      .to_series();
}

TruncatedSeries series_pow(const TruncatedSeries& f, unsigned k, std::size_t N, ConvolutionKernel kernel) {
  if (f.order() < N) fail(ErrorKind::invalid_argument, "series truncated below requested order " + std::to_string(N));
  return scaled_pow(ScaledSeries::from_series(f.truncated(N)), k, N, kernel).to_series();
}

TruncatedSeries derivative(const TruncatedSeries& f, unsigned i) {
  if (i > 3) fail(ErrorKind::invalid_argument, "derivative order " + std::to_string(i) + " outside 0..3");
  if (i > f.order())
    fail(ErrorKind::invalid_argument, "derivative order exceeds truncation order " + std::to_string(f.order()));
  std::vector<Rational> out(f.order() - i + 1);
  for (std::size_t n = 0; n < out.size(); ++n) {
    Integer w = 1;
    for (unsigned j = 1; j <= i; ++j) w *= static_cast<unsigned long>(n + j);
    out[n] = f[n + i] * w;
  }
  return TruncatedSeries(std::move(out));
}

TruncatedSeries shift_up(const TruncatedSeries& f, std::size_t shift, std::size_t order) {
  std::vector<Rational> out(order + 1, Rational(0));
  for (std::size_t n = shift; n <= order && n - shift <= f.order(); ++n) out[n] = f[n - shift];
  return TruncatedSeries(std::move(out));
}

TruncatedSeries shift_down(const TruncatedSeries& f, std::size_t shift) {
  if (shift > f.order()) fail(ErrorKind::invalid_argument, "shift exceeds truncation order");
  for (std::size_t n = 0; n < shift; ++n)
    if (sgn(f[n]) != 0) fail(ErrorKind::invalid_argument, "coefficient " + std::to_string(n) + " is not zero");
  return TruncatedSeries(std::vector<Rational>(f.coeffs().begin() + shift, f.coeffs().end()));
}

PowerTable::PowerTable(TruncatedSeries base, std::vector<TruncatedSeries> rows)
    : base_(std::move(base)), rows_(std::move(rows)) {
  if (rows_.empty()) fail(ErrorKind::invalid_argument, "a power table needs at least one row");
  for (const auto& r : rows_)
    if (r.order() != base_.order()) fail(ErrorKind::invalid_argument, "power table rows must share one order");
}

const TruncatedSeries& PowerTable::row(unsigned k) const {
  if (k < 1 || k > rows_.size())
    fail(ErrorKind::invalid_argument, "row " + std::to_string(k) + " outside 1.." + std::to_string(rows_.size()));
  return rows_[k - 1];
}

std::size_t estimate_table_bytes(const TruncatedSeries& f, unsigned K, std::size_t N) {
  std::size_t num_bits = 0;
  Integer den = 1;
  for (std::size_t n = 0; n <= std::min(N, f.order()); ++n) {
    num_bits = std::max(num_bits, bit_length(f[n].get_num()));
    if (f[n].get_den() != 1) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), f[n].get_den_mpz_t());
  }
  // row k: numerator and denominator of roughly k * (bits of scaled base) each
  const double per_row_bits = static_cast<double>(num_bits + 2 * bit_length(den) + 8);
  double total = 0;
  for (unsigned k = 1; k <= K; ++k) total += (N + 1) * (2.0 * k * per_row_bits / 8.0 + 48.0);
  return total > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(total);
}

PowerTable power_table(const TruncatedSeries& f, unsigned K, std::size_t N, TableBudget budget,
                       ConvolutionKernel kernel) {
  if (K < 1) fail(ErrorKind::invalid_argument, "power table needs K >= 1");
  if (f.order() < N) fail(ErrorKind::invalid_argument, "series truncated below requested order " + std::to_string(N));
  const std::size_t need = estimate_table_bytes(f, K, N);
  if (need > budget.max_bytes)
    fail(ErrorKind::resource, "power table (K=" + std::to_string(K) + ", N=" + std::to_string(N) + ") needs about " +
                                  std::to_string(need >> 20) + " MiB, budget is " +
                                  std::to_string(budget.max_bytes >> 20) + " MiB");
  TruncatedSeries base = f.truncated(N);
  const ScaledSeries scaled_base = ScaledSeries::from_series(base);
  std::vector<TruncatedSeries> rows;
  rows.reserve(K);
  rows.push_back(base);
  ScaledSeries current = scaled_base;
  for (unsigned k = 2; k <= K; ++k) {
    current = scaled_mul(current, scaled_base, N, kernel);
    rows.push_back(current.to_series());
  }
  return PowerTable(std::move(base), std::move(rows));
}

}  // namespace logconc
