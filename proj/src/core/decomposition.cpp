#include "logconc/decomposition.hpp"
#include "logconc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "logconc/error.hpp"

namespace logconc {

SplitSeries SplitSeries::from(const TruncatedSeries& f) {
  SplitSeries s{f, {}};
  s.ones_part.reserve(f.order() + 1);
  for (const Rational& a : f.coeffs()) s.ones_part.push_back(a - 1);
  return s;
}

Decomposition::Decomposition(const TruncatedSeries& source, std::size_t N, ConvolutionKernel kernel)
    : split_(SplitSeries::from(source.truncated(N))), N_(N), kernel_(kernel) {
  ones_scaled_.denominator = common_denominator(split_.ones_part);
  ones_scaled_.numerators.resize(N + 1);
  bool negative = false;
  for (std::size_t n = 0; n <= N; ++n) {
    const Rational& q = split_.ones_part[n];
    mpz_divexact(ones_scaled_.numerators[n].get_mpz_t(), ones_scaled_.denominator.get_mpz_t(), q.get_den_mpz_t());
    ones_scaled_.numerators[n] *= q.get_num();
    negative = negative || sgn(q) < 0;
  }
  if (negative) kernel_ = ConvolutionKernel::schoolbook;
}

std::shared_ptr<const ScaledSeries> Decomposition::ones_power(unsigned k1) {
  {
    std::lock_guard lock(mu_);
    if (auto it = powers_.find(k1); it != powers_.end()) return it->second;
  }
  auto p = std::make_shared<const ScaledSeries>(scaled_pow(ones_scaled_, k1, N_, kernel_));
  std::lock_guard lock(mu_);
  return powers_.emplace(k1, std::move(p)).first->second;
}

std::shared_ptr<const ScaledSeries> Decomposition::row(unsigned k0, unsigned k1) {
  const auto key = std::make_pair(k0, k1);
  {
    std::lock_guard lock(mu_);
    if (auto it = rows_.find(key); it != rows_.end()) return it->second;
  }
  auto base = ones_power(k1);
  ScaledSeries r = *base;
  for (unsigned z = 0; z < k0; ++z)
    for (std::size_t n = 1; n <= N_; ++n) r.numerators[n] += r.numerators[n - 1];
  auto p = std::make_shared<const ScaledSeries>(std::move(r));
  std::lock_guard lock(mu_);
  return rows_.emplace(key, std::move(p)).first->second;
}

Rational Decomposition::a_I(unsigned k0, unsigned k1, long n) {
  if (n < 0) return 0;
  if (static_cast<std::size_t>(n) > N_)
    fail(ErrorKind::resource, "a^I_" + std::to_string(n) + " needs truncation order >= " + std::to_string(n) +
                                  ", have " + std::to_string(N_));
  if (k0 == 0 && k1 == 0) return Rational(n == 0 ? 1 : 0);
  if (k1 == 0) return Rational(binomial(n + static_cast<long>(k0) - 1, static_cast<long>(k0) - 1));
  return row(k0, k1)->coefficient(static_cast<std::size_t>(n));
}

void Decomposition::clear_cache() {
  std::lock_guard lock(mu_);
  powers_.clear();
  rows_.clear();
}

std::vector<Rational> a_I_bruteforce_sequence(const SplitSeries& split, std::span<const int> tuple, std::size_t n) {
  if (n > split.order()) fail(ErrorKind::resource, "tuple oracle needs order >= n");
  std::vector<Rational> acc(n + 1, Rational(0));
  acc[0] = 1;
  for (int bit : tuple) {
    std::vector<Rational> next(n + 1, Rational(0));
    for (std::size_t i = 0; i <= n; ++i) {
      if (sgn(acc[i]) == 0) continue;
      for (std::size_t j = 0; i + j <= n; ++j) next[i + j] += acc[i] * (bit ? split.ones_part[j] : Rational(1));
    }
    acc = std::move(next);
  }
  return acc;
}

Rational a_I_bruteforce_tuples(const SplitSeries& split, std::span<const int> tuple, std::size_t n) {
  return a_I_bruteforce_sequence(split, tuple, n)[n];
}

std::vector<Rational> tuple_sum_bruteforce_sequence(const SplitSeries& split, unsigned k, std::size_t n) {
  std::vector<Rational> total(n + 1, Rational(0));
  std::vector<int> t(k);
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    for (unsigned i = 0; i < k; ++i) t[i] = (mask >> i) & 1u;
    const auto seq = a_I_bruteforce_sequence(split, t, n);
    for (std::size_t m = 0; m <= n; ++m) total[m] += seq[m];
  }
  return total;
}

Rational tuple_sum_bruteforce(const SplitSeries& split, unsigned k, std::size_t n) {
  return tuple_sum_bruteforce_sequence(split, k, n)[n];
}

CheckRecord partition_sum_identity(const PowerTable& table, Decomposition& d, unsigned k, std::size_t n) {
  if (k < 1 || k > table.K() || n > table.N() || n > d.N())
    fail(ErrorKind::invalid_argument, "partition_sum_identity: (k, n) outside the table");
  Rational sum = 0;
  for (unsigned k1 = 0; k1 <= k; ++k1) sum += Rational(binomial(k, k1)) * d.a_I(k - k1, k1, static_cast<long>(n));
  const Rational& direct = table.coefficient(n, k);
  CheckRecord r;
  r.id = "partition_sum k=" + std::to_string(k) + " n=" + std::to_string(n);
  r.status = sum == direct ? Status::pass : Status::fail;
  if (r.status == Status::fail) {
    r.measure("decomposed", to_fraction_string(sum)).measure("direct", to_fraction_string(direct));
    r.notes = "exact identity violated";
  }
  return r;
}

CheckRecord second_diff_identity(Decomposition& d, unsigned k0, unsigned k1, long n) {
  if (k0 < 2) fail(ErrorKind::invalid_argument, "second_diff_identity needs k0 >= 2");
  if (n < -1) fail(ErrorKind::invalid_argument, "second_diff_identity needs n >= -1");
  const Rational lhs = d.a_I(k0, k1, n + 1) - 2 * d.a_I(k0, k1, n) + d.a_I(k0, k1, n - 1);
  const Rational rhs = (k0 == 2 && k1 == 0) ? Rational(n + 1 == 0 ? 1 : 0) : d.a_I(k0 - 2, k1, n + 1);
  CheckRecord r;
  r.id = "second_diff k0=" + std::to_string(k0) + " k1=" + std::to_string(k1) + " n=" + std::to_string(n);
  r.status = lhs == rhs ? Status::pass : Status::fail;
  if (r.status == Status::fail) {
    r.measure("lhs", to_fraction_string(lhs)).measure("rhs", to_fraction_string(rhs));
    r.notes = "exact identity violated";
  }
  return r;
}

const char* to_string(ResidualKind k) noexcept {
  switch (k) {
    case ResidualKind::one_zero: return "one_zero";
    case ResidualKind::at_least_one_zero: return "at_least_one_zero";
    case ResidualKind::aux_second_diff: return "aux_second_diff";
    case ResidualKind::second_diff: return "R2";
    case ResidualKind::first_diff: return "R1";
    case ResidualKind::zeroth: return "R0";
  }
  return "?";
}

std::optional<ResidualKind> residual_kind_from_string(std::string_view s) {
  for (auto k : {ResidualKind::one_zero, ResidualKind::at_least_one_zero, ResidualKind::aux_second_diff,
                 ResidualKind::second_diff, ResidualKind::first_diff, ResidualKind::zeroth})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

namespace {

/// base^e for a positive integer base with directed rounding.
Real pow_rat(long base, const Rational& e, mpfr_prec_t bits, mpfr_rnd_t rnd) {
  Real b(Integer(base), bits);
  Real x(e, bits, rnd);  // base >= 1, so base^e is increasing in e
  Real out(bits);
  mpfr_pow(out.get(), b.get(), x.get(), rnd);
  return out;
}

/// k_a k_b / (m)^{1-alpha}, rounded down.
Real decay_term(long numer, long m, const Rational& alpha, mpfr_prec_t bits) {
  Real den = pow_rat(m, Rational(1 - alpha), bits, MPFR_RNDU);
  Real num(Integer(numer), bits);
  return div(num, den, MPFR_RNDD);
}

/// Residual of the form 1 - V/M (one_minus = true) or V/M - 1, with
/// V = x / Dx and M = Mp / Mq.
void fill_residual(ResidualRecord& r, const Integer& x, const Integer& Dx, const Rational& M, bool one_minus,
                   const ResidualOptions& opt) {
  Integer scale = M.get_num() * Dx;
  Integer diff = scale - x * M.get_den();  // sign of 1 - V/M
  if (!one_minus) diff = -diff;
  r.sign = sgn(diff);
  Real num(diff, opt.bits + 16), den(scale, opt.bits + 16);
  r.value = Real(opt.bits);
  mpfr_div(r.value.get(), num.get(), den.get(), MPFR_RNDN);
  if (opt.keep_exact) {
    Rational q(diff, scale);
    q.canonicalize();
    r.exact = std::move(q);
  }
}

const Integer& numerator_at(const ScaledSeries& s, long n) {
  static const Integer zero = 0;
  return n < 0 ? zero : s.numerators.at(static_cast<std::size_t>(n));
}

Integer factorial(unsigned m) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), m);
  return f;
}

Rational rat_pow(const Rational& q, unsigned e) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), q.get_den_mpz_t(), e);
  return out;
}

Rational int_pow(long base, unsigned e) {
  Integer z;
  mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(base), e);
  return Rational(z);
}

Real difference_envelope(unsigned k, long n, const ResidualOptions& opt) {
  const long m = n + static_cast<long>(k);
  Real a = decay_term(static_cast<long>(k) * k, m, opt.alpha, opt.bits);
  // A^{-(2+alpha)k} = ((C-1)/C)^k for A = (C/(C-1))^{1/(2+alpha)}
  Real q(rat_pow(Rational((opt.C - 1) / opt.C), k), opt.bits, MPFR_RNDD);
  Real b = mul(pow_rat(m, Rational(2 + opt.alpha), opt.bits, MPFR_RNDD), q, MPFR_RNDD);
  return add(a, b, MPFR_RNDD);
}

bool in_window(unsigned k, long n, const ResidualOptions& opt) {
  const double alpha = opt.alpha.get_d();
  const double C = opt.C.get_d();
  const double lo = std::pow(static_cast<double>(k), 5.0 / (1.0 - alpha));
  const double hi = std::pow(C / (C - 1), static_cast<double>(k) / (2 + alpha)) / (static_cast<double>(k) * k);
  return lo <= static_cast<double>(n) && static_cast<double>(n) <= hi;
}

}  // namespace

ResidualRecord residual_one_zero(Decomposition& d, unsigned k, std::size_t n, const ResidualOptions& opt) {
  if (k < 2) fail(ErrorKind::invalid_argument, "residual_one_zero needs k >= 2");
  return residual_at_least_one_zero(d, 1, k - 1, n, opt);
}

ResidualRecord residual_at_least_one_zero(Decomposition& d, unsigned k0, unsigned k1, std::size_t n,
                                          const ResidualOptions& opt) {
  const unsigned k = k0 + k1;
  if (k0 < 1 || k < 2) fail(ErrorKind::invalid_argument, "at-least-one-zero residual needs k0 >= 1 and k >= 2");
  if (n > d.N()) fail(ErrorKind::resource, "residual index beyond truncation order");
  ResidualRecord r;
  r.kind = k0 == 1 ? ResidualKind::one_zero : ResidualKind::at_least_one_zero;
  r.k0 = k0;
  r.k1 = k1;
  r.n = static_cast<long>(n);
  auto row = d.row(k0, k1);
  const Rational M = Rational(binomial(static_cast<long>(n + k) - 1, k - 1)) * rat_pow(Rational(opt.C - 1), k1);
  fill_residual(r, row->numerators[n], row->denominator, M, true, opt);
  r.envelope = decay_term(static_cast<long>(k) * (k - 1), static_cast<long>(n + k) - 1, opt.alpha, opt.bits);
  r.sign_as_claimed = r.sign >= 0;
  return r;
}

ResidualRecord residual_aux_second_diff(Decomposition& d, unsigned k0, unsigned k1, long n,
                                        const ResidualOptions& opt) {
  const unsigned k = k0 + k1;
  if (k0 < 3) fail(ErrorKind::invalid_argument, "aux second-difference residual needs k0 >= 3");
  if (n < -1 || n + 1 > static_cast<long>(d.N())) fail(ErrorKind::resource, "residual index beyond truncation order");
  ResidualRecord r;
  r.kind = ResidualKind::aux_second_diff;
  r.k0 = k0;
  r.k1 = k1;
  r.n = n;
  auto row = d.row(k0, k1);
  const Integer x = numerator_at(*row, n + 1) - 2 * numerator_at(*row, n) + numerator_at(*row, n - 1);
  const Rational M = int_pow(n + k, k - 3) / Rational(factorial(k - 3)) * rat_pow(Rational(opt.C - 1), k1);
  fill_residual(r, x, row->denominator, M, true, opt);
  r.envelope = decay_term(static_cast<long>(k) * k, n + static_cast<long>(k), opt.alpha, opt.bits);
  r.sign_as_claimed = r.sign >= 0;
  return r;
}

std::array<ResidualRecord, 3> residual_differences(const ScaledSeries& row, unsigned k, std::size_t n_u,
                                                   const ResidualOptions& opt) {
  if (k < 3) fail(ErrorKind::invalid_argument, "difference residuals need k >= 3");
  if (n_u < 1 || n_u + 1 > row.order()) fail(ErrorKind::invalid_argument, "difference residuals need 1 <= n < N");
  const long n = static_cast<long>(n_u);
  const Rational Ck = rat_pow(opt.C, k);
  const Integer& a_prev = numerator_at(row, n - 1);
  const Integer& a_n = numerator_at(row, n);
  const Integer& a_next = numerator_at(row, n + 1);
  std::array<ResidualRecord, 3> out;
  const ResidualKind kinds[3] = {ResidualKind::second_diff, ResidualKind::first_diff, ResidualKind::zeroth};
  const Integer values[3] = {a_next - 2 * a_n + a_prev, a_n - a_prev, a_prev};
  for (unsigned i = 0; i < 3; ++i) {
    const unsigned power = k - 3 + i;
    const Rational M = Ck * int_pow(n + k, power) / Rational(factorial(power));
    ResidualRecord& r = out[i];
    r.kind = kinds[i];
    r.k0 = 0;
    r.k1 = k;
    r.n = n;
    fill_residual(r, values[i], row.denominator, M, false, opt);
    r.envelope = difference_envelope(k, n, opt);
    r.in_window = in_window(k, n, opt);
  }
  return out;
}

namespace {

}  // namespace

std::vector<ResidualRecord> one_zero_records(Decomposition& d, unsigned k, std::size_t n_max,
                                             const ResidualOptions& opt, unsigned jobs) {
  n_max = std::min(n_max, d.N());
  d.row(1, k - 1);  // build once before fanning out
  std::vector<ResidualRecord> out(n_max + 1);
  parallel_for(n_max + 1, jobs, [&](std::size_t n) { out[n] = residual_one_zero(d, k, n, opt); });
  return out;
}

std::vector<ResidualRecord> difference_records(const ScaledSeries& row_k, unsigned k, std::size_t n_max,
                                               const ResidualOptions& opt, unsigned jobs) {
  n_max = std::min(n_max, row_k.order() - 1);
  if (n_max < 1) return {};
  std::vector<ResidualRecord> out(3 * n_max);
  parallel_for(n_max, jobs, [&](std::size_t i) {
    auto three = residual_differences(row_k, k, i + 1, opt);
    for (unsigned j = 0; j < 3; ++j) out[3 * i + j] = std::move(three[j]);
  });
  return out;
}

std::vector<ConstantFit> fit_constants(std::span<const ResidualRecord> records, double tolerance) {
  if (records.empty()) fail(ErrorKind::invalid_argument, "fit_constants needs at least one record");
  std::map<std::pair<int, unsigned>, std::vector<const ResidualRecord*>> groups;
  for (const auto& r : records) groups[{static_cast<int>(r.kind), r.k()}].push_back(&r);
  std::vector<ConstantFit> out;
  for (const auto& [key, list] : groups) {
    ConstantFit f;
    f.kind = static_cast<ResidualKind>(key.first);
    f.k = key.second;
    f.records = list.size();
    const mpfr_prec_t bits = list.front()->value.bits();
    f.constant = Real(0.0, bits);
    f.constant_half = Real(0.0, bits);
    f.n_max = list.front()->n;
    for (const auto* r : list) f.n_max = std::max(f.n_max, r->n);
    Real q(bits);
    for (const auto* r : list) {
      if (!r->sign_as_claimed) ++f.sign_violations;
      if (r->in_window) {
        ++f.window_records;
        const Real lim(Rational(1, f.k * f.k), bits);
        if (abs(r->value) <= lim) ++f.window_within_one_over_k2;
      }
      if (r->envelope.sign() <= 0) continue;
      q = div(abs(r->value), r->envelope, MPFR_RNDU);
      if (q > f.constant) {
        f.constant = q;
        f.argmax = r->n;
      }
      if (2 * r->n <= f.n_max && q > f.constant_half) f.constant_half = q;
    }
    if (f.constant.sign() == 0)
      f.growth = 1;
    else if (f.constant_half.sign() == 0)
      f.growth = INFINITY;
    else
      f.growth = (f.constant / f.constant_half).to_double();
    f.stable = f.growth <= 1 + tolerance;
    out.push_back(std::move(f));
  }
  return out;
}

nlohmann::ordered_json to_json(const ConstantFit& f) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(f.kind);
  j["k"] = f.k;
  j["records"] = f.records;
  j["n_max"] = f.n_max;
  j["constant"] = f.constant.str(12);
  j["argmax_n"] = f.argmax;
  j["constant_half_range"] = f.constant_half.str(12);
  j["growth_under_doubling"] = std::isfinite(f.growth) ? nlohmann::ordered_json(f.growth) : nlohmann::ordered_json("inf");
  j["stable"] = f.stable;
  j["sign_violations"] = f.sign_violations;
  j["window_records"] = f.window_records;
  j["window_within_one_over_k2"] = f.window_within_one_over_k2;
  return j;
}

void write_residual_csv(std::ostream& out, const std::string& series_id, std::span<const ResidualRecord> records,
                        std::span<const ConstantFit> fits, bool header) {
  if (header) out << "series_id,lemma,k0,k1,n,residual_num,residual_den,residual_decimal,envelope,pass\n";
  std::string sid = series_id;
  std::replace(sid.begin(), sid.end(), ',', ';');
  for (const auto& r : records) {
    const ConstantFit* fit = nullptr;
    for (const auto& f : fits)
      if (f.kind == r.kind && f.k == r.k()) fit = &f;
    bool pass = r.sign_as_claimed;
    if (fit && r.envelope.sign() > 0) pass = pass && abs(r.value) <= mul(fit->constant_half, r.envelope, MPFR_RNDU);
    out << sid << ',' << to_string(r.kind) << ',' << r.k0 << ',' << r.k1 << ',' << r.n << ',';
    if (r.exact)
      out << r.exact->get_num().get_str() << ',' << r.exact->get_den().get_str();
    else
      out << ',';
    out << ',' << r.value.str(20) << ',' << r.envelope.str(20) << ',' << (pass ? "true" : "false") << '\n';
  }
}

std::vector<ResidualCsvRow> read_residual_csv(std::istream& in, const std::string& source_name) {
  std::vector<ResidualCsvRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("series_id,", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    auto bad = [&](const std::string& why) {
      fail(ErrorKind::format, source_name + ":" + std::to_string(lineno) + ": " + why);
    };
    if (cells.size() != 10) bad("expected 10 columns, got " + std::to_string(cells.size()));
    ResidualCsvRow r;
    r.series_id = cells[0];
    auto kind = residual_kind_from_string(cells[1]);
    if (!kind) bad("unknown lemma '" + cells[1] + "'");
    r.kind = *kind;
    try {
      r.k0 = static_cast<unsigned>(std::stoul(cells[2]));
      r.k1 = static_cast<unsigned>(std::stoul(cells[3]));
      r.n = std::stol(cells[4]);
      r.residual = std::stod(cells[7]);
      r.envelope = std::stod(cells[8]);
    } catch (const std::exception&) {
      bad("malformed number");
    }
    r.pass = cells[9] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace logconc
