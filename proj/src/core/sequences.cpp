#include "logconc/sequences.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "logconc/error.hpp"

namespace logconc {

SeriesSpec SeriesSpec::parse(std::string_view id) {
  SeriesSpec s;
  auto colon = id.find(':');
  std::string_view head = id.substr(0, colon);
  std::string_view arg = colon == std::string_view::npos ? std::string_view{} : id.substr(colon + 1);
  if (head == "geometric" || head == "constant") {
    s.kind = head == "geometric" ? SeriesKind::geometric : SeriesKind::constant;
    if (arg.empty() && s.kind == SeriesKind::constant)
      fail(ErrorKind::invalid_argument, "constant series needs an exact rational, e.g. constant:2");
    s.scale = arg.empty() ? Rational(1) : parse_rational(arg);
    if (s.scale < 1) fail(ErrorKind::invalid_argument, "series scale must be >= 1 in '" + std::string(id) + "'");
  } else if (head == "sigma-shifted" && arg.empty()) {
    s.kind = SeriesKind::sigma_shifted;
  } else if (head == "sigma" && arg.empty()) {
    s.kind = SeriesKind::sigma;
  } else if (head == "file" && !arg.empty()) {
    s.kind = SeriesKind::custom_file;
    s.path = std::string(arg);
  } else {
    fail(ErrorKind::invalid_argument, "unknown series id '" + std::string(id) +
                                          "' (expected geometric[:c], constant:C, sigma-shifted, sigma, file:PATH)");
  }
  return s;
}

std::string SeriesSpec::id() const {
  switch (kind) {
    case SeriesKind::geometric: return "geometric:" + scale.get_str();
    case SeriesKind::constant: return "constant:" + scale.get_str();
    case SeriesKind::sigma_shifted: return "sigma-shifted";
    case SeriesKind::sigma: return "sigma";
    case SeriesKind::custom_file: return "file:" + path.string();
  }
  return "?";
}

std::vector<std::uint64_t> sigma_one_table(std::size_t N) {
  std::vector<std::uint64_t> s(N + 1, 0);
  for (std::size_t d = 1; d <= N; ++d)
    for (std::size_t m = d; m <= N; m += d) s[m] += d;
  return s;
}

std::uint64_t sigma_one(std::uint64_t n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "sigma_1 is defined for n >= 1");
  std::uint64_t s = 0;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    s += d;
    if (d != n / d) s += n / d;
  }
  return s;
}

Rational sigma_minus_one(std::uint64_t n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "sigma_{-1} is defined for n >= 1");
  Rational q(Integer(static_cast<unsigned long>(sigma_one(n))), Integer(static_cast<unsigned long>(n)));
  q.canonicalize();
  return q;
}

std::vector<Rational> sigma_minus_one_table(std::size_t N) {
  auto s1 = sigma_one_table(N);
  std::vector<Rational> out(N + 1, Rational(0));
  for (std::size_t n = 1; n <= N; ++n) {
    out[n] = Rational(Integer(static_cast<unsigned long>(s1[n])), Integer(static_cast<unsigned long>(n)));
    out[n].canonicalize();
  }
  return out;
}

TruncatedSeries read_custom_series(std::istream& in, std::size_t N, const std::string& source_name) {
  std::vector<Rational> coeffs;
  std::string line;
  std::size_t lineno = 0;
  while (coeffs.size() <= N && std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      coeffs.push_back(parse_rational(line));
    } catch (const Error& e) {
      fail(ErrorKind::format, source_name + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (sgn(coeffs.back()) < 0)
      fail(ErrorKind::format, source_name + ":" + std::to_string(lineno) + ": negative coefficient");
  }
  if (coeffs.size() <= N)
    fail(ErrorKind::format, source_name + ": only " + std::to_string(coeffs.size()) +
                                " coefficients, need " + std::to_string(N + 1));
  return TruncatedSeries(std::move(coeffs));
}

TruncatedSeries generate(const SeriesSpec& spec, std::size_t N) {
  switch (spec.kind) {
    case SeriesKind::geometric:
    case SeriesKind::constant: return TruncatedSeries::constant(spec.scale, N);
    case SeriesKind::sigma_shifted: {
      auto s = sigma_minus_one_table(N + 1);
      return TruncatedSeries(std::vector<Rational>(s.begin() + 1, s.end()));
    }
    case SeriesKind::sigma: return TruncatedSeries(sigma_minus_one_table(N));
    case SeriesKind::custom_file: {
      std::ifstream in(spec.path);
      if (!in) fail(ErrorKind::io, "cannot open series file " + spec.path.string());
      return read_custom_series(in, N, spec.path.string());
    }
  }
  fail(ErrorKind::internal, "unhandled series kind");
}

std::optional<CoefficientMajorant> analytic_majorant(const SeriesSpec& spec) {
  switch (spec.kind) {
    case SeriesKind::geometric:
    case SeriesKind::constant: return CoefficientMajorant{spec.scale, 0, 0};
    case SeriesKind::sigma_shifted:
    case SeriesKind::sigma:
      // sigma_{-1}(m) <= H_m <= 1 + ln m <= 1 + (2/e) sqrt(m), and 2/e < 3679/5000
      return CoefficientMajorant{1, Rational(3679, 5000), Rational(1, 2)};
    case SeriesKind::custom_file: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

/// Rigorous enclosure [lo, hi] of the running sum a_0 + ... + a_n with an
/// exact fallback for comparisons the enclosure cannot decide.
class PrefixSumEnclosure {
 public:
  PrefixSumEnclosure(const TruncatedSeries& f, mpfr_prec_t bits) : f_(f), lo_(bits), hi_(bits), term_(bits) {}

  void advance() {
    ++n_;
    const Rational& a = f_[n_];
    mpfr_set_q(term_.get(), a.get_mpq_t(), MPFR_RNDD);
    mpfr_add(lo_.get(), lo_.get(), term_.get(), MPFR_RNDD);
    mpfr_set_q(term_.get(), a.get_mpq_t(), MPFR_RNDU);
    mpfr_add(hi_.get(), hi_.get(), term_.get(), MPFR_RNDU);
  }
  std::size_t n() const { return n_; }
  const Real& lo() const { return lo_; }
  const Real& hi() const { return hi_; }
  const Rational& exact() {
    for (; exact_next_ <= n_; ++exact_next_) exact_ += f_[exact_next_];
    return exact_;
  }

 private:
  const TruncatedSeries& f_;
  std::size_t n_ = static_cast<std::size_t>(-1);
  Real lo_, hi_, term_;
  Rational exact_ = 0;
  std::size_t exact_next_ = 0;
};

constexpr mpfr_prec_t kScanBits = 256;

}  // namespace

AverageBoundCheck check_average_bound(const TruncatedSeries& f, const Rational& C) {
  AverageBoundCheck out;
  PrefixSumEnclosure S(f, kScanBits);
  Real t_lo(kScanBits), t_hi(kScanBits), avg(kScanBits), best(kScanBits);
  mpfr_set_inf(best.get(), -1);
  for (std::size_t n = 0; n <= f.order(); ++n) {
    S.advance();
    const Rational target = C * static_cast<unsigned long>(n + 1);
    mpfr_set_q(t_lo.get(), target.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(t_hi.get(), target.get_mpq_t(), MPFR_RNDU);
    bool ok;
    if (S.hi() <= t_lo)
      ok = true;
    else if (S.lo() > t_hi)
      ok = false;
    else
      ok = S.exact() <= target;
    if (!ok && out.holds) {
      out.holds = false;
      out.first_violation = n;
    }
    mpfr_div_ui(avg.get(), S.hi().get(), static_cast<unsigned long>(n + 1), MPFR_RNDU);
    if (avg > best) {
      best = avg;
      out.argmax = n;
    }
  }
  out.scanned_up_to = f.order();
  out.max_average = best.str(25);
  return out;
}

const GrowthCertificate& GrowthScan::get() const {
  if (!certificate) fail(ErrorKind::domain, "growth certificate failed: " + reason);
  return *certificate;
}

Real growth_base(const Rational& C, const Rational& alpha, mpfr_prec_t bits) {
  if (C <= 1) fail(ErrorKind::invalid_argument, "growth base needs C > 1");
  Real ratio(Rational(C / (C - 1)), bits);
  Real expo(Rational(1 / (2 + alpha)), bits);
  return pow(ratio, expo);
}

GrowthScan certify_growth(const TruncatedSeries& f, const Rational& C, const Rational& alpha,
                          std::optional<Rational> D_cap) {
  if (C <= 1) fail(ErrorKind::invalid_argument, "certify_growth needs C > 1");
  if (sgn(alpha) < 0 || alpha >= 1) fail(ErrorKind::invalid_argument, "certify_growth needs alpha in [0,1)");
  GrowthScan out;
  PrefixSumEnclosure S(f, kScanBits);
  const Real alpha_dn(alpha, kScanBits, MPFR_RNDD);
  Real t(kScanBits), dev(kScanBits), scale(kScanBits), d_here(kScanBits);
  Real d_max(0.0, kScanBits), d_half(0.0, kScanBits);
  const std::size_t N = f.order();
  for (std::size_t n = 0; n <= N; ++n) {
    S.advance();
    const Rational target = C * static_cast<unsigned long>(n + 1);
    // upper bound of the deviation C(n+1) - S_n
    mpfr_set_q(t.get(), target.get_mpq_t(), MPFR_RNDU);
    mpfr_sub(dev.get(), t.get(), S.lo().get(), MPFR_RNDU);
    Real dev_lo(kScanBits);
    mpfr_set_q(dev_lo.get(), target.get_mpq_t(), MPFR_RNDD);
    mpfr_sub(dev_lo.get(), dev_lo.get(), S.hi().get(), MPFR_RNDD);
    bool exact_zero = false;
    if (dev_lo.sign() < 0) {
      Rational exact_dev = target - S.exact();
      if (sgn(exact_dev) < 0) {
        out.first_negative = n;
        out.reason = "C(n+1) - S_n < 0 at n = " + std::to_string(n);
        break;
      }
      exact_zero = sgn(exact_dev) == 0;
    }
    if (exact_zero) continue;
    mpfr_set_ui(scale.get(), static_cast<unsigned long>(n + 1), MPFR_RNDD);
    mpfr_pow(scale.get(), scale.get(), alpha_dn.get(), MPFR_RNDD);
    mpfr_div(d_here.get(), dev.get(), scale.get(), MPFR_RNDU);
    if (d_here > d_max) d_max = d_here;
    if (2 * n <= N && d_here > d_half) d_half = d_here;
    if (D_cap && !out.first_over_cap) {
      Real cap(*D_cap, kScanBits, MPFR_RNDD);
      if (d_here > cap) {
        // decide exactly only when the rounded quotient is the sole evidence
        out.first_over_cap = n;
        out.reason = "deviation exceeds D_cap (n+1)^alpha at n = " + std::to_string(n);
        break;
      }
    }
  }
  out.D = d_max.to_rational();
  out.D_half = d_half.to_rational();
  if (!out.first_negative && !out.first_over_cap) {
    out.ok = true;
    out.certificate = GrowthCertificate{C, out.D, alpha, N, growth_base(C, alpha)};
  }
  return out;
}

Real eta0(mpfr_prec_t bits, mpfr_rnd_t rnd) {
  // pi^2/(pi^2 - 6) is decreasing in pi^2, so round pi against the direction
  const mpfr_rnd_t inner = rnd == MPFR_RNDU ? MPFR_RNDD : (rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDN);
  Real p = pi(bits + 32, inner);
  Real p2 = mul(p, p, inner);
  Real den(bits + 32);
  mpfr_sub_ui(den.get(), p2.get(), 6, inner);
  Real q = div(p2, den, rnd);
  Real r(bits);
  mpfr_sqrt(r.get(), q.get(), rnd);
  return r;
}

Rational rational_above_pi2_over_6(unsigned digits) {
  Real p = pi(512, MPFR_RNDU);
  Real v = mul(p, p, MPFR_RNDU);
  mpfr_div_ui(v.get(), v.get(), 6, MPFR_RNDU);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  Real scaled(Integer(scale), 512);
  scaled = mul(v, scaled, MPFR_RNDU);
  Integer num;
  mpfr_get_z(num.get_mpz_t(), scaled.get(), MPFR_RNDU);  // ceil, strictly above since pi^2/6 is irrational
  Rational q(num, scale);
  q.canonicalize();
  return q;
}

PartialSumBounds sigma_partial_sum_bounds(std::size_t N, mpfr_prec_t bits) {
  if (N < 1) fail(ErrorKind::invalid_argument, "sigma_partial_sum_bounds needs N >= 1");
  auto s1 = sigma_one_table(N + 1);
  PartialSumBounds out;
  Real z2_lo = pi(bits + 16, MPFR_RNDD), z2_hi = pi(bits + 16, MPFR_RNDU);
  z2_lo = mul(z2_lo, z2_lo, MPFR_RNDD);
  z2_hi = mul(z2_hi, z2_hi, MPFR_RNDU);
  mpfr_div_ui(z2_lo.get(), z2_lo.get(), 6, MPFR_RNDD);
  mpfr_div_ui(z2_hi.get(), z2_hi.get(), 6, MPFR_RNDU);

  Real s_lo(0.0, bits), s_hi(0.0, bits), term(bits), upper(bits), lower(bits), lg(bits), margin(bits);
  mpfr_set_inf(out.min_upper_margin.get(), 1);
  mpfr_set_inf(out.min_lower_margin.get(), 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const unsigned long m = static_cast<unsigned long>(n + 1);
    mpfr_set_ui(term.get(), static_cast<unsigned long>(s1[m]), MPFR_RNDD);
    mpfr_div_ui(term.get(), term.get(), m, MPFR_RNDD);
    mpfr_add(s_lo.get(), s_lo.get(), term.get(), MPFR_RNDD);
    mpfr_set_ui(term.get(), static_cast<unsigned long>(s1[m]), MPFR_RNDU);
    mpfr_div_ui(term.get(), term.get(), m, MPFR_RNDU);
    mpfr_add(s_hi.get(), s_hi.get(), term.get(), MPFR_RNDU);

    // upper: S <= zeta(2) (n+1); need s_hi <= lower bound of the right side
    mpfr_mul_ui(upper.get(), z2_lo.get(), m, MPFR_RNDD);
    const bool up_ok = s_hi <= upper;
    // lower: zeta(2)(n+1) - log(n+1) - 1 <= S; need upper bound of left <= s_lo
    mpfr_mul_ui(lower.get(), z2_hi.get(), m, MPFR_RNDU);
    mpfr_set_ui(lg.get(), m, MPFR_RNDD);
    mpfr_log(lg.get(), lg.get(), MPFR_RNDD);
    mpfr_sub(lower.get(), lower.get(), lg.get(), MPFR_RNDU);
    mpfr_sub_ui(lower.get(), lower.get(), 1, MPFR_RNDU);
    const bool lo_ok = lower <= s_lo;

    if (!up_ok || !lo_ok) {
      // decide whether the bound is genuinely violated or only unresolved
      Real up_hi(bits), lo_lo(bits);
      mpfr_mul_ui(up_hi.get(), z2_hi.get(), m, MPFR_RNDU);
      mpfr_mul_ui(lo_lo.get(), z2_lo.get(), m, MPFR_RNDD);
      mpfr_set_ui(lg.get(), m, MPFR_RNDU);
      mpfr_log(lg.get(), lg.get(), MPFR_RNDU);
      mpfr_sub(lo_lo.get(), lo_lo.get(), lg.get(), MPFR_RNDD);
      mpfr_sub_ui(lo_lo.get(), lo_lo.get(), 1, MPFR_RNDD);
      const bool up_bad = s_lo > up_hi;
      const bool lo_bad = lo_lo > s_hi;
      if ((!up_ok && !up_bad) || (!lo_ok && !lo_bad))
        fail(ErrorKind::precision, "cannot decide partial-sum bound at n = " + std::to_string(n) + " with " +
                                       std::to_string(bits) + " bits; raise the precision");
      out.all_hold = false;
      if (!out.first_failure) out.first_failure = n;
    }
    margin = sub(upper, s_hi, MPFR_RNDD);
    if (margin < out.min_upper_margin) {
      out.min_upper_margin = margin;
      out.argmin_upper = n;
    }
    margin = sub(s_lo, lower, MPFR_RNDD);
    if (margin < out.min_lower_margin) {
      out.min_lower_margin = margin;
      out.argmin_lower = n;
    }
  }
  out.checked_up_to = N;
  return out;
}

}  // namespace logconc
