#include "logconc/evaluator.hpp"

#include <algorithm>

#include "logconc/error.hpp"

namespace logconc {

SeriesEvaluator::SeriesEvaluator(const TruncatedSeries& f, CoefficientMajorant majorant, mpfr_prec_t bits)
    : majorant_(std::move(majorant)), alpha_up_(majorant_.alpha, bits, MPFR_RNDU), bits_(bits) {
  if (bits < 64) fail(ErrorKind::invalid_argument, "evaluator precision below 64 bits");
  if (sgn(majorant_.C) < 0 || sgn(majorant_.D) < 0 || sgn(majorant_.alpha) < 0)
    fail(ErrorKind::invalid_argument, "coefficient majorant must be non-negative");
  coeffs_.reserve(f.order() + 1);
  for (const Rational& q : f.coeffs()) coeffs_.emplace_back(q, bits);
}

namespace {

// j (j-1) ... (j-i+1)
Real falling(std::size_t j, unsigned i, mpfr_prec_t bits) {
  Real r(1.0, bits);
  for (unsigned t = 0; t < i; ++t) mpfr_mul_ui(r.get(), r.get(), static_cast<unsigned long>(j - t), MPFR_RNDU);
  return r;
}

}  // namespace

Real SeriesEvaluator::tail_bound(const Real& radius, std::size_t M, unsigned deriv) const {
  const std::size_t j0 = std::max<std::size_t>(M + 1, deriv);
  Real rho(bits_);
  mpfr_abs(rho.get(), radius.get(), MPFR_RNDU);
  // ratio of consecutive majorant terms for j >= j0
  Real q(bits_), t(bits_);
  mpfr_set_ui(t.get(), static_cast<unsigned long>(deriv), MPFR_RNDU);
  mpfr_div_ui(t.get(), t.get(), static_cast<unsigned long>(j0 + 1 - deriv), MPFR_RNDU);
  mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDU);
  mpfr_mul(q.get(), rho.get(), t.get(), MPFR_RNDU);
  mpfr_set_ui(t.get(), 1, MPFR_RNDU);
  mpfr_div_ui(t.get(), t.get(), static_cast<unsigned long>(j0 + 1), MPFR_RNDU);
  mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDU);
  mpfr_mul(q.get(), q.get(), t.get(), MPFR_RNDU);
  Real inf(bits_);
  mpfr_set_inf(inf.get(), 1);
  if (mpfr_cmp_ui(q.get(), 1) >= 0) return inf;

  // first omitted term: j0^{(deriv)} (C + D (j0+1)^alpha) rho^{j0-deriv}
  Real coef(bits_), cpart(majorant_.C, bits_, MPFR_RNDU), dpart(majorant_.D, bits_, MPFR_RNDU);
  mpfr_set_ui(t.get(), static_cast<unsigned long>(j0 + 1), MPFR_RNDU);
  mpfr_pow(t.get(), t.get(), alpha_up_.get(), MPFR_RNDU);
  mpfr_mul(dpart.get(), dpart.get(), t.get(), MPFR_RNDU);
  mpfr_add(coef.get(), cpart.get(), dpart.get(), MPFR_RNDU);
  Real ff = falling(j0, deriv, bits_);
  mpfr_mul(coef.get(), coef.get(), ff.get(), MPFR_RNDU);
  mpfr_pow_ui(t.get(), rho.get(), static_cast<unsigned long>(j0 - deriv), MPFR_RNDU);
  mpfr_mul(coef.get(), coef.get(), t.get(), MPFR_RNDU);
  // divide by 1 - q, rounding the denominator down
  mpfr_ui_sub(t.get(), 1, q.get(), MPFR_RNDD);
  mpfr_div(coef.get(), coef.get(), t.get(), MPFR_RNDU);
  return coef;
}

std::size_t SeriesEvaluator::required_order(const Real& radius, const Real& tol, unsigned max_deriv) const {
  auto ok = [&](std::size_t M) {
    for (unsigned i = 0; i <= max_deriv; ++i)
      if (!(tail_bound(radius, M, i) <= tol)) return false;
    return true;
  };
  std::size_t hi = 16;
  while (!ok(hi)) {
    if (hi > (std::size_t(1) << 40))
      fail(ErrorKind::precision, "tail bound does not converge at radius " + radius.str(12));
    hi *= 2;
  }
  std::size_t lo = 0;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return hi;
}

std::size_t SeriesEvaluator::terms_for(const Real& radius, const Real& tol, unsigned max_deriv) const {
  auto ok = [&](std::size_t M) {
    for (unsigned i = 0; i <= max_deriv; ++i)
      if (!(tail_bound(radius, M, i) <= tol)) return false;
    return true;
  };
  if (!ok(order()))
    fail(ErrorKind::precision, "truncation order " + std::to_string(order()) + " too short at radius " +
                                   radius.str(12) + " for tail tolerance " + tol.str(4) + "; need N >= " +
                                   std::to_string(required_order(radius, tol, max_deriv)));
  std::size_t lo = 0, hi = order();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return hi;
}

template <>
void SeriesEvaluator::horner<Real>(const Real& r, std::size_t M, unsigned D, Jet<Real>& out) const {
  for (unsigned j = 0; j < 4; ++j) out.d[j] = Real(bits_);
  for (std::size_t m = M + 1; m-- > 0;) {
    for (unsigned j = D; j >= 1; --j) mpfr_fma(out.d[j].get(), out.d[j].get(), r.get(), out.d[j - 1].get(), MPFR_RNDN);
    mpfr_fma(out.d[0].get(), out.d[0].get(), r.get(), coeffs_[m].get(), MPFR_RNDN);
  }
}

template <>
void SeriesEvaluator::horner<Complex>(const Complex& z, std::size_t M, unsigned D, Jet<Complex>& out) const {
  for (unsigned j = 0; j < 4; ++j) out.d[j] = Complex(bits_);
  Real t(bits_);
  for (std::size_t m = M + 1; m-- > 0;) {
    for (unsigned j = D + 1; j-- > 0;) {
      Complex& d = out.d[j];
      mpfr_fmms(t.get(), d.re.get(), z.re.get(), d.im.get(), z.im.get(), MPFR_RNDN);
      mpfr_fmma(d.im.get(), d.re.get(), z.im.get(), d.im.get(), z.re.get(), MPFR_RNDN);
      mpfr_swap(d.re.get(), t.get());
      if (j > 0) {
        mpfr_add(d.re.get(), d.re.get(), out.d[j - 1].re.get(), MPFR_RNDN);
        mpfr_add(d.im.get(), d.im.get(), out.d[j - 1].im.get(), MPFR_RNDN);
      } else {
        mpfr_add(d.re.get(), d.re.get(), coeffs_[m].get(), MPFR_RNDN);
      }
    }
  }
}

namespace {

// Horner with p+1 terms: every entry is within 8 (terms + 2) u of the sum of
// absolute values of its terms, u = 2^{1-bits}.
Real rounding_radius(const Real& abs_sum, std::size_t terms, mpfr_prec_t bits) {
  Real e(abs_sum.bits());
  mpfr_mul_ui(e.get(), abs_sum.get(), static_cast<unsigned long>(8 * (terms + 2)), MPFR_RNDU);
  mpfr_mul_2si(e.get(), e.get(), 1 - static_cast<long>(bits), MPFR_RNDU);
  mpfr_abs(e.get(), e.get(), MPFR_RNDU);
  return e;
}

}  // namespace

Jet<Real> SeriesEvaluator::eval_real(const Real& r, unsigned max_deriv, const Real& tol) const {
  if (max_deriv > 3) fail(ErrorKind::invalid_argument, "at most three derivatives");
  Jet<Real> out;
  const std::size_t M = terms_for(r, tol, max_deriv);
  horner(r, M, max_deriv, out);
  for (unsigned j = 2; j <= max_deriv; ++j) out.d[j] = out.d[j] * static_cast<double>(j == 2 ? 2 : 6);
  out.terms = M + 1;
  for (unsigned j = 0; j <= max_deriv; ++j) {
    Real a = abs(out.d[j]) * 1.0000001;
    out.err[j] = add(tail_bound(r, M, j), rounding_radius(a, M + 1, bits_), MPFR_RNDU);
  }
  return out;
}

Jet<Complex> SeriesEvaluator::eval(const Complex& z, unsigned max_deriv, const Real& tol) const {
  if (max_deriv > 3) fail(ErrorKind::invalid_argument, "at most three derivatives");
  const Real radius = z.abs();
  const std::size_t M = terms_for(radius, tol, max_deriv);
  Jet<Complex> out;
  horner(z, M, max_deriv, out);
  for (unsigned j = 2; j <= max_deriv; ++j) out.d[j] = out.d[j] * Real(j == 2 ? 2.0 : 6.0, bits_);
  out.terms = M + 1;
  // absolute sums are the (non-negative) series evaluated at |z|
  Jet<Real> abs_jet;
  horner(radius, M, max_deriv, abs_jet);
  for (unsigned j = 2; j <= max_deriv; ++j) abs_jet.d[j] = abs_jet.d[j] * static_cast<double>(j == 2 ? 2 : 6);
  for (unsigned j = 0; j <= max_deriv; ++j) {
    Real a = abs_jet.d[j] * 1.0000001;
    out.err[j] = add(tail_bound(radius, M, j), rounding_radius(a, M + 1, bits_), MPFR_RNDU);
  }
  return out;
}

CertifiedComplexValue eval_complex(const TruncatedSeries& f, const Complex& z, const CoefficientMajorant& majorant,
                                   mpfr_prec_t bits, double tolerance) {
  if (!(z.abs() < 1.0)) fail(ErrorKind::domain, "eval_complex needs |z| < 1");
  SeriesEvaluator ev(f, majorant, bits);
  auto jet = ev.eval(z, 0, Real(tolerance, bits));
  return CertifiedComplexValue{std::move(jet.d[0]), std::move(jet.err[0])};
}

}  // namespace logconc
