#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "logconc/real.hpp"
#include "logconc/series.hpp"

namespace logconc {

/// a_n <= C + D * (n+1)^alpha for every n (including beyond the truncation).
/// Drives the certified tail bounds of the evaluator.
struct CoefficientMajorant {
  Rational C = 1;
  Rational D = 0;
  Rational alpha = 0;
};

struct CertifiedComplexValue {
  Complex value;
  Real error_radius;  // bounds |true - value|: series tail plus rounding
};

/// Value and derivatives 0..3 of f at one point with per-entry error radii.
template <class T>
struct Jet {
  std::array<T, 4> d;
  std::array<Real, 4> err;
  std::size_t terms = 0;  // coefficients a_0..a_{terms-1} were summed
};

/// Horner evaluation of a truncated series at working precision `bits`.
/// Coefficients are converted once; each evaluation sums only as many terms
/// as the tail bound at that radius requires.
class SeriesEvaluator {
 public:
  SeriesEvaluator(const TruncatedSeries& f, CoefficientMajorant majorant, mpfr_prec_t bits);

  mpfr_prec_t bits() const noexcept { return bits_; }
  std::size_t order() const noexcept { return coeffs_.size() - 1; }
  const CoefficientMajorant& majorant() const noexcept { return majorant_; }

  /// Bound on the omitted part of f^{(deriv)} at |z| = radius when only
  /// a_0..a_M are summed. +inf when the geometric majorant does not converge.
  Real tail_bound(const Real& radius, std::size_t M, unsigned deriv) const;

  /// Smallest M <= order() whose tail bound is <= tol for every derivative
  /// up to max_deriv. Throws Error(precision) naming the order that would be
  /// needed otherwise.
  std::size_t terms_for(const Real& radius, const Real& tol, unsigned max_deriv) const;

  /// Order that would make the tail bound <= tol (may exceed order()).
  std::size_t required_order(const Real& radius, const Real& tol, unsigned max_deriv) const;

  Jet<Complex> eval(const Complex& z, unsigned max_deriv, const Real& tol) const;
  Jet<Real> eval_real(const Real& r, unsigned max_deriv, const Real& tol) const;

 private:
  template <class T>
  void horner(const T& z, std::size_t M, unsigned max_deriv, Jet<T>& out) const;

  std::vector<Real> coeffs_;
  CoefficientMajorant majorant_;
  Real alpha_up_;
  mpfr_prec_t bits_;
};

/// Certified value of f(z) for |z| < 1. `tolerance` caps the tail bound.
CertifiedComplexValue eval_complex(const TruncatedSeries& f, const Complex& z, const CoefficientMajorant& majorant,
                                   mpfr_prec_t bits, double tolerance);

}  // namespace logconc
