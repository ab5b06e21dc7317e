#pragma once

#include <mpfr.h>

#include <string>

#include "logconc/rational.hpp"

namespace logconc {

/// RAII owner of an mpfr_t. Arithmetic operators round to nearest at the
/// larger operand precision; the free functions taking an mpfr_rnd_t are for
/// directed-rounding bounds.
class Real {
 public:
  static constexpr mpfr_prec_t kDefaultBits = 256;

  explicit Real(mpfr_prec_t bits = kDefaultBits);
  Real(double v, mpfr_prec_t bits);
  Real(const Rational& q, mpfr_prec_t bits, mpfr_rnd_t rnd = MPFR_RNDN);
  Real(const Integer& z, mpfr_prec_t bits, mpfr_rnd_t rnd = MPFR_RNDN);
  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  Real& operator=(double v);
  ~Real();

  mpfr_ptr get() noexcept { return value_; }
  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_prec_t bits() const noexcept { return mpfr_get_prec(value_); }

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Scientific notation with `digits` significant digits.
  std::string str(int digits = 20) const;
  /// Exact value of the binary float as a rational.
  Rational to_rational() const;
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

 private:
  mpfr_t value_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator-(const Real& a);
Real operator*(const Real& a, double b);
Real operator+(const Real& a, double b);
Real operator-(double a, const Real& b);
Real operator-(const Real& a, double b);
Real operator/(const Real& a, double b);

inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }
inline bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.get(), b) < 0; }
inline bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.get(), b) > 0; }

Real abs(const Real& a);
Real sqrt(const Real& a);
Real log(const Real& a);
Real exp(const Real& a);
Real sin(const Real& a);
Real cos(const Real& a);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& base, const Real& exponent);
Real pow(const Real& base, long exponent);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real pi(mpfr_prec_t bits, mpfr_rnd_t rnd = MPFR_RNDN);

/// Directed-rounding helpers for one-sided bounds.
Real add(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real sub(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real mul(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real div(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real pow(const Real& base, const Real& exponent, mpfr_rnd_t rnd);
Real log(const Real& a, mpfr_rnd_t rnd);

/// Complex number in two Reals; only what the evaluators need.
struct Complex {
  Real re;
  Real im;

  explicit Complex(mpfr_prec_t bits = Real::kDefaultBits) : re(bits), im(bits) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  /// r * e^{i theta}
  static Complex polar(const Real& r, const Real& theta);
  Real abs() const;
  Real arg() const;
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);

}  // namespace logconc
