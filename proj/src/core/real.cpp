#include "logconc/real.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace logconc {

Real::Real(mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

Real::Real(double v, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_d(value_, v, MPFR_RNDN);
}

Real::Real(const Rational& q, mpfr_prec_t bits, mpfr_rnd_t rnd) {
  mpfr_init2(value_, bits);
  mpfr_set_q(value_, q.get_mpq_t(), rnd);
}

Real::Real(const Integer& z, mpfr_prec_t bits, mpfr_rnd_t rnd) {
  mpfr_init2(value_, bits);
  mpfr_set_z(value_, z.get_mpz_t(), rnd);
}

Real::Real(const Real& other) {
  mpfr_init2(value_, other.bits());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, other.bits());
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.bits());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real& Real::operator=(double v) {
  mpfr_set_d(value_, v, MPFR_RNDN);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

std::string Real::str(int digits) const {
  if (!is_finite()) return mpfr_nan_p(value_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, value_);
  return buf.data();
}

Rational Real::to_rational() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), value_);
  return q;
}

static mpfr_prec_t pmax(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }

Real& Real::operator+=(const Real& o) {
  if (o.bits() > bits()) mpfr_prec_round(value_, o.bits(), MPFR_RNDN);
  mpfr_add(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  if (o.bits() > bits()) mpfr_prec_round(value_, o.bits(), MPFR_RNDN);
  mpfr_sub(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  if (o.bits() > bits()) mpfr_prec_round(value_, o.bits(), MPFR_RNDN);
  mpfr_mul(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  if (o.bits() > bits()) mpfr_prec_round(value_, o.bits(), MPFR_RNDN);
  mpfr_div(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}

Real add(const Real& a, const Real& b, mpfr_rnd_t rnd) {
  Real r(pmax(a, b));
  mpfr_add(r.get(), a.get(), b.get(), rnd);
  return r;
}
Real sub(const Real& a, const Real& b, mpfr_rnd_t rnd) {
  Real r(pmax(a, b));
  mpfr_sub(r.get(), a.get(), b.get(), rnd);
  return r;
}
Real mul(const Real& a, const Real& b, mpfr_rnd_t rnd) {
  Real r(pmax(a, b));
  mpfr_mul(r.get(), a.get(), b.get(), rnd);
  return r;
}
Real div(const Real& a, const Real& b, mpfr_rnd_t rnd) {
  Real r(pmax(a, b));
  mpfr_div(r.get(), a.get(), b.get(), rnd);
  return r;
}
Real pow(const Real& base, const Real& exponent, mpfr_rnd_t rnd) {
  Real r(pmax(base, exponent));
  mpfr_pow(r.get(), base.get(), exponent.get(), rnd);
  return r;
}
Real log(const Real& a, mpfr_rnd_t rnd) {
  Real r(a.bits());
  mpfr_log(r.get(), a.get(), rnd);
  return r;
}

Real operator+(const Real& a, const Real& b) { return add(a, b, MPFR_RNDN); }
Real operator-(const Real& a, const Real& b) { return sub(a, b, MPFR_RNDN); }
Real operator*(const Real& a, const Real& b) { return mul(a, b, MPFR_RNDN); }
Real operator/(const Real& a, const Real& b) { return div(a, b, MPFR_RNDN); }
Real operator-(const Real& a) {
  Real r(a.bits());
  mpfr_neg(r.get(), a.get(), MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, double b) {
  Real r(a.bits());
  mpfr_mul_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator+(const Real& a, double b) {
  Real r(a.bits());
  mpfr_add_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator-(double a, const Real& b) {
  Real r(b.bits());
  mpfr_d_sub(r.get(), a, b.get(), MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, double b) {
  Real r(a.bits());
  mpfr_sub_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, double b) {
  Real r(a.bits());
  mpfr_div_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}

#define LOGCONC_UNARY(name, fn)        \
  Real name(const Real& a) {           \
    Real r(a.bits());                  \
    fn(r.get(), a.get(), MPFR_RNDN);   \
    return r;                          \
  }
LOGCONC_UNARY(abs, mpfr_abs)
LOGCONC_UNARY(sqrt, mpfr_sqrt)
LOGCONC_UNARY(log, mpfr_log)
LOGCONC_UNARY(exp, mpfr_exp)
LOGCONC_UNARY(sin, mpfr_sin)
LOGCONC_UNARY(cos, mpfr_cos)
#undef LOGCONC_UNARY

Real atan2(const Real& y, const Real& x) {
  Real r(pmax(y, x));
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}
Real pow(const Real& base, const Real& exponent) { return pow(base, exponent, MPFR_RNDN); }
Real pow(const Real& base, long exponent) {
  Real r(base.bits());
  mpfr_pow_si(r.get(), base.get(), exponent, MPFR_RNDN);
  return r;
}
Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real pi(mpfr_prec_t bits, mpfr_rnd_t rnd) {
  Real r(bits);
  mpfr_const_pi(r.get(), rnd);
  return r;
}

Complex Complex::polar(const Real& r, const Real& theta) {
  Real s(theta.bits()), c(theta.bits());
  mpfr_sin_cos(s.get(), c.get(), theta.get(), MPFR_RNDN);
  return Complex(r * c, r * s);
}
Real Complex::abs() const {
  Real r(std::max(re.bits(), im.bits()));
  mpfr_hypot(r.get(), re.get(), im.get(), MPFR_RNDN);
  return r;
}
Real Complex::arg() const { return atan2(im, re); }

Complex operator+(const Complex& a, const Complex& b) { return Complex(a.re + b.re, a.im + b.im); }
Complex operator-(const Complex& a, const Complex& b) { return Complex(a.re - b.re, a.im - b.im); }
Complex operator*(const Complex& a, const Complex& b) {
  return Complex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
Complex operator/(const Complex& a, const Complex& b) {
  Real d = b.re * b.re + b.im * b.im;
  return Complex((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
}
Complex operator*(const Complex& a, const Real& b) { return Complex(a.re * b, a.im * b); }

}  // namespace logconc
