#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "logconc/error.hpp"
#include "logconc/evaluator.hpp"
#include "logconc/sequences.hpp"

using namespace logconc;

TEST_CASE("geometric series at real and complex points") {
  const auto f = TruncatedSeries::one(1000);
  SeriesEvaluator ev(f, CoefficientMajorant{1, 0, 0}, 128);
  const Real r(0.8, 128);
  Real tol(1.0, 128);
  mpfr_mul_2si(tol.get(), tol.get(), -100, MPFR_RNDN);
  const auto jet = ev.eval_real(r, 3, tol);
  // 1/(1-r), 1/(1-r)^2, 2/(1-r)^3, 6/(1-r)^4
  const double x = 0.8;
  CHECK(jet.d[0].to_double() == doctest::Approx(1 / (1 - x)).epsilon(1e-14));
  CHECK(jet.d[1].to_double() == doctest::Approx(1 / std::pow(1 - x, 2)).epsilon(1e-14));
  CHECK(jet.d[2].to_double() == doctest::Approx(2 / std::pow(1 - x, 3)).epsilon(1e-14));
  CHECK(jet.d[3].to_double() == doctest::Approx(6 / std::pow(1 - x, 4)).epsilon(1e-14));
  for (int i = 0; i < 4; ++i) CHECK(jet.err[i] < 1e-20);

  const Complex z = Complex::polar(Real(0.5, 128), Real(1.0, 128));
  const auto cj = ev.eval(z, 0, tol);
  // 1/(1 - z) with z = 0.5 e^{i}
  const double zr = 0.5 * std::cos(1.0), zi = 0.5 * std::sin(1.0);
  const double den = (1 - zr) * (1 - zr) + zi * zi;
  CHECK(cj.d[0].re.to_double() == doctest::Approx((1 - zr) / den).epsilon(1e-14));
  CHECK(cj.d[0].im.to_double() == doctest::Approx(zi / den).epsilon(1e-14));
}

TEST_CASE("short truncation raises a precision error naming the order") {
  const auto f = TruncatedSeries::one(50);
  SeriesEvaluator ev(f, CoefficientMajorant{1, 0, 0}, 128);
  Real tol(1e-30, 128);
  try {
    ev.eval_real(Real(0.99, 128), 0, tol);
    FAIL("expected a precision error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precision);
  }
  CHECK(ev.required_order(Real(0.99, 128), tol, 0) > 50);
}

TEST_CASE("tail bound covers the true tail of the sigma series") {
  const auto spec = SeriesSpec::parse("sigma-shifted");
  const auto f_long = generate(spec, 3000), f_short = generate(spec, 300);
  const auto maj = *analytic_majorant(spec);
  SeriesEvaluator ev(f_short, maj, 128), ev_long(f_long, maj, 128);
  const Real r(0.9, 128);
  Real tol(1e-40, 128);
  const auto exact = ev_long.eval_real(r, 2, tol);
  // sum only the first 200 terms by hand and compare against the bound
  Real partial(0.0, 128), pw(1.0, 128);
  for (std::size_t n = 0; n < 200; ++n) {
    partial += Real(f_short[n], 128) * pw;
    pw *= r;
  }
  const Real bound = ev.tail_bound(r, 199, 0);
  CHECK(abs(exact.d[0] - partial) <= bound);
}

TEST_CASE("eval_complex refuses the unit circle") {
  const auto f = TruncatedSeries::one(10);
  CHECK_THROWS_AS(eval_complex(f, Complex(Real(1.0, 128), Real(0.0, 128)), CoefficientMajorant{}, 128, 1e-20), Error);
}
