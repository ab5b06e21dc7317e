#include <doctest.h>

#include "helpers.hpp"
#include "logconc/error.hpp"
#include "logconc/rational.hpp"
#include "logconc/real.hpp"

using namespace logconc;
using testing::q;

TEST_CASE("parse_rational canonicalizes and rejects decimals") {
  CHECK(q("3/6") == Rational(1, 2));
  CHECK(q("-4/2") == Rational(-2));
  CHECK(q("17") == Rational(17));
  CHECK(q(" 5/10 ") == Rational(1, 2));
  CHECK_THROWS_AS(parse_rational("1.5"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("a/b"), Error);
  try {
    parse_rational("2.5");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::format);
  }
}

TEST_CASE("fraction strings always carry the slash") {
  CHECK(to_fraction_string(Rational(2)) == "2/1");
  CHECK(to_fraction_string(parse_rational("-3/9")) == "-1/3");
  CHECK(parse_rational(to_fraction_string(Rational(123456789, 1000))) == Rational(123456789, 1000));
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(10, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(4, -1) == 0);
  // Pascal's rule against the library value
  for (int n = 1; n < 40; ++n)
    for (int k = 1; k < n; ++k) CHECK(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
}

TEST_CASE("compare_products matches direct multiplication") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto v = testing::random_sequence(rng, 4);
    const Rational lhs = v[0] * v[1], rhs = v[2] * v[3];
    const int expect = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    CHECK(compare_products(v[0], v[1], v[2], v[3]) == expect);
  }
  CHECK(compare_products(Integer(3), Integer(4), Integer(2), Integer(6)) == 0);
}

TEST_CASE("common denominator and bit length") {
  auto v = testing::qs({"1/4", "5/6", "7"});
  CHECK(common_denominator(v) == 12);
  CHECK(bit_length(Integer(255)) == 8);
  CHECK(bit_length(Integer(256)) == 9);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("Real directed rounding brackets exact values") {
  const Rational third(1, 3);
  Real lo(third, 128, MPFR_RNDD), hi(third, 128, MPFR_RNDU);
  CHECK(lo < hi);
  CHECK(lo.to_rational() < third);
  CHECK(hi.to_rational() > third);
  const Real p_lo = pi(128, MPFR_RNDD), p_hi = pi(128, MPFR_RNDU);
  CHECK(p_lo.to_rational() < Rational(355, 113));
  CHECK(p_lo > 3.14159265358979);
  CHECK(p_hi < 3.14159265358980);
}

TEST_CASE("Complex polar form round trip") {
  const Real r(0.75, 128), t(1.25, 128);
  const Complex z = Complex::polar(r, t);
  CHECK(std::abs(z.abs().to_double() - 0.75) < 1e-30);
  CHECK(std::abs(z.arg().to_double() - 1.25) < 1e-15);
}
