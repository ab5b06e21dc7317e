#include <doctest.h>

#include "helpers.hpp"
#include "logconc/error.hpp"
#include "logconc/sequences.hpp"
#include "logconc/series.hpp"

using namespace logconc;
using testing::qs;
using testing::series_of;

TEST_CASE("negative coefficients are rejected") {
  CHECK_THROWS_AS(TruncatedSeries(qs({"1", "-1/2"})), Error);
  CHECK_THROWS_AS(TruncatedSeries(std::vector<Rational>{}), Error);
}

TEST_CASE("schoolbook and kronecker kernels agree") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<unsigned long> big(0, 1ul << 40);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t la = 1 + rng() % 60, lb = 1 + rng() % 60, N = rng() % 80;
    std::vector<Integer> a(la), b(lb);
    for (auto& x : a) x = Integer(std::to_string(big(rng))) * Integer(std::to_string(big(rng)));
    for (auto& x : b) x = Integer(std::to_string(big(rng)));
    const auto s = convolve(a, b, N, ConvolutionKernel::schoolbook);
    const auto k = convolve(a, b, N, ConvolutionKernel::kronecker);
    const auto automatic = convolve(a, b, N);
    CHECK(s == k);
    CHECK(s == automatic);
  }
}

TEST_CASE("kronecker kernel refuses negative integers") {
  std::vector<Integer> a = {1, -2}, b = {1, 1};
  CHECK_THROWS_AS(convolve(a, b, 2, ConvolutionKernel::kronecker), Error);
  CHECK(convolve(a, b, 2, ConvolutionKernel::schoolbook) == std::vector<Integer>{1, -1, -2});
}

TEST_CASE("series_mul of 1/(1-z) with itself gives n+1") {
  const auto one = TruncatedSeries::one(30);
  const auto sq = series_mul(one, one, 30);
  for (std::size_t n = 0; n <= 30; ++n) CHECK(sq[n] == Rational(static_cast<long>(n + 1)));
}

TEST_CASE("series_pow conventions and binomial rows") {
  const auto one = TruncatedSeries::one(25);
  const auto p0 = series_pow(one, 0, 25);
  CHECK(p0[0] == 1);
  for (std::size_t n = 1; n <= 25; ++n) CHECK(p0[n] == 0);
  for (unsigned k = 1; k <= 9; ++k) {
    const auto pk = series_pow(one, k, 25);
    for (std::size_t n = 0; n <= 25; ++n) CHECK(pk[n] == Rational(binomial(static_cast<long>(n + k - 1), k - 1)));
  }
}

TEST_CASE("series_pow agrees with repeated multiplication on random series") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const TruncatedSeries f(testing::random_sequence(rng, 30));
    TruncatedSeries direct = f;
    for (unsigned k = 2; k <= 6; ++k) {
      direct = series_mul(direct, f, 29, ConvolutionKernel::schoolbook);
      CHECK(series_pow(f, k, 29) == direct);
    }
  }
}

TEST_CASE("derivatives of the shifted sigma series") {
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 10);
  const auto d1 = derivative(g, 1);
  // (n+1) sigma_{-1}(n+2)
  CHECK(d1[0] == Rational(3, 2));
  CHECK(d1[1] == Rational(8, 3));
  CHECK(d1[2] == Rational(21, 4));
  const auto d2 = derivative(g, 2);
  CHECK(d2[0] == 2 * Rational(4, 3));  // 2! * sigma_{-1}(3)
  CHECK(derivative(g, 0) == g);
  CHECK_THROWS_AS(derivative(g, 4), Error);
}

TEST_CASE("shift_up and shift_down invert each other") {
  const auto f = series_of({"1", "2", "3/2", "5"});
  const auto up = shift_up(f, 2, 5);
  CHECK(up[0] == 0);
  CHECK(up[1] == 0);
  CHECK(up[2] == 1);
  CHECK(up[4] == Rational(3, 2));
  CHECK(up[5] == 5);
  CHECK(shift_down(up, 2) == f.truncated(3));
  CHECK_THROWS_AS(shift_down(f, 1), Error);
}

TEST_CASE("ScaledSeries round trip and scaled_pow") {
  const auto f = series_of({"1", "1/2", "1/3", "1/4", "1/5"});
  const auto s = ScaledSeries::from_series(f);
  CHECK(s.to_series() == f);
  CHECK(s.coefficient(3) == Rational(1, 4));
  const auto p = scaled_pow(s, 3, 4).to_series();
  CHECK(p == series_pow(f, 3, 4));
}

TEST_CASE("power table rows and budget") {
  const auto f = generate(SeriesSpec::parse("constant:2"), 40);
  const auto t = power_table(f, 5, 40);
  CHECK(t.K() == 5);
  CHECK(t.N() == 40);
  for (unsigned k = 1; k <= 5; ++k)
    for (std::size_t n = 0; n <= 40; n += 7)
      CHECK(t.coefficient(n, k) == Rational(Integer(1) << k) * Rational(binomial(static_cast<long>(n + k - 1), k - 1)));
  CHECK_THROWS_AS(t.row(0), Error);
  CHECK_THROWS_AS(t.row(6), Error);
  try {
    power_table(f, 5, 40, TableBudget{16});
    FAIL("budget not enforced");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource);
  }
}
