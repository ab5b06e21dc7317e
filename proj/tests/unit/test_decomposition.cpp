#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "logconc/decomposition.hpp"
#include "logconc/error.hpp"
#include "logconc/sequences.hpp"

using namespace logconc;

TEST_CASE("split series") {
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 6);
  const auto s = SplitSeries::from(g);
  CHECK(s.ones_part[0] == 0);
  CHECK(s.ones_part[1] == Rational(1, 2));
  CHECK(s.ones_part[5] == 1);  // sigma_{-1}(6) - 1
}

TEST_CASE("small a_I values by hand") {
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 10);
  Decomposition d(g, 10);
  // ones_part = (0, 1/2, 1/3, 3/4, ...)
  CHECK(d.a_I(0, 0, 0) == 1);
  CHECK(d.a_I(0, 0, 3) == 0);
  CHECK(d.a_I(0, 1, 1) == Rational(1, 2));
  CHECK(d.a_I(0, 2, 2) == Rational(1, 4));
  CHECK(d.a_I(0, 2, 3) == Rational(1, 3));  // 2 * (1/2)(1/3)
  CHECK(d.a_I(1, 1, 3) == Rational(1, 2) + Rational(1, 3) + Rational(3, 4));
  CHECK(d.a_I(2, 0, 4) == 5);
  CHECK(d.a_I(2, 0, -1) == 0);
  CHECK_THROWS_AS(d.a_I(1, 1, 11), Error);
}

TEST_CASE("decomposition agrees with brute force over tuples") {
  for (const char* id : {"geometric", "constant:2", "sigma-shifted"}) {
    CAPTURE(id);
    const std::size_t N = 25;
    const auto f = generate(SeriesSpec::parse(id), N);
    const auto table = power_table(f, 5, N);
    Decomposition d(f, N);
    for (unsigned k = 1; k <= 5; ++k) {
      const auto brute = tuple_sum_bruteforce_sequence(d.split(), k, N);
      for (std::size_t n = 0; n <= N; ++n) {
        REQUIRE(brute[n] == table.coefficient(n, k));
        CHECK(partition_sum_identity(table, d, k, n).status == Status::pass);
      }
      std::vector<int> tuple(k, 0);
      for (unsigned k1 = 0; k1 <= k; ++k1) {
        for (unsigned i = 0; i < k; ++i) tuple[i] = i < k1 ? 1 : 0;
        const auto seq = a_I_bruteforce_sequence(d.split(), tuple, N);
        for (std::size_t n = 0; n <= N; ++n) REQUIRE(seq[n] == d.a_I(k - k1, k1, static_cast<long>(n)));
      }
    }
  }
}

TEST_CASE("second differences remove two zeros") {
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 40);
  Decomposition d(g, 40);
  for (unsigned k0 = 2; k0 <= 6; ++k0)
    for (unsigned k1 = 0; k1 <= 3; ++k1)
      for (long n = -1; n < 39; ++n) REQUIRE(second_diff_identity(d, k0, k1, n).status == Status::pass);
  CHECK_THROWS_AS(second_diff_identity(d, 1, 1, 0), Error);
}

TEST_CASE("a wrong table is reported as a failure") {
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 10);
  const auto other = power_table(generate(SeriesSpec::parse("geometric"), 10), 3, 10);
  Decomposition d(g, 10);
  const auto r = partition_sum_identity(other, d, 2, 3);
  CHECK(r.status == Status::fail);
  CHECK_FALSE(r.measured.empty());
}

TEST_CASE("constant series: flat residuals vanish exactly") {
  const Rational C(5, 2);
  const auto f = generate(SeriesSpec::parse("constant:5/2"), 300);
  Decomposition d(f, 300);
  ResidualOptions opt{C, Rational(1, 2), 128, true};
  for (unsigned k = 2; k <= 8; ++k)
    for (std::size_t n = 0; n <= 300; n += 13) {
      const auto r = residual_one_zero(d, k, n, opt);
      CHECK(r.sign == 0);
      CHECK(*r.exact == 0);
      CHECK(r.sign_as_claimed);
      const auto s = residual_at_least_one_zero(d, 2, k - 1, n, opt);
      CHECK(s.sign == 0);
    }
  const auto recs = one_zero_records(d, 5, 300, opt, 2);
  const auto fits = fit_constants(recs);
  REQUIRE(fits.size() == 1);
  CHECK(fits[0].constant.sign() == 0);
  CHECK(fits[0].growth == 1);
  CHECK(fits[0].stable);
}

TEST_CASE("difference residuals against closed forms") {
  // constant C: a_{n,k} = C^k binom(n+k-1, k-1)
  const Rational C = 2;
  const unsigned k = 4;
  const std::size_t N = 50;
  const auto row = scaled_pow(ScaledSeries::from_series(generate(SeriesSpec::parse("constant:2"), N)), k, N);
  ResidualOptions opt{C, Rational(0), 128, true};
  const auto three = residual_differences(row, k, 10, opt);
  // second difference is C^k binom(n+k-2, k-3) evaluated at n+1
  const Rational d2 = 16 * Rational(binomial(10 + 1 + k - 3, k - 3));
  const Rational M2 = 16 * Rational(14) / 1;  // C^k (n+k)^{k-3}/(k-3)!
  CHECK(*three[0].exact == d2 / M2 - 1);
  const Rational d0 = 16 * Rational(binomial(9 + k - 1, k - 1));
  const Rational M0 = 16 * Rational(14 * 14 * 14, 6);
  CHECK(*three[2].exact == d0 / M0 - 1);
  CHECK(three[1].kind == ResidualKind::first_diff);
  CHECK_THROWS_AS(residual_differences(row, 2, 10, opt), Error);
  CHECK_THROWS_AS(residual_differences(row, k, N, opt), Error);
}

TEST_CASE("one-zero residual is non-negative for the sigma series") {
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 400);
  Decomposition d(g, 400);
  ResidualOptions opt{Rational(17, 10), Rational(1, 2), 128, false};
  for (unsigned k : {3u, 5u, 8u}) {
    const auto recs = one_zero_records(d, k, 400, opt, 3);
    for (const auto& r : recs) CHECK(r.sign_as_claimed);
  }
}

TEST_CASE("residual CSV round trip") {
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 40);
  Decomposition d(g, 40);
  ResidualOptions opt{Rational(17, 10), Rational(1, 2), 128, true};
  const auto recs = one_zero_records(d, 3, 40, opt);
  const auto fits = fit_constants(recs);
  std::stringstream ss;
  write_residual_csv(ss, "sigma-shifted", recs, fits);
  const auto rows = read_residual_csv(ss, "mem");
  REQUIRE(rows.size() == recs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].kind == ResidualKind::one_zero);
    CHECK(rows[i].k1 == 2);
    CHECK(rows[i].n == recs[i].n);
    CHECK(rows[i].residual == doctest::Approx(recs[i].value.to_double()));
  }
  std::istringstream bad("sigma-shifted,one_zero,1,2,x,,,0.1,0.2,true\n");
  CHECK_THROWS_AS(read_residual_csv(bad, "bad"), Error);
  std::istringstream cols("a,b\n");
  CHECK_THROWS_AS(read_residual_csv(cols, "cols"), Error);
  CHECK(residual_kind_from_string("R2") == ResidualKind::second_diff);
  CHECK_FALSE(residual_kind_from_string("nope").has_value());
}
