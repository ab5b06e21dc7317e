// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance WORKDIR
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "logconc/decomposition.hpp"
#include "logconc/error.hpp"
#include "logconc/logconcavity.hpp"
#include "logconc/nekrasov_okounkov.hpp"
#include "logconc/saddle.hpp"
#include "logconc/sequences.hpp"
#include "logconc/suites.hpp"

using namespace logconc;
namespace fs = std::filesystem;

namespace {

// pinned tolerances and budgets
constexpr double kBudget1 = 60, kBudget2 = 60, kBudget4 = 300, kBudget6 = 1800, kBudget7 = 600, kBudget8 = 600;
constexpr double kEtaLower = 1.59, kEtaUpper = 1.60;
constexpr double kStability = 0.10;           // fitted constants under n-range doubling
constexpr double kR0Tolerance = 1e-12;        // solve_r0 against n/(n+k)
constexpr double kSecondOrderLo = 3.5, kSecondOrderHi = 4.5;  // error ratio for h -> h/2
constexpr double kImagBound = 1e-8;
constexpr double kQuadStability = 1e-6;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

struct Criterion {
  int number;
  const char* title;
  double budget_seconds;
  std::function<void(Outcome&)> body;
};

fs::path work;
const LogSink quiet = [](const std::string&) {};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

void geometric_oracle(Outcome& o) {
  const unsigned K = 20;
  const std::size_t N = 200;
  const auto t = power_table(generate(SeriesSpec::parse("geometric"), N), K, N);
  std::size_t mismatches = 0, rows_concave = 0;
  for (unsigned k = 1; k <= K; ++k) {
    for (std::size_t n = 0; n <= N; ++n)
      if (t.coefficient(n, k) != Rational(binomial(static_cast<long>(n + k) - 1, k - 1))) ++mismatches;
    const auto r = logconcave_prefix(t.row(k));
    if (!r.first_violation && r.prefix_length == N - 1) ++rows_concave;
  }
  o.check(mismatches == 0, "every cell equals binomial(n+k-1, k-1): " + std::to_string(mismatches) + " mismatches");
  o.check(rows_concave == K, std::to_string(rows_concave) + "/" + std::to_string(K) + " rows fully log-concave");
}

// ---------------------------------------------------------------- 2

void partial_sums(Outcome& o) {
  const std::size_t N = 100000;
  try {
    const auto b = sigma_partial_sum_bounds(N, 256);
    o.check(b.checked_up_to == N, "checked n = 0.." + std::to_string(b.checked_up_to));
    o.check(b.all_hold, "lower and upper bounds hold at every n (256-bit directed rounding)");
    o.note("smallest upper margin " + b.min_upper_margin.str(8) + " at n = " + std::to_string(b.argmin_upper));
    o.note("smallest lower margin " + b.min_lower_margin.str(8) + " at n = " + std::to_string(b.argmin_lower));
  } catch (const Error& e) {
    o.check(false, std::string("undecided: ") + e.what());
  }
}

// ---------------------------------------------------------------- 3

void eta_constant(Outcome& o) {
  const Real lo = eta0(256, MPFR_RNDD), hi = eta0(256, MPFR_RNDU);
  o.check(lo > kEtaLower && hi < kEtaUpper, "eta0 in [" + lo.str(12) + ", " + hi.str(12) + "] inside (1.59, 1.60)");
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), 10000);
  const std::vector<std::pair<unsigned, Rational>> grid = {
      {2, Rational(1, 2)}, {3, Rational(1, 5)}, {4, Rational(1, 10)}, {6, Rational(1, 20)}};
  std::vector<Real> bases;
  bool certified = true;
  for (const auto& [digits, alpha] : grid) {
    const Rational C = rational_above_pi2_over_6(digits);
    const auto scan = certify_growth(g, C, alpha);
    if (!scan.ok) {
      certified = false;
      o.note("no certificate at C = " + C.get_str() + ": " + scan.reason);
      continue;
    }
    bases.push_back(scan.get().growth_base);
    o.note("C = " + C.get_str() + " alpha = " + alpha.get_str() + " D = " + Real(scan.D, 64).str(6) +
           " growth base " + bases.back().str(10));
  }
  o.check(certified, "all four growth certificates verified on n <= 10^4");
  bool monotone = bases.size() == grid.size();
  for (std::size_t i = 1; i < bases.size(); ++i) monotone = monotone && bases[i] > bases[i - 1];
  o.check(monotone, "growth base strictly increasing along the grid");
  o.check(!bases.empty() && bases.back() <= hi, "growth base stays below eta0");
  if (!bases.empty()) o.note("gap to eta0 at the last grid point " + (hi - bases.back()).str(4));
}

// ---------------------------------------------------------------- 4

void exact_identities(Outcome& o) {
  const unsigned K = 8;
  const std::size_t N = 60;
  for (const char* id : {"geometric", "constant:2", "sigma-shifted"}) {
    const auto f = generate(SeriesSpec::parse(id), N);
    const auto table = power_table(f, K, N);
    Decomposition d(f, N);
    std::size_t checks = 0, failures = 0;
    for (unsigned k = 1; k <= K; ++k)
      for (std::size_t n = 0; n <= N; ++n, ++checks)
        if (partition_sum_identity(table, d, k, n).status != Status::pass) ++failures;
    std::size_t sd_checks = 0, sd_failures = 0;
    for (unsigned k0 = 2; k0 <= K; ++k0)
      for (unsigned k1 = 0; k0 + k1 <= K; ++k1)
        for (long n = -1; n + 1 <= static_cast<long>(N); ++n, ++sd_checks)
          if (second_diff_identity(d, k0, k1, n).status != Status::pass) ++sd_failures;
    std::size_t bf_failures = 0;
    for (unsigned k = 1; k <= 5; ++k) {
      const auto brute = tuple_sum_bruteforce_sequence(d.split(), k, N);
      for (std::size_t n = 0; n <= N; ++n)
        if (brute[n] != table.coefficient(n, k)) ++bf_failures;
    }
    o.check(failures == 0, std::string(id) + ": partition sum " + std::to_string(checks - failures) + "/" +
                               std::to_string(checks));
    o.check(sd_failures == 0, std::string(id) + ": second difference " + std::to_string(sd_checks - sd_failures) +
                                  "/" + std::to_string(sd_checks));
    o.check(bf_failures == 0, std::string(id) + ": brute-force tuples k <= 5, " + std::to_string(bf_failures) +
                                  " mismatches");
  }
}

// ---------------------------------------------------------------- 5

void residual_properties(Outcome& o) {
  const std::size_t N = 10000;
  const std::vector<unsigned> ks = {3, 5, 8};
  const auto g = generate(SeriesSpec::parse("sigma-shifted"), N + 1);
  Decomposition d(g, N + 1);
  const ResidualOptions opt{Rational(17, 10), Rational(1, 2), 256, false};
  const ScaledSeries gs = ScaledSeries::from_series(g);
  std::size_t negatives = 0, total = 0, window = 0, window_ok = 0;
  bool c1_stable = true, e_stable = true;
  for (unsigned k : ks) {
    const auto one = one_zero_records(d, k, N, opt, 8);
    for (const auto& r : one) {
      ++total;
      if (r.sign < 0) ++negatives;
    }
    // R tends to 1 - ((pi^2/6 - 1)/(C - 1))^{k-1} > 0 while the envelope decays like n^{-1/2}
    const double limit = 1 - std::pow((M_PI * M_PI / 6 - 1) / 0.7, static_cast<double>(k - 1));
    o.note("k=" + std::to_string(k) + " R at n = " + std::to_string(N) + " is " + one.back().value.str(6) +
           ", non-decaying limit " + fmt(limit));
    const auto c1 = fit_constants(one, kStability);
    for (const auto& f : c1) {
      c1_stable = c1_stable && f.stable;
      o.note("k=" + std::to_string(k) + " C1 = " + f.constant.str(6) + " (n <= " + std::to_string(N / 2) + ": " +
             f.constant_half.str(6) + ", growth " + fmt(f.growth) + ")");
    }
    const ScaledSeries row = scaled_pow(gs, k, N + 1);
    const auto diffs = difference_records(row, k, N, opt, 8);
    for (const auto& f : fit_constants(diffs, kStability)) {
      e_stable = e_stable && f.stable;
      window += f.window_records;
      window_ok += f.window_within_one_over_k2;
      o.note("k=" + std::to_string(k) + " E(" + to_string(f.kind) + ") = " + f.constant.str(6) + " (growth " +
             fmt(f.growth) + ")");
    }
  }
  o.check(negatives == 0, "R >= 0 at " + std::to_string(total - negatives) + "/" + std::to_string(total) +
                              " points (k in {3,5,8}, n <= 10^4)");
  o.check(c1_stable, "fitted C1 stable within 10% under doubling of the n-range");
  o.check(e_stable, "fitted E stable within 10% under doubling of the n-range");
  o.note("asymptotic window k^{5/(1-alpha)} <= n <= A^k/k^2: " + std::to_string(window) + " reachable records, " +
         std::to_string(window_ok) + " within 1/k^2 (reported only)");

  // constant series: the one-zero and at-least-one-zero residuals vanish; the
  // difference residuals equal their closed forms, which are not zero
  const std::size_t Nc = 400;
  const Rational C = 2;
  const auto f = generate(SeriesSpec::parse("constant:2"), Nc + 1);
  Decomposition dc(f, Nc + 1);
  const ResidualOptions copt{C, Rational(0), 256, true};
  std::size_t nonzero = 0, checked = 0, closed_form_mismatch = 0;
  for (unsigned k : ks) {
    for (const auto& r : one_zero_records(dc, k, Nc, copt, 4)) {
      ++checked;
      if (r.sign != 0) ++nonzero;
    }
    for (unsigned k0 = 2; k0 <= k; ++k0)
      for (std::size_t n = 0; n <= Nc; n += 7) {
        ++checked;
        if (residual_at_least_one_zero(dc, k0, k - k0, n, copt).sign != 0) ++nonzero;
      }
    const ScaledSeries row = scaled_pow(ScaledSeries::from_series(f), k, Nc + 1);
    Integer fk3, fk2, fk1;
    mpz_fac_ui(fk3.get_mpz_t(), k - 3);
    mpz_fac_ui(fk2.get_mpz_t(), k - 2);
    mpz_fac_ui(fk1.get_mpz_t(), k - 1);
    for (std::size_t n = 1; n < Nc; n += 11) {
      const auto three = residual_differences(row, k, n, copt);
      const long m = static_cast<long>(n + k);
      auto ipow = [](long b, unsigned e) {
        Integer z;
        mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(b), e);
        return Rational(z);
      };
      // 1 + R: binomial / ((n+k)^p / p!) for the second, first and zeroth differences
      const Rational expect[3] = {
          Rational(binomial(static_cast<long>(n + k) - 2, k - 3) * fk3) / ipow(m, k - 3) - 1,
          Rational(binomial(static_cast<long>(n + k) - 2, k - 2) * fk2) / ipow(m, k - 2) - 1,
          Rational(binomial(static_cast<long>(n + k) - 2, k - 1) * fk1) / ipow(m, k - 1) - 1};
      for (int i = 0; i < 3; ++i)
        if (!three[i].exact || *three[i].exact != expect[i]) ++closed_form_mismatch;
    }
  }
  o.check(nonzero == 0, "constant:2: one-zero and at-least-one-zero residuals exactly 0 at " +
                            std::to_string(checked - nonzero) + "/" + std::to_string(checked) + " points");
  o.check(closed_form_mismatch == 0, "constant:2: difference residuals equal their binomial closed forms (nonzero)");
}

// ---------------------------------------------------------------- 6

void conjecture_window(Outcome& o) {
  const fs::path cache = work / "cache";
  std::size_t max_end = 0;
  std::vector<std::size_t> ends;
  for (unsigned k = 2; k <= 12; ++k) {
    // ceil(1.59^k) + k, computed exactly
    Integer num, den;
    mpz_ui_pow_ui(num.get_mpz_t(), 159, k);
    mpz_ui_pow_ui(den.get_mpz_t(), 100, k);
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    const std::size_t end = std::min<std::size_t>(5000, c.get_ui() + k);
    ends.push_back(end);
    max_end = std::max(max_end, end);
  }
  // f = z g: coefficient n of f^k is coefficient n - k of g^k
  const auto src = obtain_table("sigma-shifted", 12, max_end, cache, std::size_t(3) << 30, quiet);
  const auto direct = power_table(generate(SeriesSpec::parse("sigma"), max_end), 12, max_end);
  std::size_t violations = 0, shift_mismatch = 0;
  for (unsigned k = 2; k <= 12; ++k) {
    const std::size_t end = ends[k - 2];
    const auto g_row = src.table.row(k).truncated(end - k);
    const auto f_row = direct.row(k).truncated(end);
    for (std::size_t n = 0; n <= end; ++n)
      if ((n < k ? Rational(0) : g_row[n - k]) != f_row[n]) ++shift_mismatch;
    const auto rep = logconcave_prefix(g_row);
    const auto rep_f = logconcave_prefix(f_row);
    const auto at = rep.first_violation ? std::to_string(*rep.first_violation + k) : std::string("none");
    if (rep.first_violation) ++violations;
    if (rep.first_violation.has_value() != rep_f.first_violation.has_value()) ++shift_mismatch;
    o.note("k=" + std::to_string(k) + " n <= " + std::to_string(end) + ": first violation " + at);
  }
  o.check(shift_mismatch == 0, "shift identity: scans of z^k g^k and of f^k agree");
  o.note(violations == 0 ? "no violation inside the window for k = 2..12 (reported)"
                         : std::to_string(violations) + " rows violate inside the window (reported finding)");
  o.check(true, "window scanned for every k = 2..12; table " + std::string(src.cache_hit ? "from cache" : "built"));
}

// ---------------------------------------------------------------- 7

void saddle_machinery(Outcome& o) {
  {
    const auto spec = SeriesSpec::parse("geometric");
    const SaddleContext ctx("geometric:1", generate(spec, 200000), *analytic_majorant(spec), 128);
    double worst = 0;
    std::size_t points = 0;
    for (unsigned n : {1u, 7u, 50u, 300u, 1000u})
      for (unsigned k : {1u, 3u, 10u, 40u, 100u}) {
        const auto sp = solve_r0(ctx, n, k);
        const Rational exact(n, n + k);
        const double err = abs(sp.r0 - Real(exact, 128)).to_double();
        worst = std::max(worst, err);
        ++points;
      }
    o.check(worst <= kR0Tolerance,
            "geometric r0 = n/(n+k) on " + std::to_string(points) + " points, worst error " + fmt(worst));
  }
  for (const char* id : {"geometric", "sigma-shifted"}) {
    const auto spec = SeriesSpec::parse(id);
    const SaddleContext ctx(id, generate(spec, 6000), *analytic_majorant(spec), 192);
    const auto sp = solve_r0(ctx, 80, 10);
    const Real A = A_of_r(ctx, sp.r0).value;
    const Real h = (1.0 - sp.r0) * 0.01;
    const double e1 = abs(psi_first_derivative_fd(ctx, sp.r0, h) - A).to_double();
    const double e2 = abs(psi_first_derivative_fd(ctx, sp.r0, h * 0.5) - A).to_double();
    const double ratio = e1 / e2;
    o.check(ratio >= kSecondOrderLo && ratio <= kSecondOrderHi,
            std::string(id) + ": psi'(0) - A(r0) error ratio under h -> h/2 is " + fmt(ratio));
  }
  RunConfig cfg;
  cfg.series = "sigma-shifted";
  cfg.N = 200;
  cfg.cache_dir = work / "cache";
  cfg.output = work / "saddle";
  cfg.saddle_points = {{10, 50}, {20, 200}, {40, 1000}};
  const auto rep = cmd_check(cfg, "saddle", quiet);
  auto measured = [](const CheckRecord& r, const std::string& key) -> std::string {
    for (const auto& [k, v] : r.measured)
      if (k == key) return v;
    return "";
  };
  std::size_t integrals = 0, positive = 0, imag_ok = 0, stable = 0, stable_records = 0;
  double worst_imag = 0, worst_change = 0;
  for (const auto& r : rep.records) {
    if (r.id.rfind("F_positive", 0) == 0 || r.id.rfind("theta2_integral_positive", 0) == 0) {
      ++integrals;
      if (measured(r, "positive") == "true" && std::stod(measured(r, "value")) > 0) ++positive;
      const double ib = std::stod(measured(r, "imag_bound"));
      worst_imag = std::max(worst_imag, ib);
      if (ib < kImagBound) ++imag_ok;
    }
    if (r.id.rfind("quadrature_stability", 0) == 0) {
      ++stable_records;
      const double c = std::stod(measured(r, "max_relative_change"));
      worst_change = std::max(worst_change, c);
      if (c <= kQuadStability) ++stable;
    }
  }
  o.check(rep.count(Status::fail) == 0, "saddle suite has no failing record");
  o.check(integrals == 18 && positive == integrals,
          "integrals positive at (10,50), (20,200), (40,1000): " + std::to_string(positive) + "/" +
              std::to_string(integrals));
  o.check(imag_ok == integrals, "certified imaginary parts below 1e-8, worst " + fmt(worst_imag));
  o.check(stable_records == 3 && stable == 3,
          "quadrature stable to 1e-6 under tighter tolerance and more nodes, worst change " + fmt(worst_change));
}

// ---------------------------------------------------------------- 8

void nk_crossvalidation(Outcome& o) {
  const auto table = q_recurrence(200);
  const auto brute = q_bruteforce_table(12);
  std::size_t rec_mismatch = 0;
  for (unsigned n = 0; n <= 12; ++n)
    if (!(table.polys[n] == brute.polys[n])) ++rec_mismatch;
  o.check(rec_mismatch == 0, "recurrence equals brute force for n <= 12");

  QTable head;
  head.polys.assign(table.polys.begin(), table.polys.begin() + 61);
  const std::vector<Rational> zs = {Rational(0), Rational(1), Rational(-1)};
  std::size_t spot_pass = 0;
  for (const auto& r : identity_spotcheck(head, zs))
    if (r.status == Status::pass) ++spot_pass;
  o.check(spot_pass == zs.size(), "product identity at z = 0, 1, -1 for N = 60");

  const auto p = partition_numbers(200);
  std::size_t p_mismatch = 0;
  for (unsigned n = 0; n <= 200; ++n)
    if (table.polys[n].eval(Rational(0)) != Rational(p[n])) ++p_mismatch;
  o.check(p_mismatch == 0, "Q_n(0) = p(n) for n <= 200");

  QTable scan_table;
  scan_table.polys.assign(table.polys.begin(), table.polys.begin() + 101);
  const auto scan = unimodality_scan(scan_table, 8);
  std::vector<std::string> flagged;
  bool reverified = true;
  for (const auto& e : scan)
    if (!e.unimodal.unimodal) {
      flagged.push_back(std::to_string(e.n));
      if (e.n <= kBruteforceMaxN) reverified = reverified && e.bruteforce_confirms.value_or(false);
    }
  std::string list;
  for (const auto& s : flagged) list += (list.empty() ? "" : ",") + s;
  o.note("strict unimodality over n = 0..100: " + std::to_string(scan.size() - flagged.size()) + " unimodal, flagged n = {" +
         list + "}");
  o.check(reverified, "flagged n within brute-force reach re-verified by direct enumeration");
}

}  // namespace

int main(int argc, char** argv) {
  work = fs::absolute(argc > 1 ? argv[1] : "acceptance_work");
  fs::create_directories(work);
  const std::vector<Criterion> criteria = {
      {1, "geometric oracle, K=20 N=200", kBudget1, geometric_oracle},
      {2, "sigma partial-sum bounds for n <= 10^5", kBudget2, partial_sums},
      {3, "eta0 in (1.59, 1.60) and growth base convergence", 60, eta_constant},
      {4, "exact decomposition identities", kBudget4, exact_identities},
      {5, "residual properties and fitted constants", 1800, residual_properties},
      {6, "log-concavity window for the sigma series", kBudget6, conjecture_window},
      {7, "saddle machinery", kBudget7, saddle_machinery},
      {8, "Nekrasov-Okounkov cross-validation", kBudget8, nk_crossvalidation},
  };
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    o.check(secs <= c.budget_seconds, "runtime " + fmt(secs) + " s within " + fmt(c.budget_seconds) + " s");
    if (!o.pass) ++failed;
    std::printf("%s criterion %d: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.number, c.title, secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    summary.push_back({{"criterion", c.number}, {"title", c.title}, {"pass", o.pass}, {"seconds", secs},
                       {"details", o.details}});
  }
  std::ofstream(work / "acceptance.json") << summary.dump(2) << '\n';
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
