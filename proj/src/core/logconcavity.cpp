#include "logconc/logconcavity.hpp"

#include <cmath>

#include "logconc/error.hpp"
#include "logconc/real.hpp"

namespace logconc {

namespace {

template <class T>
ConcavityReport scan(std::span<const T> a) {
  ConcavityReport out;
  const std::size_t N = a.empty() ? 0 : a.size() - 1;
  out.scanned_up_to = N;
  std::size_t s = 0;
  while (s < a.size() && sgn(a[s]) == 0) ++s;
  out.first_nonzero = s;
  // indices n <= s have a zero neighbour on the left and hold trivially
  for (std::size_t n = std::max<std::size_t>(s + 1, 1); n + 1 <= N; ++n) {
    if (compare_products(a[n], a[n], a[n - 1], a[n + 1]) < 0) {
      out.first_violation = n;
      out.prefix_length = n - 1;
      return out;
    }
  }
  out.prefix_length = N >= 1 ? N - 1 : 0;
  return out;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  fit.points = x.size();
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : 1;
  return fit;
}

nlohmann::ordered_json fit_json(const std::optional<LinearFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"r2", f->r2}, {"points", f->points}};
}

}  // namespace

ConcavityReport logconcave_prefix(std::span<const Rational> seq) { return scan(seq); }
ConcavityReport logconcave_prefix(std::span<const Integer> seq) { return scan(seq); }

UnimodalityReport unimodal_check(std::span<const Rational> a, UnimodalMode mode) {
  if (a.empty()) fail(ErrorKind::invalid_argument, "unimodal_check needs a non-empty sequence");
  UnimodalityReport out;
  const bool strict = mode == UnimodalMode::strict;
  auto rising = [&](std::size_t i) { return strict ? a[i] < a[i + 1] : a[i] <= a[i + 1]; };
  auto falling = [&](std::size_t i) { return strict ? a[i] > a[i + 1] : a[i] >= a[i + 1]; };
  const std::size_t N = a.size() - 1;
  std::size_t i = 0;
  while (i < N && rising(i)) ++i;
  const std::size_t M = i;
  while (i < N && falling(i)) ++i;
  if (i == N) {
    out.unimodal = true;
    out.mode_index = M;
  } else {
    out.first_offense = std::make_pair(i, i + 1);
  }
  return out;
}

BreakpointCurve breakpoint_curve(std::span<const ConcavityReport> rows, std::span<const unsigned> ks) {
  if (rows.size() != ks.size()) fail(ErrorKind::invalid_argument, "breakpoint_curve: rows and ks differ in length");
  BreakpointCurve c;
  std::vector<double> xc, xl, y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    BreakpointEntry e{ks[i], r.prefix_length, r.first_violation, !r.first_violation.has_value()};
    c.entries.push_back(e);
    if (e.censored || e.prefix_length == 0) continue;
    xc.push_back(std::cbrt(static_cast<double>(e.k)));
    xl.push_back(static_cast<double>(e.k));
    y.push_back(std::log(static_cast<double>(e.prefix_length)));
  }
  if (rows.size() == 1) {
    c.diagnostics = "single row, no fit";
  } else if (y.empty()) {
    c.diagnostics = "all rows censored (no violation within N); fit unavailable";
  } else if (y.size() < 2) {
    c.diagnostics = "fewer than two uncensored rows; fit unavailable";
  } else {
    c.fit_cuberoot = least_squares(xc, y);
    c.fit_linear = least_squares(xl, y);
  }
  return c;
}

BreakpointCurve breakpoint_curve(const PowerTable& table) {
  std::vector<ConcavityReport> rows;
  std::vector<unsigned> ks;
  for (unsigned k = 1; k <= table.K(); ++k) {
    rows.push_back(logconcave_prefix(table.row(k)));
    ks.push_back(k);
  }
  return breakpoint_curve(rows, ks);
}

RatioResult ratio_criterion(std::span<const Rational> a, unsigned k, std::size_t n) {
  if (n < 1 || n + 1 >= a.size())
    fail(ErrorKind::invalid_argument, "ratio_criterion needs 1 <= n <= N-1, got n = " + std::to_string(n));
  RatioResult out;
  out.n = n;
  out.k = k;
  const Rational d1 = a[n] - a[n - 1];
  const Rational d2 = a[n + 1] - 2 * a[n] + a[n - 1];
  out.log_concave_at_n = compare_products(a[n], a[n], a[n - 1], a[n + 1]) >= 0;
  if (k >= 2) out.reference = Rational(k - 2, k - 1);
  if (sgn(d1) != 0) {
    out.ratio = a[n - 1] * d2 / (d1 * d1);
    if (out.reference) out.versus_reference = cmp(*out.ratio, *out.reference) > 0 ? 1 : (*out.ratio == *out.reference ? 0 : -1);
  }
  return out;
}

std::string decimal(const Rational& q, int digits) {
  Real r(q, 64 + static_cast<mpfr_prec_t>(digits * 4));
  return r.str(digits);
}

std::vector<std::size_t> ratio_sample_points(std::size_t N) {
  std::vector<std::size_t> pts;
  if (N < 2) return pts;
  for (std::size_t n = 1; n <= N - 1; n *= 2) pts.push_back(n);
  if (pts.back() != N - 1) pts.push_back(N - 1);
  return pts;
}

nlohmann::ordered_json to_json(const ConcavityReport& r) {
  nlohmann::ordered_json j;
  j["prefix_length"] = r.prefix_length;
  j["first_violation"] = r.first_violation ? nlohmann::ordered_json(*r.first_violation) : nullptr;
  j["scanned_up_to"] = r.scanned_up_to;
  j["first_nonzero"] = r.first_nonzero;
  return j;
}

nlohmann::ordered_json to_json(const UnimodalityReport& r) {
  nlohmann::ordered_json j;
  j["unimodal"] = r.unimodal;
  j["mode_index"] = r.mode_index ? nlohmann::ordered_json(*r.mode_index) : nullptr;
  if (r.first_offense)
    j["first_offense"] = {r.first_offense->first, r.first_offense->second};
  else
    j["first_offense"] = nullptr;
  return j;
}

nlohmann::ordered_json to_json(const BreakpointCurve& c) {
  nlohmann::ordered_json j;
  auto& e = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& x : c.entries)
    e.push_back({{"k", x.k},
                 {"prefix_length", x.prefix_length},
                 {"first_violation", x.first_violation ? nlohmann::ordered_json(*x.first_violation) : nullptr},
                 {"censored", x.censored}});
  j["fit_log_L_vs_cuberoot_k"] = fit_json(c.fit_cuberoot);
  j["fit_log_L_vs_k"] = fit_json(c.fit_linear);
  j["diagnostics"] = c.diagnostics;
  return j;
}

nlohmann::ordered_json to_json(const RatioResult& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["k"] = r.k;
  j["ratio"] = r.ratio ? nlohmann::ordered_json(decimal(*r.ratio)) : nullptr;
  j["reference"] = r.reference ? nlohmann::ordered_json(to_fraction_string(*r.reference)) : nullptr;
  j["versus_reference"] = r.versus_reference;
  j["log_concave_at_n"] = r.log_concave_at_n;
  return j;
}

nlohmann::ordered_json row_report_json(const std::string& series_id, unsigned k, const ConcavityReport& r,
                                       std::span<const RatioResult> ratios_sampled) {
  nlohmann::ordered_json j;
  j["series_id"] = series_id;
  j["k"] = k;
  j["N"] = r.scanned_up_to;
  j["prefix_length"] = r.prefix_length;
  j["first_violation"] = r.first_violation ? nlohmann::ordered_json(*r.first_violation) : nullptr;
  auto& arr = j["ratios_sampled"] = nlohmann::ordered_json::array();
  for (const auto& x : ratios_sampled) arr.push_back(to_json(x));
  return j;
}

}  // namespace logconc
