#include "logconc/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "logconc/error.hpp"

namespace logconc {

SaddleContext::SaddleContext(std::string series_id, const TruncatedSeries& f, CoefficientMajorant majorant,
                             mpfr_prec_t bits, long tail_bits)
    : id_(std::move(series_id)), ev_(f, std::move(majorant), bits), tail_tol_(1.0, bits) {
  if (bits < 128) fail(ErrorKind::invalid_argument, "saddle computations need at least 128 bits");
  if (tail_bits < 0) tail_bits = static_cast<long>(bits) - 32;
  mpfr_mul_2si(tail_tol_.get(), tail_tol_.get(), -tail_bits, MPFR_RNDD);
}

Jet<Real> SaddleContext::real_jet(const Real& r, unsigned max_deriv) const {
  return ev_.eval_real(r, max_deriv, tail_tol_);
}

Jet<Complex> SaddleContext::complex_jet(const Complex& z, unsigned max_deriv) const {
  return ev_.eval(z, max_deriv, tail_tol_);
}

CertifiedComplexValue SaddleContext::at(const Real& r, const Real& theta) const {
  auto jet = complex_jet(Complex::polar(r, theta), 0);
  return CertifiedComplexValue{std::move(jet.d[0]), std::move(jet.err[0])};
}

namespace {

Real factorial_real(unsigned i, mpfr_prec_t bits) {
  Real f(1.0, bits);
  for (unsigned t = 2; t <= i; ++t) f = f * static_cast<double>(t);
  return f;
}

double rel_change(const Real& a, const Real& b) {
  if (b.sign() == 0) return a.sign() == 0 ? 0.0 : INFINITY;
  return std::abs((a / b).to_double() - 1.0);
}

}  // namespace

DerivativeBound derivative_bounds(const SaddleContext& ctx, const Real& r, unsigned i,
                                  std::optional<Rational> average_C) {
  if (i > 3) fail(ErrorKind::invalid_argument, "derivative order outside 0..3");
  if (!(r > 0.0) || !(r < 1.0)) fail(ErrorKind::invalid_argument, "derivative_bounds needs r in (0,1)");
  const mpfr_prec_t bits = ctx.bits();
  auto jet = ctx.real_jet(r, i);
  DerivativeBound b;
  b.i = i;
  b.r = r;
  b.value = jet.d[i];
  b.error = jet.err[i];
  const Real one_minus = 1.0 - r;
  b.scaled = b.value * pow(one_minus, static_cast<long>(i + 1));
  b.lower_reference = factorial_real(i, bits);
  if (!(b.error < abs(b.value) * 1e-6))
    fail(ErrorKind::precision, "tail bound of f^(" + std::to_string(i) + ") at r = " + r.str(8) +
                                   " is not small against the value; raise N");
  // slack: certified error plus a few ulps of rounding
  Real slack(1.0, bits);
  mpfr_mul_2si(slack.get(), slack.get(), -static_cast<long>(bits) + 16, MPFR_RNDU);
  slack = abs(b.scaled) * slack + b.error * pow(one_minus, static_cast<long>(i + 1));
  b.within_reference = b.scaled + slack >= b.lower_reference;
  if (average_C) {
    b.upper_reference = Real(*average_C, bits) * factorial_real(i + 1, bits);
    b.within_reference = b.within_reference && b.scaled - slack <= b.upper_reference;
  } else {
    mpfr_set_inf(b.upper_reference.get(), 1);
  }
  return b;
}

DerivativeSweep derivative_sweep(const SaddleContext& ctx, unsigned i, const std::vector<Real>& radii) {
  DerivativeSweep s;
  s.i = i;
  mpfr_set_inf(s.c_fit.get(), 1);
  mpfr_set_inf(s.C_fit.get(), -1);
  for (const Real& r : radii) {
    auto b = derivative_bounds(ctx, r, i);
    s.c_fit = min(s.c_fit, b.scaled);
    s.C_fit = max(s.C_fit, b.scaled);
    ++s.points;
  }
  return s;
}

AValue A_of_r(const SaddleContext& ctx, const Real& r) {
  AValue a;
  const mpfr_prec_t bits = ctx.bits();
  if (r.sign() == 0) {
    a.value = Real(0.0, bits);
    a.error = Real(0.0, bits);
    a.scaled = Real(0.0, bits);
    return a;
  }
  auto jet = ctx.real_jet(r, 1);
  if (jet.d[0].sign() <= 0) fail(ErrorKind::internal, "f(r) is not positive at r = " + r.str(8));
  a.value = r * jet.d[1] / jet.d[0];
  // first-order propagation of the certified radii, padded by a factor 2
  Real rel = jet.err[1] / abs(jet.d[1]) + jet.err[0] / jet.d[0];
  if (jet.d[1].sign() == 0) rel = jet.err[0] / jet.d[0];
  a.error = abs(a.value) * rel * 2.0;
  a.scaled = a.value * (1.0 - r) / r;
  return a;
}

SaddlePoint solve_r0(const SaddleContext& ctx, unsigned n, unsigned k, double tol) {
  if (n < 1 || k < 1) fail(ErrorKind::invalid_argument, "solve_r0 needs n >= 1 and k >= 1");
  const mpfr_prec_t bits = ctx.bits();
  Real target(Rational(n, k), bits);
  Real lo(0.0, bits), hi(bits);
  std::vector<std::pair<Real, Real>> seen;
  bool found = false;
  Real last_A(0.0, bits);
  for (int j = 1; j <= 200; ++j) {
    Real r(1.0, bits);
    mpfr_mul_2si(r.get(), r.get(), -j, MPFR_RNDN);
    r = 1.0 - r;
    AValue a;
    try {
      a = A_of_r(ctx, r);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::precision) throw;
      fail(ErrorKind::precision, "bracketing A(r) = " + target.str(10) + " stopped at r = " + r.str(10) +
                                     " with A = " + last_A.str(10) + " so far: " + e.what());
    }
    seen.emplace_back(r, a.value);
    if (a.value > target) {
      hi = r;
      found = true;
      break;
    }
    lo = r;
    last_A = a.value;
  }
  if (!found) fail(ErrorKind::domain, "no bracket for A(r) = n/k below r = 1 - 2^-200");
  SaddlePoint sp;
  Real width(bits);
  const Real tol_r(tol, bits);
  while (true) {
    width = hi - lo;
    if (width <= tol_r || sp.iterations >= 4 * static_cast<unsigned>(bits)) break;
    Real mid = (lo + hi) * 0.5;
    AValue a = A_of_r(ctx, mid);
    seen.emplace_back(mid, a.value);
    if (a.value > target)
      hi = mid;
    else
      lo = mid;
    ++sp.iterations;
  }
  sp.r0 = (lo + hi) * 0.5;
  sp.residual = abs(A_of_r(ctx, sp.r0).value - target);
  std::sort(seen.begin(), seen.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 1; i < seen.size(); ++i)
    if (!(seen[i].second >= seen[i - 1].second)) sp.monotone_on_bracket = false;
  const Real one_minus = 1.0 - sp.r0;
  sp.implied_C10 = Real(Rational(n, k), bits) * one_minus / sp.r0;
  sp.implied_c6 = one_minus * static_cast<double>(std::max(n, k)) / Real(Rational(k), bits);
  return sp;
}

namespace {

Real two_pi(mpfr_prec_t bits) { return pi(bits) * 2.0; }

/// Nearest representative of `a` + 2 pi m to `prev`.
Real unwrap(const Real& a, const Real& prev, const Real& twopi) {
  Real d = prev - a;
  Real m(d.bits());
  mpfr_div(m.get(), d.get(), twopi.get(), MPFR_RNDN);
  mpfr_rint(m.get(), m.get(), MPFR_RNDN);
  return a + m * twopi;
}

void check_nonzero(const CertifiedComplexValue& v, const Real& theta) {
  if (!(v.value.abs() > v.error_radius))
    fail(ErrorKind::domain, "certified modulus interval touches 0 at theta = " + theta.str(10) +
                                "; argument branch cannot be tracked");
}

}  // namespace

PsiSamples psi(const SaddleContext& ctx, const Real& r, const std::vector<Real>& grid) {
  const mpfr_prec_t bits = ctx.bits();
  auto zero_it = std::find_if(grid.begin(), grid.end(), [](const Real& t) { return t.sign() == 0; });
  if (zero_it == grid.end()) fail(ErrorKind::invalid_argument, "psi grid must contain theta = 0");
  if (!std::is_sorted(grid.begin(), grid.end(), [](const Real& a, const Real& b) { return a < b; }))
    fail(ErrorKind::invalid_argument, "psi grid must be sorted");
  const std::size_t z = static_cast<std::size_t>(zero_it - grid.begin());
  PsiSamples out;
  out.theta = grid;
  out.psi.assign(grid.size(), Real(0.0, bits));
  out.modulus.assign(grid.size(), Real(0.0, bits));
  const Real twopi = two_pi(bits);
  Real half_pi = pi(bits) * 0.5;
  auto step = [&](std::size_t i, std::size_t prev) {
    auto v = ctx.at(r, grid[i]);
    check_nonzero(v, grid[i]);
    out.modulus[i] = v.value.abs();
    Real p = unwrap(v.value.arg(), out.psi[prev], twopi);
    if (!(abs(p - out.psi[prev]) < half_pi))
      fail(ErrorKind::precision, "phase step reaches pi/2 between theta = " + grid[prev].str(8) + " and " +
                                     grid[i].str(8) + "; refine the grid");
    out.psi[i] = p;
  };
  {
    auto v0 = ctx.at(r, grid[z]);
    check_nonzero(v0, grid[z]);
    out.modulus[z] = v0.value.abs();
  }
  for (std::size_t i = z + 1; i < grid.size(); ++i) step(i, i - 1);
  for (std::size_t i = z; i-- > 0;) step(i, i + 1);
  out.max_odd_defect = Real(0.0, bits);
  // mirrored pairs: walk inward from both ends while the angles match
  std::size_t lo = 0, hi = grid.size() - 1;
  while (lo < hi) {
    Real s = grid[lo] + grid[hi];
    if (s.sign() == 0) {
      out.max_odd_defect = max(out.max_odd_defect, abs(out.psi[lo] + out.psi[hi]));
      ++lo;
      --hi;
    } else if (s.sign() < 0) {
      ++lo;
    } else {
      --hi;
    }
  }
  return out;
}

Real psi_at(const SaddleContext& ctx, const Real& r, const Real& theta, unsigned steps) {
  const mpfr_prec_t bits = ctx.bits();
  std::vector<Real> grid;
  const bool negative = theta.sign() < 0;
  for (unsigned s = 0; s <= steps; ++s) grid.push_back(theta * (static_cast<double>(s) / steps));
  if (negative) std::reverse(grid.begin(), grid.end());
  auto p = psi(ctx, r, grid);
  (void)bits;
  return negative ? p.psi.front() : p.psi.back();
}

Real theta_safe(const SaddleContext& ctx, const Real& r, unsigned points, double margin) {
  const mpfr_prec_t bits = ctx.bits();
  const Real fr = ctx.real_jet(r, 0).d[0];
  const Real p = pi(bits);
  Real last(0.0, bits);
  for (unsigned j = 1; j <= points; ++j) {
    Real t = p * (static_cast<double>(j) / points);
    auto v = ctx.at(r, t);
    if (!(v.value.abs() - v.error_radius > fr * margin)) return last;
    last = t;
  }
  return p;
}

Real psi_third_derivative(const SaddleContext& ctx, const Real& r) {
  auto jet = ctx.real_jet(r, 3);
  const Real& f = jet.d[0];
  const Real& f1 = jet.d[1];
  const Real& f2 = jet.d[2];
  const Real& f3 = jet.d[3];
  const Real L1 = f1 / f;
  const Real L2 = (f2 * f - f1 * f1) / (f * f);
  const Real L3 = (f3 * f * f - f * f1 * f2 * 3.0 + f1 * f1 * f1 * 2.0) / (f * f * f);
  return -(r * L1 + r * r * L2 * 3.0 + r * r * r * L3);
}

Real psi_third_derivative_fd(const SaddleContext& ctx, const Real& r, const Real& h) {
  const Real h2 = h * 2.0;
  const Real a = psi_at(ctx, r, h2, 8), b = psi_at(ctx, r, h, 4);
  const Real c = psi_at(ctx, r, -h, 4), d = psi_at(ctx, r, -h2, 8);
  return (a - b * 2.0 + c * 2.0 - d) / (h * h * h * 2.0);
}

Real psi_first_derivative_fd(const SaddleContext& ctx, const Real& r, const Real& h) {
  return (psi_at(ctx, r, h, 4) - psi_at(ctx, r, -h, 4)) / (h * 2.0);
}

namespace {

Real arg_ratio_max(const SaddleContext& ctx, const Real& r, const Real& A, const Real& theta_max, unsigned points,
                   Real* odd_defect) {
  const mpfr_prec_t bits = ctx.bits();
  std::vector<Real> grid;
  for (int j = -static_cast<int>(points); j <= static_cast<int>(points); ++j)
    grid.push_back(theta_max * (static_cast<double>(j) / points));
  auto s = psi(ctx, r, grid);
  const Real scale = pow(1.0 - r, 3L) / r;
  Real best(0.0, bits);
  for (std::size_t i = points + 1; i < grid.size(); ++i) {
    const Real& t = grid[i];
    Real q = abs(s.psi[i] - A * t) * scale / (t * t * t);
    best = max(best, q);
  }
  if (odd_defect) *odd_defect = s.max_odd_defect;
  return best;
}

}  // namespace

ArgEstimate arg_estimate_check(const SaddleContext& ctx, const Real& r, const Real& theta_max, unsigned points) {
  ArgEstimate e;
  e.r = r;
  e.theta_max = theta_max;
  const Real A = A_of_r(ctx, r).value;
  e.C2_fit = arg_ratio_max(ctx, r, A, theta_max, points, &e.max_odd_defect);
  e.C2_refined = arg_ratio_max(ctx, r, A, theta_max, 2 * points, nullptr);
  e.C2_shrunk = arg_ratio_max(ctx, r, A, theta_max * 0.5, points, nullptr);
  e.limit = abs(psi_third_derivative(ctx, r)) / 6.0 * pow(1.0 - r, 3L) / r;
  e.refinement_change = rel_change(e.C2_refined, e.C2_fit);
  e.shrink_change = rel_change(e.C2_shrunk, e.C2_fit);
  e.stable = e.refinement_change <= 0.1 && e.shrink_change <= 0.1;
  return e;
}

namespace {

struct ModulusPass {
  Real C1, c8;
  bool exceeded = false;
  std::optional<Real> exceeded_at;
};

ModulusPass modulus_pass(const SaddleContext& ctx, const Real& r, const Real& fr, const Real& fr_err, unsigned points,
                         unsigned near_points) {
  const mpfr_prec_t bits = ctx.bits();
  ModulusPass m;
  m.C1 = Real(0.0, bits);
  m.c8 = Real(bits);
  mpfr_set_inf(m.c8.get(), 1);
  const Real one_minus = 1.0 - r;
  const Real p = pi(bits);
  auto visit = [&](const Real& t, bool full_circle) {
    if (t.sign() == 0) return;
    auto v = ctx.at(r, t);
    const Real mod = v.value.abs();
    if (mod - v.error_radius > fr + fr_err) {
      m.exceeded = true;
      if (!m.exceeded_at) m.exceeded_at = t;
    }
    const Real deficit = 1.0 - mod / fr;
    const Real at = abs(t);
    if (full_circle) {
      const Real mn = min(at, one_minus);
      m.c8 = min(m.c8, deficit * one_minus * one_minus / (r * mn * mn));
    } else {
      m.C1 = max(m.C1, deficit * one_minus / at);
    }
  };
  for (unsigned j = 0; j < points; ++j) visit(p * (2.0 * j / points - 1.0), true);
  for (unsigned j = 1; j <= near_points; ++j) {
    Real t = one_minus * (static_cast<double>(j) / near_points);
    visit(t, false);
    visit(-t, false);
  }
  return m;
}

}  // namespace

ModulusBounds modulus_bounds_check(const SaddleContext& ctx, const Real& r, unsigned points) {
  ModulusBounds b;
  b.r = r;
  auto jet = ctx.real_jet(r, 0);
  const unsigned near = std::max(16u, points / 32);
  auto first = modulus_pass(ctx, r, jet.d[0], jet.err[0], points, near);
  auto second = modulus_pass(ctx, r, jet.d[0], jet.err[0], 2 * points, 2 * near);
  b.C1_fit = first.C1;
  b.c8_fit = first.c8;
  b.C1_refined = second.C1;
  b.c8_refined = second.c8;
  b.C1_change = rel_change(second.C1, first.C1);
  b.c8_change = rel_change(second.c8, first.c8);
  b.exceeded_f_r = first.exceeded || second.exceeded;
  b.exceeded_at = first.exceeded_at ? first.exceeded_at : second.exceeded_at;
  b.stable = b.C1_change <= 0.1 && b.c8_change <= 0.1 && b.C1_fit.sign() > 0 && b.c8_fit.sign() > 0;
  b.points = points;
  return b;
}

void gauss_legendre(unsigned order, mpfr_prec_t bits, std::vector<Real>& nodes, std::vector<Real>& weights) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, mpfr_prec_t>, std::pair<std::vector<Real>, std::vector<Real>>> cache;
  if (order < 2) fail(ErrorKind::invalid_argument, "Gauss-Legendre order must be at least 2");
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({order, bits}); it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  const mpfr_prec_t wp = bits + 32;
  std::vector<Real> x(order, Real(wp)), w(order, Real(wp));
  const Real p = pi(wp);
  Real p0(wp), p1(wp), p2(wp), dp(wp), dx(wp), eps(1.0, wp);
  mpfr_mul_2si(eps.get(), eps.get(), -static_cast<long>(bits) - 8, MPFR_RNDN);
  for (unsigned i = 0; i < order; ++i) {
    Real xi = cos(p * ((i + 0.75) / (order + 0.5)));
    for (int it = 0; it < 100; ++it) {
      p0 = Real(1.0, wp);
      p1 = xi;
      for (unsigned m = 2; m <= order; ++m) {
        // m P_m = (2m-1) x P_{m-1} - (m-1) P_{m-2}
        p2 = (xi * p1 * static_cast<double>(2 * m - 1) - p0 * static_cast<double>(m - 1)) / static_cast<double>(m);
        p0 = p1;
        p1 = p2;
      }
      dp = (xi * p1 - p0) * static_cast<double>(order) / (xi * xi - 1.0);
      dx = p1 / dp;
      xi -= dx;
      if (abs(dx) < eps) break;
    }
    x[i] = xi;
    w[i] = Real(2.0, wp) / ((1.0 - xi * xi) * dp * dp);
  }
  nodes.clear();
  weights.clear();
  for (unsigned i = 0; i < order; ++i) {
    Real xn(bits), wn(bits);
    mpfr_set(xn.get(), x[i].get(), MPFR_RNDN);
    mpfr_set(wn.get(), w[i].get(), MPFR_RNDN);
    nodes.push_back(std::move(xn));
    weights.push_back(std::move(wn));
  }
  std::lock_guard lock(mu);
  cache.emplace(std::make_pair(order, bits), std::make_pair(nodes, weights));
}

namespace {

struct NodeValues {
  std::vector<Real> re, im, err;
};

class ArcIntegrand {
 public:
  ArcIntegrand(const SaddleContext& ctx, const Real& r, unsigned k, const std::vector<double>& alphas)
      : ctx_(ctx), r_(r), k_(k), alphas_(alphas) {
    auto jet = ctx.real_jet(r, 0);
    f0_ = jet.d[0];
    f0_rel_err_ = jet.err[0] / f0_;
  }
  std::size_t components() const { return 2 * alphas_.size(); }

  NodeValues operator()(const Real& theta) const {
    const mpfr_prec_t bits = ctx_.bits();
    auto v = ctx_.at(r_, theta);
    const Real mod = v.value.abs() / f0_;
    const Real phase = v.value.arg();
    Real magk(bits);
    mpfr_pow_ui(magk.get(), mod.get(), k_, MPFR_RNDN);
    // |w^k - v^k| <= k max(|w|,|v|)^{k-1} |w - v|
    const Real delta = v.error_radius / f0_ + mod * f0_rel_err_ * 2.0;
    Real bound(bits);
    mpfr_pow_ui(bound.get(), Real(mod + delta).get(), k_ - 1, MPFR_RNDU);
    bound = bound * delta * static_cast<double>(k_);
    const Real t2 = theta * theta;
    NodeValues out;
    for (double alpha : alphas_) {
      Real ang = phase * static_cast<double>(k_) - theta * alpha;
      Real c = cos(ang), s = sin(ang);
      out.re.push_back(magk * c);
      out.im.push_back(magk * s);
      out.err.push_back(bound);
      out.re.push_back(magk * c * t2);
      out.im.push_back(magk * s * t2);
      out.err.push_back(bound * t2);
    }
    return out;
  }

 private:
  const SaddleContext& ctx_;
  Real r_;
  unsigned k_;
  std::vector<double> alphas_;
  Real f0_, f0_rel_err_;
};

struct PanelResult {
  std::vector<Real> re, im, err;
};

PanelResult gl_panel(const ArcIntegrand& fn, const Real& a, const Real& b, const std::vector<Real>& x,
                     const std::vector<Real>& w, unsigned& evaluations) {
  const std::size_t m = fn.components();
  const mpfr_prec_t bits = a.bits();
  PanelResult out{std::vector<Real>(m, Real(0.0, bits)), std::vector<Real>(m, Real(0.0, bits)),
                  std::vector<Real>(m, Real(0.0, bits))};
  const Real half = (b - a) * 0.5, mid = (a + b) * 0.5;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto v = fn(mid + half * x[i]);
    ++evaluations;
    for (std::size_t c = 0; c < m; ++c) {
      out.re[c] += v.re[c] * w[i];
      out.im[c] += v.im[c] * w[i];
      out.err[c] += v.err[c] * w[i];
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    out.re[c] *= half;
    out.im[c] *= half;
    out.err[c] = abs(out.err[c] * half);
  }
  return out;
}

}  // namespace

ArcIntegral integrate_arc(const SaddleContext& ctx, const Real& r, unsigned k, const std::vector<double>& alphas,
                          const Real& a, const Real& b, const QuadratureConfig& q) {
  const mpfr_prec_t bits = ctx.bits();
  std::vector<Real> x, w;
  gauss_legendre(q.order, bits, x, w);
  ArcIntegrand fn(ctx, r, k, alphas);
  const std::size_t m = fn.components();
  ArcIntegral out;
  out.re.assign(m, Real(0.0, bits));
  out.im.assign(m, Real(0.0, bits));
  out.quad_error.assign(m, Real(0.0, bits));
  out.eval_error.assign(m, Real(0.0, bits));
  const Real total_len = abs(b - a);
  if (total_len.sign() == 0) return out;
  struct Task {
    Real a, b;
    PanelResult coarse;
  };
  std::vector<Task> stack;
  stack.push_back({a, b, gl_panel(fn, a, b, x, w, out.evaluations)});
  unsigned splits = 0;
  while (!stack.empty()) {
    Task t = std::move(stack.back());
    stack.pop_back();
    const Real mid = (t.a + t.b) * 0.5;
    PanelResult left = gl_panel(fn, t.a, mid, x, w, out.evaluations);
    PanelResult right = gl_panel(fn, mid, t.b, x, w, out.evaluations);
    const Real share = abs(t.b - t.a) / total_len * q.abs_tolerance;
    bool ok = true;
    std::vector<Real> diff(m, Real(bits));
    for (std::size_t c = 0; c < m; ++c) {
      diff[c] = abs(left.re[c] + right.re[c] - t.coarse.re[c]) + abs(left.im[c] + right.im[c] - t.coarse.im[c]);
      if (!(diff[c] <= share)) ok = false;
    }
    if (ok) {
      for (std::size_t c = 0; c < m; ++c) {
        out.re[c] += left.re[c] + right.re[c];
        out.im[c] += left.im[c] + right.im[c];
        out.quad_error[c] += diff[c];
        out.eval_error[c] += left.err[c] + right.err[c];
      }
      out.panels += 2;
      continue;
    }
    if (++splits > q.max_subdivisions)
      fail(ErrorKind::precision, "quadrature did not converge within " + std::to_string(q.max_subdivisions) +
                                     " subdivisions on [" + a.str(8) + ", " + b.str(8) + "]");
    stack.push_back({mid, t.b, std::move(right)});
    stack.push_back({t.a, mid, std::move(left)});
  }
  return out;
}

ConcavityRun concavity_integral(const SaddleContext& ctx, const SaddleConfig& cfg, const std::vector<double>& alphas) {
  const mpfr_prec_t bits = ctx.bits();
  ConcavityRun run;
  run.k = cfg.k;
  run.n = cfg.n;
  run.alphas = alphas;
  run.saddle = solve_r0(ctx, cfg.n, cfg.k, cfg.solver_tolerance);
  const Real& r0 = run.saddle.r0;
  const Real one_minus = 1.0 - r0;
  run.arg = arg_estimate_check(ctx, r0, one_minus * cfg.c2);
  run.modulus = modulus_bounds_check(ctx, r0);
  const Real p = pi(bits);
  Real c3 = min(Real(cfg.c2, bits), p / (run.arg.C2_fit * 8.0));
  Real kr(Rational(cfg.k), bits);
  kr = kr * r0;
  const Real theta0 = c3 * one_minus / pow(kr, Real(Rational(1, 3), bits));
  if (!(theta0 < p)) fail(ErrorKind::internal, "theta0 outside (0, pi)");
  // minor-arc envelope from the fitted upper-bound constant
  Real base = 1.0 - run.modulus.c8_fit * r0 * theta0 * theta0 / (one_minus * one_minus);
  if (base.sign() < 0) base = Real(0.0, bits);
  Real minor_bound(bits);
  mpfr_pow_ui(minor_bound.get(), base.get(), cfg.k, MPFR_RNDU);
  minor_bound = minor_bound * p * p * p;

  const Real zero(0.0, bits);
  QuadratureConfig q = cfg.quadrature;
  // each of the four panels gets a quarter of the tolerance
  q.abs_tolerance /= 4;
  const ArcIntegral parts[4] = {
      integrate_arc(ctx, r0, cfg.k, alphas, -p, -theta0, q),
      integrate_arc(ctx, r0, cfg.k, alphas, -theta0, zero, q),
      integrate_arc(ctx, r0, cfg.k, alphas, zero, theta0, q),
      integrate_arc(ctx, r0, cfg.k, alphas, theta0, p, q),
  };
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    ArcSplit s;
    s.r0 = r0;
    s.theta0 = theta0;
    s.c3 = c3;
    s.minor_bound = minor_bound;
    for (unsigned w = 0; w < 2; ++w) {
      const std::size_t c = 2 * j + w;
      s.major[w] = parts[1].re[c] + parts[2].re[c];
      s.minor[w] = parts[0].re[c] + parts[3].re[c];
      s.total[w] = s.major[w] + s.minor[w];
      s.total_imag[w] = parts[0].im[c] + parts[1].im[c] + parts[2].im[c] + parts[3].im[c];
      s.quad_error[w] = parts[0].quad_error[c] + parts[1].quad_error[c] + parts[2].quad_error[c] + parts[3].quad_error[c];
      s.eval_error[w] = parts[0].eval_error[c] + parts[1].eval_error[c] + parts[2].eval_error[c] + parts[3].eval_error[c];
    }
    for (const auto& part : parts) {
      s.panels += part.panels;
      s.evaluations += part.evaluations;
    }
    run.splits.push_back(std::move(s));
  }
  return run;
}

std::vector<double> second_deriv_alphas(unsigned n) { return {n - 1.0, static_cast<double>(n), n + 1.0}; }

VerificationReport f_second_deriv_target(const SaddleContext& ctx, const SaddleConfig& cfg) {
  return f_second_deriv_report(ctx, cfg, concavity_integral(ctx, cfg, second_deriv_alphas(cfg.n)));
}

VerificationReport f_second_deriv_report(const SaddleContext& ctx, const SaddleConfig& cfg, const ConcavityRun& run) {
  VerificationReport rep;
  rep.suite = "saddle";
  const std::vector<double>& alphas = run.alphas;
  const std::string tag = " k=" + std::to_string(cfg.k) + " n=" + std::to_string(cfg.n);
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const ArcSplit& s = run.splits[j];
    const std::string at = tag + " alpha=" + std::to_string(static_cast<long>(alphas[j]));
    for (unsigned w = 0; w < 2; ++w) {
      const Real bound = abs(s.total_imag[w]) + s.eval_error[w] + s.quad_error[w];
      if (!(bound < cfg.quadrature.abs_tolerance * 1e4 + 1e-8))
        fail(ErrorKind::precision, "imaginary part of the contour integral above tolerance at" + at);
      CheckRecord r;
      r.id = std::string(w == 0 ? "F_positive" : "theta2_integral_positive") + at;
      r.status = Status::reported;
      r.measure("value", s.total[w].str(17))
          .measure("imag_bound", bound.str(6))
          .measure("major", s.major[w].str(12))
          .measure("minor", s.minor[w].str(12))
          .measure("positive", s.total[w].sign() > 0 ? "true" : "false");
      if (w == 1) r.measure("minor_bound", s.minor_bound.str(6));
      r.envelope = "> 0";
      rep.add(std::move(r));
    }
  }
  rep.results = run_manifest(ctx, cfg, run);
  return rep;
}

nlohmann::ordered_json run_manifest(const SaddleContext& ctx, const SaddleConfig& cfg, const ConcavityRun& run) {
  nlohmann::ordered_json j;
  j["series_id"] = ctx.series_id();
  j["k"] = cfg.k;
  j["n"] = cfg.n;
  j["precision_bits"] = ctx.bits();
  j["N"] = ctx.N();
  j["r0"] = run.saddle.r0.str(30);
  j["r0_residual"] = run.saddle.residual.str(6);
  j["theta0"] = run.splits.empty() ? "" : run.splits.front().theta0.str(20);
  j["c3"] = run.splits.empty() ? "" : run.splits.front().c3.str(12);
  j["constant_chain"] = "c3 = min(c2, pi/(8 C2_fit)) with c2 = " + std::to_string(cfg.c2);
  j["C2_fit"] = run.arg.C2_fit.str(12);
  j["C1_fit"] = run.modulus.C1_fit.str(12);
  j["c8_fit"] = run.modulus.c8_fit.str(12);
  j["implied_C10"] = run.saddle.implied_C10.str(12);
  j["implied_c6"] = run.saddle.implied_c6.str(12);
  j["A_monotone_on_bracket"] = run.saddle.monotone_on_bracket;
  auto& F = j["F_values"] = nlohmann::ordered_json::array();
  auto& I = j["integral_values"] = nlohmann::ordered_json::array();
  auto& M = j["margins"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < run.splits.size(); ++i) {
    const auto& s = run.splits[i];
    F.push_back({{"alpha", run.alphas[i]}, {"value", s.total[0].str(20)}, {"imag", s.total_imag[0].str(6)}});
    I.push_back({{"alpha", run.alphas[i]},
                 {"value", s.total[1].str(20)},
                 {"imag", s.total_imag[1].str(6)},
                 {"major", s.major[1].str(20)},
                 {"minor", s.minor[1].str(20)},
                 {"minor_bound", s.minor_bound.str(6)},
                 {"quad_error", s.quad_error[1].str(6)},
                 {"eval_error", s.eval_error[1].str(6)},
                 {"panels", s.panels}});
    Real ratio = s.minor[1].sign() == 0 ? Real(0.0, ctx.bits()) : abs(s.major[1] / s.minor[1]);
    M.push_back({{"alpha", run.alphas[i]},
                 {"F_margin", s.total[0].str(12)},
                 {"integral_margin", s.total[1].str(12)},
                 {"major_over_minor", ratio.str(6)}});
  }
  return j;
}

void write_plot_csv(std::ostream& out, const SaddleContext& ctx, const Real& r, const Real& theta_max,
                    unsigned points) {
  std::vector<Real> grid;
  for (int j = -static_cast<int>(points); j <= static_cast<int>(points); ++j)
    grid.push_back(theta_max * (static_cast<double>(j) / points));
  auto s = psi(ctx, r, grid);
  out << "theta,abs_f,psi\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << grid[i].str(17) << ',' << s.modulus[i].str(17) << ',' << s.psi[i].str(17) << '\n';
}

}  // namespace logconc
