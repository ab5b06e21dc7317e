#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "logconc/evaluator.hpp"
#include "logconc/real.hpp"
#include "logconc/report.hpp"
#include "logconc/series.hpp"

namespace logconc {

struct QuadratureConfig {
  unsigned order = 20;              // Gauss-Legendre nodes per panel
  unsigned max_subdivisions = 4000;  // total panel splits allowed per integral
  double abs_tolerance = 1e-12;      // on the normalized integrand
};

struct SaddleConfig {
  unsigned k = 1;
  unsigned n = 1;
  mpfr_prec_t precision_bits = 128;
  QuadratureConfig quadrature;
  double c2 = 0.5;  // arg estimate is fitted on |theta| <= c2 (1 - r)
  double solver_tolerance = 1e-30;
};

/// A series with a proven coefficient majorant, evaluated at one precision.
class SaddleContext {
 public:
  /// Tail tolerance for every evaluation is 2^{-tail_bits} (default bits - 32).
  SaddleContext(std::string series_id, const TruncatedSeries& f, CoefficientMajorant majorant, mpfr_prec_t bits,
                long tail_bits = -1);

  const std::string& series_id() const noexcept { return id_; }
  mpfr_prec_t bits() const noexcept { return ev_.bits(); }
  std::size_t N() const noexcept { return ev_.order(); }
  const SeriesEvaluator& evaluator() const noexcept { return ev_; }

  const Real& tail_tolerance() const noexcept { return tail_tol_; }

  Jet<Real> real_jet(const Real& r, unsigned max_deriv) const;
  Jet<Complex> complex_jet(const Complex& z, unsigned max_deriv) const;
  /// f(r e^{i theta}) with its certified radius.
  CertifiedComplexValue at(const Real& r, const Real& theta) const;

 private:
  std::string id_;
  SeriesEvaluator ev_;
  Real tail_tol_;
};

struct DerivativeBound {
  unsigned i = 0;
  Real r;
  Real value;             // f^{(i)}(r)
  Real error;             // certified radius of value
  Real scaled;            // f^{(i)}(r) (1-r)^{i+1}, the implied constant at this r
  Real lower_reference;   // i!
  Real upper_reference;   // C (i+1)! for the average-bound constant C, if given
  bool within_reference = true;
};

DerivativeBound derivative_bounds(const SaddleContext& ctx, const Real& r, unsigned i,
                                  std::optional<Rational> average_C = std::nullopt);

struct DerivativeSweep {
  unsigned i = 0;
  Real c_fit;  // min over the grid of the scaled value
  Real C_fit;  // max over the grid
  std::size_t points = 0;
};
DerivativeSweep derivative_sweep(const SaddleContext& ctx, unsigned i, const std::vector<Real>& radii);

struct AValue {
  Real value;
  Real error;
  Real scaled;  // A(r) (1-r)/r, the implied sandwich constant at r
};

/// A(r) = r f'(r)/f(r); A(0) = 0.
AValue A_of_r(const SaddleContext& ctx, const Real& r);

struct SaddlePoint {
  Real r0;
  Real residual;             // |A(r0) - n/k|
  unsigned iterations = 0;
  Real implied_C10;          // n (1-r0)/(k r0): smallest C10 with r0 >= n/(n + C10 k)
  Real implied_c6;           // (1-r0) max(n,k)/k: largest c6 with 1 - r0 >= c6 k/max(n,k)
  bool monotone_on_bracket = true;  // A increased along every bisection step
};

/// Bisection on A(r) - n/k. The upper bracket is searched as 1 - 2^{-j};
/// Error(domain) if it cannot be found within the truncation order.
SaddlePoint solve_r0(const SaddleContext& ctx, unsigned n, unsigned k, double tol = 1e-30);

struct PsiSamples {
  std::vector<Real> theta;
  std::vector<Real> psi;
  std::vector<Real> modulus;
  Real max_odd_defect;  // max |psi(theta) + psi(-theta)| over mirrored grid pairs
};

/// Continuous argument of f(r e^{i theta}) along `grid` (sorted, containing 0),
/// unwrapped outward from theta = 0. Throws Error(domain) when the certified
/// modulus interval touches 0 and Error(precision) when a phase step reaches pi/2.
PsiSamples psi(const SaddleContext& ctx, const Real& r, const std::vector<Real>& grid);

/// psi at a single angle, continued from 0 along `steps` equal substeps.
Real psi_at(const SaddleContext& ctx, const Real& r, const Real& theta, unsigned steps = 16);

/// Largest theta in (0, pi] up to which the certified modulus stays above
/// `margin` f(r) on a scan of `points` angles.
Real theta_safe(const SaddleContext& ctx, const Real& r, unsigned points = 512, double margin = 1e-6);

/// psi'''(0) = -(r L' + 3 r^2 L'' + r^3 L''') with L = log f on the real axis.
Real psi_third_derivative(const SaddleContext& ctx, const Real& r);
/// Same quantity by the central difference of psi with step h.
Real psi_third_derivative_fd(const SaddleContext& ctx, const Real& r, const Real& h);
/// (psi(h) - psi(-h)) / (2h), to compare with A(r).
Real psi_first_derivative_fd(const SaddleContext& ctx, const Real& r, const Real& h);

struct ArgEstimate {
  Real r;
  Real theta_max;
  Real C2_fit;            // max |psi - A theta| (1-r)^3/(r |theta|^3) on the grid
  Real C2_refined;        // same on a grid with twice as many points
  Real C2_shrunk;         // same on half the range
  Real limit;             // |psi'''(0)|/6 (1-r)^3/r
  double refinement_change = 0;
  double shrink_change = 0;
  bool stable = true;     // both changes within 10%
  Real max_odd_defect;
};

ArgEstimate arg_estimate_check(const SaddleContext& ctx, const Real& r, const Real& theta_max,
                               unsigned points = 200);

struct ModulusBounds {
  Real r;
  Real C1_fit;        // max near 0 of (1 - |f|/f(r)) (1-r)/|theta|
  Real c8_fit;        // min over the circle of (1 - |f|/f(r)) (1-r)^2/(r min(|theta|,1-r)^2)
  Real C1_refined;
  Real c8_refined;
  double C1_change = 0;
  double c8_change = 0;
  bool stable = true;
  bool exceeded_f_r = false;  // some |f(r e^{i theta})| > f(r), certified: contradicts positivity
  std::optional<Real> exceeded_at;
  std::size_t points = 0;
};

/// Grid of `points` angles on [-pi, pi); the refined pass doubles the density.
ModulusBounds modulus_bounds_check(const SaddleContext& ctx, const Real& r, unsigned points = 2000);

struct ArcSplit {
  Real r0;
  Real theta0;
  Real c3;
  // normalized by f^k(r0); index 0: weight 1 (F), index 1: weight theta^2
  Real total[2];
  Real total_imag[2];
  Real major[2];
  Real minor[2];
  Real minor_bound;      // pi^3 (1 - c8 r0 theta0^2/(1-r0)^2)^k
  Real quad_error[2];    // panel-difference estimate
  Real eval_error[2];    // propagated certified evaluation radius
  unsigned panels = 0;
  unsigned evaluations = 0;
};

struct ConcavityRun {
  unsigned k = 0, n = 0;
  SaddlePoint saddle;
  ArgEstimate arg;
  ModulusBounds modulus;
  std::vector<double> alphas;
  std::vector<ArcSplit> splits;  // one per alpha
};

/// F(alpha) and the theta^2-weighted integral at r0 for each alpha, sharing
/// every evaluation of f. theta0 = c3 (1 - r0)(k r0)^{-1/3} with
/// c3 = min(c2, pi/(8 C2_fit)).
ConcavityRun concavity_integral(const SaddleContext& ctx, const SaddleConfig& cfg, const std::vector<double>& alphas);

struct ArcIntegral {
  // index 2j + p: alpha_j with weight theta^{2p}
  std::vector<Real> re, im, quad_error, eval_error;
  unsigned panels = 0;
  unsigned evaluations = 0;
};

/// Adaptive Gauss-Legendre over [a, b] of theta^{2p} (f(r e^{i theta})/f(r))^k e^{-i alpha theta}.
ArcIntegral integrate_arc(const SaddleContext& ctx, const Real& r, unsigned k, const std::vector<double>& alphas,
                          const Real& a, const Real& b, const QuadratureConfig& q);

/// The three-alpha run (n-1, n, n+1) and its checks.
VerificationReport f_second_deriv_target(const SaddleContext& ctx, const SaddleConfig& cfg);
/// Same checks on a run computed elsewhere; run.alphas must be (n-1, n, n+1).
VerificationReport f_second_deriv_report(const SaddleContext& ctx, const SaddleConfig& cfg, const ConcavityRun& run);
std::vector<double> second_deriv_alphas(unsigned n);

nlohmann::ordered_json run_manifest(const SaddleContext& ctx, const SaddleConfig& cfg, const ConcavityRun& run);

/// CSV (theta, |f|, psi) over [-theta_max, theta_max].
void write_plot_csv(std::ostream& out, const SaddleContext& ctx, const Real& r, const Real& theta_max,
                    unsigned points);

/// Gauss-Legendre nodes and weights on [-1, 1] at the given precision (cached).
void gauss_legendre(unsigned order, mpfr_prec_t bits, std::vector<Real>& nodes, std::vector<Real>& weights);

}  // namespace logconc
