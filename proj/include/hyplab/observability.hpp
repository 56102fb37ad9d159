#pragma once

// Observability-constant calculus for the heat equation observed from omega
// over (0, T), and the converse experiment that extracts a thickness pair
// (L, delta) from a given observability constant.

#include <vector>

#include "hyplab/geometry.hpp"
#include "hyplab/heatkernel.hpp"
#include "hyplab/quadrature.hpp"
#include "hyplab/spectral.hpp"

namespace hyplab {

class Region;

struct ObservabilityInputs {
  double K = 1.0;        ///< spectral-estimate constant in 2K e^{K Lambda}
  double C_tilde = 1.0;  ///< Hoelder constant
  double T = 1.0;        ///< horizon
  double lambda = 0.8;   ///< telescoping ratio, in (1/sqrt 2, 1)

  /// Throws InvalidArgument on K, C_tilde, T <= 0 or lambda outside the
  /// open interval.
  void validate() const;
};

/// Positive root of K Lambda - T Lambda^2 = log eta:
///   Lambda = (K + sqrt(K^2 + 4 T log(1/eta))) / (2T).
double hoelder_lambda(double K, double T, double eta);

/// (K + sqrt(T log(1/eta))) / T, an upper bound for hoelder_lambda.
double hoelder_lambda_bound(double K, double T, double eta);

/// Smallest C_tilde for which exp(C_tilde (1 + 1/T)) >= 6K (1 + e^{3K^2/(2T)}),
/// the Hoelder constant produced by the spectral estimate at horizon T.
double implied_hoelder_constant(double K, double T);

struct TelescopingConstants {
  double mu = 0.0;       ///< 1 / (2 - lambda^{-2})
  double C_prime = 0.0;  ///< 1 + lambda + 2 C_tilde (1 + lambda) / lambda
};

TelescopingConstants telescoping_constants(double lambda, double C_tilde);

/// log C_obs = 2 C_tilde + mu C' / (T (1 - lambda^2)).
double observability_log_constant(const ObservabilityInputs& inp);
double observability_constant(const ObservabilityInputs& inp);

struct LambdaSearchResult {
  double lambda = 0.0;
  double log_C_obs = 0.0;
};

/// Minimises log C_obs over lambda on a uniform grid of the given size in
/// (1/sqrt 2 + 1e-3, 1 - 1e-3).
LambdaSearchResult optimize_lambda(const ObservabilityInputs& inp, int steps = 2001);

/// One odd step m of the telescoping sum, l_m = lambda^{m-1} T.
struct TelescopingStep {
  int m = 0;
  double l_m = 0.0, l_m1 = 0.0, l_m2 = 0.0, l_m4 = 0.0;
  /// exp(-(mu - 1) C' / (l_m - l_{m+2})).
  double epsilon = 0.0;
  /// exp(-mu C' / (l_m - l_{m+2})) and its logarithm.
  double weight = 0.0;
  double log_weight = 0.0;
  /// |(l_m - l_{m+1}) - (l_m - l_{m+2}) / (1 + lambda)| and the companion
  /// identity for l_{m+1} - l_{m+2}.
  double identity_residual_1 = 0.0;
  double identity_residual_2 = 0.0;
  /// Relative gap between (2mu - 1)/(l_m - l_{m+2}) and mu/(l_{m+2} - l_{m+4}).
  double exponent_residual = 0.0;
  /// l_m - l_{m+1} >= exp(-1/(l_m - l_{m+1})).
  bool log_inequality = false;
  /// 2 C_tilde (1 + 1/(l_{m+1} - l_{m+2})) - log(l_m - l_{m+1})
  /// <= 2 C_tilde + C' / (l_m - l_{m+2}).
  bool exponent_bound = false;
};

struct ObservabilityAudit {
  ObservabilityInputs inputs;
  TelescopingConstants constants;
  double log_C_obs = 0.0;
  std::vector<TelescopingStep> steps;
  /// Sum over the audited steps of weight_m - weight_{m+2}; telescopes to
  /// weight_1 - weight_{last+2}.
  double telescoped = 0.0;
  double max_identity_residual = 0.0;
  double max_exponent_residual = 0.0;
  bool all_inequalities = true;
};

/// Per-step intermediates for odd m until l_m < T * tiny or m > max_m.
ObservabilityAudit observability_audit(const ObservabilityInputs& inp, int max_m = 199);

/// Hoelder inequality for u(t) = e^{t Delta} u0 with u0 radial about
/// table.center:
///   ||u(T)||^2 <= exp(C_tilde (1 + 1/T)) ||u(T)||_omega ||u0||.
/// Norms come from Parseval; the omega-norm is the part inside table.r_cut,
/// which can only shrink the right-hand side.
struct HoelderReport {
  double lhs = 0.0;             ///< ||u(T)||^2
  double omega_norm_sq = 0.0;   ///< ||u(T)||^2 on omega within r_cut
  double omega_upper = 0.0;     ///< plus all mass beyond r_cut
  double initial_norm_sq = 0.0; ///< ||u0||^2
  double rhs = 0.0;
  /// Smallest C_tilde validating this state.
  double required_C_tilde = 0.0;
  bool holds = false;
};

HoelderReport hoelder_check(const SpectralCoefficients& u0, const OccupancyTable& table, double T,
                            double C_tilde);

/// Translated form on (t1, t2, eps):
///   ||u(t2)||^2 <= eps^{-1} e^{2 C_tilde (1 + 1/(t2 - t1))} ||u(t2)||^2_omega + eps ||u(t1)||^2.
struct TranslatedReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

TranslatedReport translated_check(const SpectralCoefficients& u0, const OccupancyTable& table, double t1,
                                  double t2, double eps, double C_tilde);

/// e^{-t (s^2 + 1/4)} applied to radial coefficients.
SpectralCoefficients evolve_coefficients(const SpectralCoefficients& c, double t);

/// Gaussian two-sided bounds feeding the extraction:
///   H(2, d) >= C_low e^{-beta d^2},
///   H(t, d) <= K e^{-alpha d^2/t} / (e^{gamma t/4} gamma t),  t in [1, 2].
struct GaussianConstants {
  double alpha = 0.0;
  double beta = 0.5;
  double K = 0.0;
  double gamma = 0.0;
  double C_low = 0.0;
  /// Upper fit violation on the fit grid and on its 2x refinement.
  double fit_violation = 0.0;
  double validation_violation = 0.0;
};

/// Upper fit over t in {1, 1.25, ..., 2}, d in {0, 0.5, ..., 8}; C_low is
/// the minimum of H(2, d) e^{beta d^2} over d in {0, 0.25, ..., 6}.
GaussianConstants fit_gaussian_constants(const QuadratureSpec& spec);

struct CenterExtraction {
  HalfPlanePoint z0{0.0, 1.0};
  /// \int e^{-2 beta d^2} dvol and \int e^{-(alpha/2) d^2} dvol about z0,
  /// in Cartesian coordinates.
  double lower_integral = 0.0;
  double tail_integral = 0.0;
  double C_doubleprime = 0.0;
  double L = 0.0;
  double delta = 0.0;
  /// \int H(2, d)^2 dvol and \int_0^1 \int_omega H(s+1, d)^2 dvol ds.
  double obs_lhs = 0.0;
  double obs_omega = 0.0;
  bool obs_holds = false;
  /// vol(omega cap B(z0, min(L, mass_radius))).
  double ball_mass = 0.0;
  double mass_radius = 0.0;
  bool mass_holds = false;
};

struct ThicknessExtraction {
  double alpha = 0.0;
  double beta = 0.0;
  double L = 0.0;
  double delta = 0.0;
  double C_doubleprime = 0.0;
  double C_obs = 0.0;
  GaussianConstants constants;
  std::vector<CenterExtraction> centers;
  /// max over centres of |C''_z0 / C''_first - 1| and the same for L.
  double C_doubleprime_spread = 0.0;
  double L_spread = 0.0;
};

struct ExtractionOptions {
  std::vector<HalfPlanePoint> centers{{0.0, 1.0}, {5.0, 0.1}, {-3.0, 40.0}};
  double L_step = 0.25;
  double L_max = 60.0;
  bool verify = true;
  double r_cut = 6.0;
  double mass_radius = 6.0;
  QuadratureSpec spec{1e-9, 1e-16, 4000, 1e-14, 0};
};

/// C'' = C_low^2 f(gamma)^2 / (C_obs K^2 gamma) \int e^{-2 beta d^2} dvol with
/// f(gamma)^2 = e^{gamma/2} gamma^3; L is the smallest multiple of L_step with
/// e^{-alpha L^2/2} \int e^{-(alpha/2) d^2} dvol < C''/2, and delta = C''/2.
/// Throws NonConvergence when no L <= L_max works.
ThicknessExtraction necessary_condition_experiment(const Region& region, double C_obs,
                                                   const GaussianConstants& constants,
                                                   const ExtractionOptions& options = {});

}  // namespace hyplab
