#pragma once

// The heat kernel of the hyperbolic plane,
//   H(t, d) = sqrt(2) / (4 pi t)^{3/2} e^{-t/4}
//             \int_d^inf s e^{-s^2/4t} (cosh s - cosh d)^{-1/2} ds,
// and the checks built on it.

#include <map>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

#include "hyplab/geometry.hpp"
#include "hyplab/quadrature.hpp"

namespace hyplab {

/// Time t > 0 and geodesic distance d >= 0.
struct KernelQuery {
  double t;
  double d;

  /// Throws InvalidArgument unless t > 0 and d >= 0.
  KernelQuery(double t, double d);
};

/// Full quadrature report for H(t, d). The substitution s = d + u^2 removes
/// the endpoint singularity; the tail is extended by doubling until the
/// increment drops below tail_tol.
QuadResult heat_kernel_result(const KernelQuery& q, const QuadratureSpec& spec);

/// H(t, d); throws NonConvergence if the tolerance is missed.
double heat_kernel(const KernelQuery& q, const QuadratureSpec& spec);

/// H(t, z1, z2) = H(t, d(z1, z2)).
double heat_kernel(double t, const HalfPlanePoint& z1, const HalfPlanePoint& z2, const QuadratureSpec& spec);

/// f(t) = e^{t/4} t^{3/2}.
double kernel_weight_f(double t);

/// Radius beyond which 2 pi sinh(r) H(t, r) carries less than tol of mass.
double kernel_support_radius(double t, double tol);

/// \int H(t, .) dvol by geodesic-polar quadrature.
QuadResult kernel_mass(double t, const QuadratureSpec& spec);

/// Read-mostly memo of kernel values keyed by the exact bits of (t, d).
/// Lookups take a shared lock; insertion is idempotent.
class HeatKernelCache {
 public:
  explicit HeatKernelCache(QuadratureSpec spec) : spec_(spec) {}

  double operator()(double t, double d);
  std::size_t size() const;

 private:
  QuadratureSpec spec_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<double, double>, double> values_;
};

/// Tabulated r -> H(t, r) on [0, r_max]: log H on a uniform grid,
/// interpolated by local cubics; 0 beyond r_max. Used where a double
/// integral needs many kernel values at one t.
class KernelProfile {
 public:
  KernelProfile(double t, double r_max, int intervals, const QuadratureSpec& spec);

  double operator()(double r) const;
  double t() const noexcept { return t_; }
  double r_max() const noexcept { return r_max_; }

 private:
  double t_;
  double r_max_;
  double h_;
  std::vector<double> values_;
};

struct SemigroupReport {
  double direct;      ///< H(t, z1, z2)
  double convolved;   ///< \int H(s, z1, z) H(t - s, z, z2) dvol(z)
  double residual;    ///< |direct - convolved|
  double relative;    ///< residual / direct
  double quad_error;
};

SemigroupReport semigroup_check(double t, double s, const HalfPlanePoint& z1, const HalfPlanePoint& z2,
                                const QuadratureSpec& spec);

/// |H(t, z1, z2) - \int H(s, z1, z) H(t - s, z, z2) dvol(z)|. Needs 0 < s < t.
double semigroup_residual(double t, double s, const HalfPlanePoint& z1, const HalfPlanePoint& z2,
                          const QuadratureSpec& spec);

/// H(t, 0) f(t) / sqrt(t).
double diagonal_ratio(double t, const QuadratureSpec& spec);

/// H(2, d) e^{d^2/2}.
double gaussian_lower_ratio(double d, const QuadratureSpec& spec);

/// H(t, d) <= K sqrt(gamma t) / f(gamma t) e^{-alpha d^2 / t}
///          = K e^{-alpha d^2/t} / (e^{gamma t/4} gamma t).
struct GaussianFit {
  double K = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  std::vector<double> t_grid;
  std::vector<double> d_grid;
  /// max over the grid of H / bound - 1; <= 0 for a valid fit.
  double max_violation = 0.0;

  double bound(double t, double d) const;
};

struct GaussianSearch {
  double gamma_min = 1.0 / 16.0;
  double gamma_max = 16.0;
  int gamma_steps = 65;  ///< log-uniform
  int alpha_steps = 64;  ///< alpha = i / (2 alpha_steps), i = 1..alpha_steps
};

/// Minimises K over the (gamma, alpha) search grid; K is exact at fixed
/// (gamma, alpha). Among (near-)ties in K the largest alpha wins.
GaussianFit gaussian_upper_fit(std::span<const double> t_grid, std::span<const double> d_grid,
                               const QuadratureSpec& spec, const GaussianSearch& search = {});

/// max of H / fit.bound - 1 over an arbitrary grid.
double gaussian_fit_violation(const GaussianFit& fit, std::span<const double> t_grid,
                              std::span<const double> d_grid, const QuadratureSpec& spec);

/// Grid with each interval of g halved (2x resolution).
std::vector<double> refine_grid(std::span<const double> g);

/// u(t, z) = H(t + offset, z, z0): the solution started from
/// u0 = H(offset, ., z0).
double evolve_from_kernel(const HalfPlanePoint& z0, double offset, double t, const HalfPlanePoint& z,
                          const QuadratureSpec& spec);

/// \int H(t, z, z') H(offset, z', z0) dvol(z') by polar quadrature about z0.
QuadResult evolve_by_convolution(const HalfPlanePoint& z0, double offset, double t, const HalfPlanePoint& z,
                                 const QuadratureSpec& spec);

}  // namespace hyplab
