#pragma once

// Radial spectral analysis on H^2. The spectral parameter s >= 0 labels the
// eigenvalue s^2 + 1/4 of -Delta; lambda(s) = sqrt(s^2 + 1/4) is the
// corresponding value of sqrt(-Delta).
//
//   transform:  fhat(s) = 2 pi \int_0^inf f(r) phi_s(r) sinh r dr
//   inverse:    f(r)    = c_P \int_0^inf fhat(s) phi_s(r) s tanh(pi s) ds

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyplab/geometry.hpp"
#include "hyplab/quadrature.hpp"

namespace hyplab {

class Region;

/// Plancherel constant c_P, fixed by tools/oracles/plancherel_calibration.py
/// and re-derived at test time by calibrate_plancherel.
inline constexpr double kPlancherel = 0.15915494309189535;

/// Transform of the heat kernel H(t, .) is c_H e^{-t (s^2 + 1/4)}.
inline constexpr double kHeatMultiplier = 1.0;

double spectral_lambda(double s);

/// Plancherel density s tanh(pi s).
double plancherel_density(double s);

/// phi_s(r) from the Mehler integral
///   phi_s(r) = (sqrt 2 / pi) \int_0^r cos(s u) / sqrt(cosh r - cosh u) du
/// after u = r - v^2, by composite Gauss-Legendre. Accurate to a few ulp
/// times e^{-r/2}; requires s >= 0 and 0 <= r <= 700.
double spherical_function(double s, double r);

/// phi_s(r) for every s in freq at once.
void spherical_function_batch(std::span<const double> freq, double r, std::span<double> out);

/// Independent route: (1/pi) \int_0^pi (cosh r - sinh r cos t)^{-1/2} cos(s log(...)) dt
/// by adaptive quadrature.
QuadResult spherical_function_circle(double s, double r, const QuadratureSpec& spec);

/// Quadrature grid on [0, s_max] in the spectral variable.
struct SGrid {
  std::vector<double> s;
  std::vector<double> w;

  std::size_t size() const { return s.size(); }
  double s_max() const { return s.back(); }
  bool operator==(const SGrid&) const = default;

  /// n equispaced nodes with composite Simpson weights (3/8 rule on the last
  /// three intervals when n is even).
  static SGrid uniform(double s_max, int n = 512);
  /// Composite Gauss-Legendre, panels x order nodes.
  static SGrid gauss_legendre(double s_max, int panels = 32, int order = 16);
  /// s_max = sqrt(Lambda^2 - 1/4).
  static SGrid for_band(double Lambda, int n = 512);
};

struct SpectralCoefficients {
  HalfPlanePoint base{0.0, 1.0};
  SGrid grid;
  std::vector<double> values;
  /// Per-node quadrature error estimates; empty when values are exact.
  std::vector<double> errors;

  /// lambda of the largest node with a nonzero value; 0 if all vanish.
  double lambda_eff() const;
  /// |fhat(s_max)| / max |fhat|: size of what the grid truncates.
  double tail_ratio() const;
  double max_error() const;
};

using RadialProfile = std::function<double(double r)>;

/// Transform of a radial profile supported in [0, r_max], by composite
/// Gauss-Legendre in r with panels narrow enough to resolve cos(s_max r).
/// The error estimate per node compares against panels of twice the width.
SpectralCoefficients spherical_transform(const RadialProfile& f, double r_max, const SGrid& grid,
                                         const HalfPlanePoint& base = {0.0, 1.0});

/// Heat-kernel coefficients c_H e^{-t (s^2 + 1/4)} (exact).
SpectralCoefficients heat_coefficients(double t, const SGrid& grid, const HalfPlanePoint& base = {0.0, 1.0});

double inverse_spherical_transform(const SpectralCoefficients& c, double r);

/// c_P \sum_k w_k |fhat(s_k)|^2 s_k tanh(pi s_k).
double parseval_norm_sq(const SpectralCoefficients& c);

/// H(1, 0) / \int_0^inf e^{-(s^2+1/4)} s tanh(pi s) ds, both by quadrature.
double calibrate_plancherel(const QuadratureSpec& spec);

/// Finite sum of translated radial pieces sharing one s-grid:
///   u(z) = \sum_a weight_a f_a(d(z, base_a)).
/// Since the inverse transform is a finite sum over grid nodes, u is an
/// exact finite combination of eigenfunctions of -Delta.
class BandlimitedFunction {
 public:
  struct Component {
    SpectralCoefficients coeffs;
    double weight = 1.0;
  };

  BandlimitedFunction() = default;
  explicit BandlimitedFunction(std::vector<Component> components);
  explicit BandlimitedFunction(SpectralCoefficients c, double weight = 1.0);

  const std::vector<Component>& components() const noexcept { return components_; }
  const SGrid& grid() const;

  double operator()(const HalfPlanePoint& z) const;

  /// g_k(z) = \sum_a weight_a fhat_a(s_k) phi_{s_k}(d(z, base_a)); then
  /// u(z) = c_P \sum_k w_k rho(s_k) g_k(z).
  std::vector<double> spectral_vector(const HalfPlanePoint& z) const;
  /// c_P \sum_k w_k rho(s_k) m_k g_k for a precomputed spectral vector.
  double synthesize(std::span<const double> g, std::span<const double> multiplier) const;

  /// Q_k = \sum_{a,b} w_a w_b fhat_a fhat_b phi_{s_k}(d(base_a, base_b)) >= 0.
  std::vector<double> parseval_density() const;
  double norm_sq() const;
  double lambda_eff() const;

 private:
  std::vector<Component> components_;
};

BandlimitedFunction project(const BandlimitedFunction& u, double Lambda);
SpectralCoefficients project(const SpectralCoefficients& c, double Lambda);

using Multiplier = std::function<double(double lambda)>;

BandlimitedFunction functional_calculus_apply(const BandlimitedFunction& u, const Multiplier& phi);

/// sup of |phi| over [1/2, Lambda] on a 4097-point grid.
double multiplier_sup(const Multiplier& phi, double Lambda);

/// lambda^m d^p/dx^p sinh(x) at x = lambda t.
Multiplier lift_multiplier(int m, int p, double t);

/// v(t, z) = (sinh(lambda t)/lambda)(Pi_Lambda u)(z).
double harmonic_lift(const BandlimitedFunction& u, double Lambda, double t, const HalfPlanePoint& z);

/// Evaluates the harmonic lift at many times for one spatial point.
class LiftEvaluator {
 public:
  LiftEvaluator(const BandlimitedFunction& u, double Lambda);
  double operator()(double t, const HalfPlanePoint& z) const;
  /// v(t_i, z) for each t_i, sharing one spectral vector.
  std::vector<double> at(std::span<const double> t, const HalfPlanePoint& z) const;
  const BandlimitedFunction& projected() const noexcept { return u_; }

 private:
  BandlimitedFunction u_;
  std::vector<double> lambda_;
};

struct LiftResidual {
  double max_residual = 0.0;
  double max_abs = 0.0;
  /// max |d_t v(0) - Pi u| over the spatial grid, and max |Pi u|.
  double max_initial_error = 0.0;
  double max_initial = 0.0;
  int points = 0;
};

/// Fourth-order finite-difference residual of (d_t^2 + y^2 (d_x^2 + d_y^2)) v
/// on an n^3 grid over [t0, t1] x [x0, x1] x [y0, y1], step h (scaled by y in
/// space).
LiftResidual harmonic_lift_residual(const BandlimitedFunction& u, double Lambda, double t0, double t1, double x0,
                                    double x1, double y0, double y1, int n, double h);

struct RatioEstimate {
  /// ||Pi u||^2_{L^2(omega cap B)} / ||Pi u||^2 over the truncation ball B.
  double lower = 0.0;
  /// lower + mass outside B.
  double upper = 0.0;
  double value = 0.0;
  double r_cut = 0.0;
  double denominator = 0.0;
};

/// ||Pi_Lambda u||^2_{L^2(omega)} / ||Pi_Lambda u||^2. The numerator is
/// integrated in polar coordinates about the first component's base over
/// the occupied arcs up to r_cut; the mass outside is bracketed and
/// value assumes the occupancy at r_cut. Throws InvalidArgument when the
/// projection vanishes.
RatioEstimate spectral_estimate_ratio(const BandlimitedFunction& u, double Lambda, const Region& region,
                                      const QuadratureSpec& spec, double r_cut = 8.0);

/// Angular occupancy Theta(center, r) tabulated on a composite
/// Gauss-Legendre rule in r, for reuse across many radial profiles.
struct OccupancyTable {
  HalfPlanePoint center{0.0, 1.0};
  double r_cut = 0.0;
  Rule rule;
  std::vector<double> theta;
};

OccupancyTable occupancy_table(const Region& region, const HalfPlanePoint& center, double r_cut,
                               std::span<const double> breakpoints = {}, double panel = 0.1, int order = 16);

/// Radial version of spectral_estimate_ratio for a profile about
/// table.center, using the tabulated occupancy (no projection applied).
RatioEstimate table_ratio(const OccupancyTable& table, const SpectralCoefficients& c);

struct SlepianResult {
  double Lambda = 0.0;
  /// Minimal (mass in omega or beyond r_cut) / total mass over the family.
  double ratio = 1.0;
  SpectralCoefficients minimizer;
  int basis_size = 0;
};

/// Minimises the omega-fraction of mass over radial band-limited functions
/// about table.center with fhat(s) = P_m(s/S) (1 - (s/S)^2)^p, m < basis,
/// S = sqrt(Lambda^2 - 1/4). Mass beyond r_cut counts as inside omega.
SlepianResult slepian_min_ratio(const OccupancyTable& table, double Lambda, int basis = 16, int p = 6,
                                int grid_nodes = 512);

/// Coefficient file, structured text:
///   {"version": 1, "base": [x, y], "s": [...], "w": [...], "values": [...]}
std::string coefficients_to_json(const SpectralCoefficients& c);
SpectralCoefficients coefficients_from_json(const std::string& text);

}  // namespace hyplab
