#pragma once

// Dyadic rectangles R_{j,k}(R') covering the half-plane, their charts and
// inscribed geodesic balls.

#include <functional>
#include <vector>

#include "hyplab/geometry.hpp"
#include "hyplab/quadrature.hpp"

namespace hyplab {

struct Interval {
  double lo;
  double hi;
  bool contains_open(double v) const noexcept { return lo < v && v < hi; }
  double width() const noexcept { return hi - lo; }
};

/// R_{j,k}(R') = (s(k-1), s(k+1)) x (2^{R'(j-1)}, 3^{R'} 2^{R'(j-1)}),
/// s = 2^{R'j}. Open in both directions.
struct DyadicRectangle {
  int j = 0;
  long k = 0;
  double scale_Rp = 1.0;

  bool operator==(const DyadicRectangle&) const = default;
};

struct RectExtents {
  Interval x;
  Interval y;
};

RectExtents rect_extents(const DyadicRectangle& r);

bool rect_contains(const DyadicRectangle& r, const HalfPlanePoint& z);

/// Every rectangle of scale R' containing z, ordered by (j, k).
std::vector<DyadicRectangle> locate(const HalfPlanePoint& z, double Rp);

/// Multiplicity bound N(R'): at most two j satisfy the y-condition (since
/// log2 3 < 2) and at most two k the x-condition.
constexpr int multiplicity_bound(double /*Rp*/) { return 4; }

/// Every rectangle of scale R' meeting the open box (x0,x1) x (y0,y1).
std::vector<DyadicRectangle> rectangles_meeting(double x0, double x1, double y0, double y1, double Rp);

/// R with tanh R = min(1 - 2^{-R'}, 1.5^{R'} - 1).
double inscribed_radius(double Rp);

/// Ball of radius inscribed_radius(R') centred at (2^{R'j} k, 2^{R'j}/cosh R).
GeodesicBall inscribed_ball(const DyadicRectangle& r);

enum class Containment { Proved, Refuted, Undecided };

/// Interval-arithmetic check that the closed Euclidean image of the ball
/// centred at (2^{R'j} k, 2^{R'j}/cosh R) with tanh R = tanh_radius lies in
/// the closure of r, i.e. that the open ball lies in the open rectangle.
/// Integral R' keeps every quantity exact, so tangency (as at R' = 1) is
/// decided; otherwise a tangent side may come back Undecided.
Containment ball_in_rectangle(const DyadicRectangle& r, double tanh_radius);

/// ball_in_rectangle for inscribed_ball(r), with tanh R enclosed from its
/// defining minimum rather than rounded.
Containment inscribed_ball_contained(const DyadicRectangle& r);

/// phi_{j,k}(x, y) = (2^{-R'j} x - k, 2^{-R'j} y).
struct ChartMap {
  int j = 0;
  long k = 0;
  double scale_Rp = 1.0;

  struct Coords {
    double X;
    double Y;
  };

  Coords forward(const HalfPlanePoint& z) const;
  /// Throws InvalidArgument unless Y > 0.
  HalfPlanePoint inverse(double X, double Y) const;
  /// Reference rectangle phi(R_{j,k}) = (-1, 1) x (2^{-R'}, (3/2)^{R'}).
  RectExtents reference() const;
};

using PlaneFunction = std::function<double(double, double)>;

struct PushforwardCheck {
  /// \int_ref |f|^2 dX dY.
  double lhs;
  /// \int_{R_jk} 2^{-2R'j} |f o phi|^2 dx dy, computed in the original
  /// coordinates.
  double rhs;
  /// \int_{R_jk} |f o phi|^2 dx dy / y^2.
  double rhs_hyperbolic;
  /// Bounds on rhs_hyperbolic / lhs implied by the y-range of the reference
  /// rectangle.
  double ratio_lower;
  double ratio_upper;
  double error;
};

PushforwardCheck chart_pushforward_integral_check(const PlaneFunction& f, int j, long k, double Rp,
                                                  const QuadratureSpec& spec);

struct NormEquivalence {
  double norm_sq;      ///< ||f||^2_{L^2_g}
  double covered_sq;   ///< sum over rectangles of ||f||^2_{L^2_g(R_jk)}
  int rectangles;
  int multiplicity;
};

/// Compares ||f||^2 with the sum of its squared norms over the rectangles
/// meeting the support box (x0,x1) x (y0,y1); f must vanish outside it.
NormEquivalence covering_norm_sum(const PlaneFunction& f, double x0, double x1, double y0, double y1, double Rp,
                                  const QuadratureSpec& spec);

/// y^2 (f_xx + f_yy) by the five-point stencil with step h * y.
double hyperbolic_laplacian_fd(const PlaneFunction& f, double x, double y, double h);

}  // namespace hyplab
