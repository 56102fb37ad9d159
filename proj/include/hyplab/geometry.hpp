#pragma once

// Upper half-plane H^2 = {y > 0} with metric (dx^2 + dy^2)/y^2 and
// volume element dx dy / y^2.

#include <cstdint>
#include <functional>

#include "hyplab/quadrature.hpp"

namespace hyplab {

/// A point of the upper half-plane. Construction with y <= 0 throws.
class HalfPlanePoint {
 public:
  HalfPlanePoint(double x, double y);

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

  bool operator==(const HalfPlanePoint&) const = default;

 private:
  double x_;
  double y_;
};

struct EuclideanDisc {
  double cx;
  double cy;
  double radius;

  bool contains(double x, double y) const noexcept {
    const double dx = x - cx;
    const double dy = y - cy;
    return dx * dx + dy * dy < radius * radius;
  }
};

class GeodesicBall {
 public:
  GeodesicBall(HalfPlanePoint center, double radius);

  const HalfPlanePoint& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

 private:
  HalfPlanePoint center_;
  double radius_;
};

/// z -> (scale * x + shift, scale * y). Generates the isometries that fix
/// the point at infinity.
struct Isometry {
  double scale = 1.0;
  double shift = 0.0;

  HalfPlanePoint apply(const HalfPlanePoint& z) const;
  Isometry inverse() const;
  /// (this o other)(z) = this(other(z)).
  Isometry compose(const Isometry& other) const;

  /// The isometry sending z0 to (0, 1).
  static Isometry normalizing(const HalfPlanePoint& z0);
};

HalfPlanePoint apply_isometry(const HalfPlanePoint& z, double scale, double shift);

/// cosh of the geodesic distance, 1 + |z1 - z2|^2 / (2 y1 y2).
double cosh_distance(const HalfPlanePoint& z1, const HalfPlanePoint& z2);

/// Geodesic distance; series expansion when cosh d is within 1e-8 of 1.
double geodesic_distance(const HalfPlanePoint& z1, const HalfPlanePoint& z2);

/// Euclidean disc occupied by a geodesic ball:
/// centre (x, y cosh r), radius y sinh r.
EuclideanDisc euclidean_image(const GeodesicBall& ball);

/// 2 pi (cosh R - 1).
double ball_volume(double radius);

/// Point at geodesic distance r from center in direction theta. theta is
/// the Riemannian polar angle: theta = 0 points straight up (y -> inf) and
/// theta increases counter-clockwise.
HalfPlanePoint polar_point(const HalfPlanePoint& center, double r, double theta);

/// Inverse of polar_point in the angle: returns theta in (-pi, pi].
double polar_angle(const HalfPlanePoint& center, double x, double y);

using PointFunction = std::function<double(const HalfPlanePoint&)>;
/// Radial majorant |f(z)| <= envelope(d(z, base)).
using RadialEnvelope = std::function<double(double)>;

/// Smallest radius (on a 0.25 grid) beyond which the envelope carries less
/// than tail_tol of Riemannian mass.
double tail_cutoff(const RadialEnvelope& envelope, const QuadratureSpec& spec, double max_radius = 60.0);

/// Integral of f over a geodesic ball, computed on its Euclidean image.
QuadResult riemannian_integral(const PointFunction& f, const GeodesicBall& ball, const QuadratureSpec& spec);

/// Integral of f over the Euclidean box [x0,x1] x [y0,y1] with dx dy / y^2.
QuadResult riemannian_integral_box(const PointFunction& f, double x0, double x1, double y0, double y1,
                                   const QuadratureSpec& spec);

/// Integral of f over all of H^2 in geodesic polar coordinates about base,
/// truncated where the envelope tail drops below tail_tol.
QuadResult riemannian_integral_polar(const PointFunction& f, const HalfPlanePoint& base,
                                     const RadialEnvelope& envelope, const QuadratureSpec& spec);

/// Same integral in Cartesian coordinates over the Euclidean bounding box
/// of the truncation ball, with breakpoints on geodesic circles about base.
QuadResult riemannian_integral_cartesian(const PointFunction& f, const HalfPlanePoint& base,
                                         const RadialEnvelope& envelope, const QuadratureSpec& spec);

/// Integral over H^2 of a function of the distance to a base point:
/// 2 pi \int_0^inf g(r) sinh r dr.
QuadResult radial_integral(const std::function<double(double)>& g, const RadialEnvelope& envelope,
                           const QuadratureSpec& spec);

struct MonteCarloResult {
  double value;
  double std_error;
  int samples;
};

/// Monte-Carlo integral over a ball with volume-uniform sampling.
MonteCarloResult monte_carlo_integral(const PointFunction& f, const GeodesicBall& ball, int samples,
                                      std::uint64_t seed);

}  // namespace hyplab
