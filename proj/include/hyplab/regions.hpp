#pragma once

// Observation sets omega: finite unions of primitive shapes, optionally
// replicated along x and across dyadic-type scales, optionally complemented,
// and placed by an isometry frame.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyplab/covering.hpp"
#include "hyplab/geometry.hpp"
#include "hyplab/quadrature.hpp"

namespace hyplab {

struct EuclideanRect {
  double x0, x1, y0, y1;
};

struct VerticalStrip {
  double x0, x1;
};

/// Geodesic balls are stored as their centre and radius; membership uses the
/// exact Euclidean image.
struct GeodesicBallShape {
  double x, y, radius;
};

using Primitive = std::variant<EuclideanRect, EuclideanDisc, GeodesicBallShape, VerticalStrip>;

/// Instance (j, n) of a primitive P is g_{j,n}(P) with
/// g_{j,n}(z) = q^j z + n p q^j, q = scale_ratio, p = period_x.
/// period_x = 0 disables horizontal repetition (n = 0 only).
/// A missing j bound means unbounded in that direction; primitives that are
/// unbounded in y need both bounds.
struct Replication {
  double period_x = 0.0;
  double scale_ratio = 2.0;
  std::optional<int> j_min;
  std::optional<int> j_max;
};

class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Primitive> primitives, std::optional<Replication> replication = std::nullopt,
                  bool complement = false, Isometry frame = {});

  static Region whole_plane() { return Region({}, std::nullopt, true); }
  static Region empty() { return Region({}, std::nullopt, false); }

  const std::vector<Primitive>& primitives() const noexcept { return primitives_; }
  const std::optional<Replication>& replication() const noexcept { return replication_; }
  bool complement() const noexcept { return complement_; }
  const Isometry& frame() const noexcept { return frame_; }

  /// Indicator of omega. Boundary points may go either way.
  bool contains(const HalfPlanePoint& z) const;

  /// Total length of {x in (xa, xb) : (x, y) in omega}.
  double chord_length(double y, double xa, double xb) const;

  /// y-values in (ya, yb) where chord_length may have a kink: tops and
  /// bottoms of primitive instances meeting the x-window. Sorted.
  std::vector<double> chord_breakpoints(double ya, double yb, double xa, double xb) const;

  /// theta-measure (in [0, 2 pi]) of the geodesic circle of radius r about
  /// base that lies in omega.
  double angular_occupancy(const HalfPlanePoint& base, double r) const;
  /// The arcs of the geodesic circle lying in omega, as sorted, disjoint
  /// polar-angle intervals in [-pi, pi].
  std::vector<std::pair<double, double>> occupied_arcs(const HalfPlanePoint& base, double r) const;

  /// The image of omega under iso.
  Region transformed(const Isometry& iso) const;

 private:
  // Canonical-frame helpers (before applying frame_).
  bool contains_canonical(double x, double y) const;
  double union_length(double y, double xa, double xb) const;
  std::vector<double> crossing_angles(const HalfPlanePoint& base, double r) const;

  std::vector<Primitive> primitives_;
  std::optional<Replication> replication_;
  bool complement_ = false;
  Isometry frame_;
};

bool membership(const Region& region, const HalfPlanePoint& z);

/// vol_g(omega cap ball) from horizontal chords of the Euclidean image.
QuadResult ball_mass_result(const Region& region, const GeodesicBall& ball, const QuadratureSpec& spec);
double ball_mass(const Region& region, const GeodesicBall& ball, const QuadratureSpec& spec);

/// Same mass in geodesic polar coordinates, \int_0^R Theta(r) sinh r dr,
/// from circle/boundary crossings. Independent of the chord route.
QuadResult ball_mass_polar(const Region& region, const GeodesicBall& ball, const QuadratureSpec& spec);

/// Monte-Carlo estimate with volume-uniform samples.
MonteCarloResult ball_mass_monte_carlo(const Region& region, const GeodesicBall& ball, int samples,
                                       std::uint64_t seed);

/// vol_g(omega cap R_{j,k}(R')).
QuadResult rect_mass_result(const Region& region, const DyadicRectangle& r, const QuadratureSpec& spec);
double rect_mass(const Region& region, const DyadicRectangle& r, const QuadratureSpec& spec);

struct ScanWindow {
  double x_min, x_max, y_min, y_max;
};

struct ThicknessCertificate {
  enum class Mode { CertifiedOnGrid, Refuted };

  double R = 0.0;
  double delta = 0.0;
  /// Human-readable grid description.
  std::string grid;
  int nodes = 0;
  int failed_nodes = 0;
  double min_mass = 0.0;
  HalfPlanePoint argmin{0.0, 1.0};
  Mode mode = Mode::Refuted;
  /// Set when refuted: a node whose mass (computed there, not interpolated)
  /// is below delta.
  std::optional<HalfPlanePoint> witness;
  double witness_mass = 0.0;
};

/// Scans ball_mass over a grid uniform in (log y, x/y) with step grid_step
/// in both. Nodes whose quadrature fails are counted in failed_nodes and
/// excluded from the minimum.
ThicknessCertificate thickness_scan(const Region& region, double R, const ScanWindow& window, double grid_step,
                                    double delta, const QuadratureSpec& spec);

struct Assumption2Result {
  double min_mass = 0.0;
  DyadicRectangle argmin;
  int rectangles = 0;
};

Assumption2Result assumption2_scan(const Region& region, double Rp, int j_min, int j_max, long k_min, long k_max,
                                   const QuadratureSpec& spec);

/// JSON region file, schema version 1:
///   {"version": 1, "complement": false,
///    "primitives": [{"type": "euclidean_rect", "x0":..,"x1":..,"y0":..,"y1":..},
///                   {"type": "euclidean_disc", "cx":..,"cy":..,"radius":..},
///                   {"type": "geodesic_ball", "x":..,"y":..,"radius":..},
///                   {"type": "vertical_strip", "x0":..,"x1":..}],
///    "replication": {"period_x":.., "scale_ratio":.., "j_min":.., "j_max":..},
///    "frame": {"scale":.., "shift":..}}
/// replication and frame are optional; unknown versions or types throw
/// ConfigError.
Region region_from_json(const std::string& text);
std::string region_to_json(const Region& region);
Region load_region(const std::string& path);

}  // namespace hyplab
