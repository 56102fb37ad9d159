#include "hyplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hyplab/errors.hpp"

namespace hyplab {

using std::numbers::pi;

HalfPlanePoint::HalfPlanePoint(double x, double y) : x_(x), y_(y) {
  if (!(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
    throw InvalidArgument("half-plane point needs finite x and y > 0");
}

GeodesicBall::GeodesicBall(HalfPlanePoint center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("geodesic ball radius must be > 0");
}

HalfPlanePoint Isometry::apply(const HalfPlanePoint& z) const {
  return {scale * z.x() + shift, scale * z.y()};
}

Isometry Isometry::inverse() const { return {1.0 / scale, -shift / scale}; }

Isometry Isometry::compose(const Isometry& other) const {
  return {scale * other.scale, scale * other.shift + shift};
}

Isometry Isometry::normalizing(const HalfPlanePoint& z0) { return {1.0 / z0.y(), -z0.x() / z0.y()}; }

HalfPlanePoint apply_isometry(const HalfPlanePoint& z, double scale, double shift) {
  if (!(scale > 0.0)) throw InvalidArgument("isometry scale must be > 0");
  return Isometry{scale, shift}.apply(z);
}

double cosh_distance(const HalfPlanePoint& z1, const HalfPlanePoint& z2) {
  const double dx = z1.x() - z2.x();
  const double dy = z1.y() - z2.y();
  return 1.0 + (dx * dx + dy * dy) / (2.0 * z1.y() * z2.y());
}

double geodesic_distance(const HalfPlanePoint& z1, const HalfPlanePoint& z2) {
  const double dx = z1.x() - z2.x();
  const double dy = z1.y() - z2.y();
  const double delta = (dx * dx + dy * dy) / (2.0 * z1.y() * z2.y());  // cosh d - 1
  if (delta < 1e-8) {
    // acosh(1 + delta) = sqrt(2 delta) (1 - delta/12 + 3 delta^2/160 - ...)
    return std::sqrt(2.0 * delta) * (1.0 - delta / 12.0 + 3.0 * delta * delta / 160.0);
  }
  return std::log1p(delta + std::sqrt(delta * (2.0 + delta)));
}

EuclideanDisc euclidean_image(const GeodesicBall& ball) {
  const double y = ball.center().y();
  const double r = ball.radius();
  return {ball.center().x(), y * std::cosh(r), y * std::sinh(r)};
}

double ball_volume(double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("ball radius must be >= 0");
  const double s = std::sinh(0.5 * radius);
  return 4.0 * pi * s * s;
}

HalfPlanePoint polar_point(const HalfPlanePoint& center, double r, double theta) {
  if (r == 0.0) return center;
  const double rho = std::tanh(0.5 * r);
  const double one_minus_rho = 2.0 / (std::exp(r) + 1.0);
  const double sh = std::sin(0.5 * theta);
  const double denom = one_minus_rho * one_minus_rho + 4.0 * rho * sh * sh;
  const double ch = std::cosh(0.5 * r);
  const double X = -2.0 * rho * std::sin(theta) / denom;
  const double Y = 1.0 / (ch * ch * denom);
  return {center.x() + center.y() * X, center.y() * Y};
}

double polar_angle(const HalfPlanePoint& center, double x, double y) {
  const double X = (x - center.x()) / center.y();
  const double Y = y / center.y();
  return std::atan2(-2.0 * X, X * X + Y * Y - 1.0);
}

double tail_cutoff(const RadialEnvelope& envelope, const QuadratureSpec& spec, double max_radius) {
  QuadratureSpec loose = spec;
  loose.rel_tol = 1e-6;
  loose.abs_tol = spec.tail_tol * 1e-3;
  for (double R = 0.25; R < max_radius; R += 0.25) {
    const QuadResult tail = integrate_scalar(
        [&](double r) { return 2.0 * pi * std::sinh(r) * std::abs(envelope(r)); }, R, max_radius, loose);
    if (tail.value < spec.tail_tol) return R;
  }
  return max_radius;
}

QuadResult riemannian_integral(const PointFunction& f, const GeodesicBall& ball, const QuadratureSpec& spec) {
  const EuclideanDisc disc = euclidean_image(ball);
  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  QuadResult stats;
  // y = cy + R sin(phi), x = cx + R cos(phi) xi; dx dy = R^2 cos^2(phi) dphi dxi.
  auto outer = [&](double phi) {
    const double c = std::cos(phi);
    const double y = disc.cy + disc.radius * std::sin(phi);
    const QuadResult row = integrate_scalar(
        [&](double xi) { return f(HalfPlanePoint(disc.cx + disc.radius * c * xi, y)); }, -1.0, 1.0, inner);
    stats.converged = stats.converged && row.converged;
    stats.evaluations += row.evaluations;
    return row.value * disc.radius * disc.radius * c * c / (y * y);
  };
  QuadResult out = integrate_scalar(outer, -0.5 * pi, 0.5 * pi, spec);
  out.converged = out.converged && stats.converged;
  out.evaluations += stats.evaluations;
  return out;
}

QuadResult riemannian_integral_box(const PointFunction& f, double x0, double x1, double y0, double y1,
                                   const QuadratureSpec& spec) {
  if (!(y0 > 0.0) || !(y1 > y0) || !(x1 > x0)) throw InvalidArgument("invalid integration box");
  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  QuadResult stats;
  auto outer = [&](double y) {
    const QuadResult row = integrate_scalar([&](double x) { return f(HalfPlanePoint(x, y)); }, x0, x1, inner);
    stats.converged = stats.converged && row.converged;
    stats.evaluations += row.evaluations;
    return row.value / (y * y);
  };
  QuadResult out = integrate_scalar(outer, y0, y1, spec);
  out.converged = out.converged && stats.converged;
  out.evaluations += stats.evaluations;
  return out;
}

namespace {

// Periodic trapezoid rule in theta, doubled until two successive levels
// agree to the requested tolerance.
double circle_average(const std::function<double(double)>& g, double rel_tol, double abs_tol, bool* ok) {
  int n = 16;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) prev += g(2.0 * pi * i / n);
  prev /= n;
  while (n < (1 << 16)) {
    double extra = 0.0;
    for (int i = 0; i < n; ++i) extra += g(2.0 * pi * (i + 0.5) / n);
    const double next = 0.5 * (prev + extra / n);
    n *= 2;
    if (std::abs(next - prev) <= std::max(abs_tol, rel_tol * std::abs(next))) return next;
    prev = next;
  }
  *ok = false;
  return prev;
}

}  // namespace

QuadResult riemannian_integral_polar(const PointFunction& f, const HalfPlanePoint& base,
                                     const RadialEnvelope& envelope, const QuadratureSpec& spec) {
  const double cutoff = tail_cutoff(envelope, spec);
  bool ok = true;
  auto shell = [&](double r) {
    const double avg = circle_average([&](double th) { return f(polar_point(base, r, th)); },
                                      spec.rel_tol * 0.1, spec.abs_tol * 1e-3, &ok);
    return 2.0 * pi * std::sinh(r) * avg;
  };
  std::vector<double> breaks{0.0};
  for (double r = 1.0; r < cutoff; r += 1.0) breaks.push_back(r);
  breaks.push_back(cutoff);
  QuadResult out = integrate(
      [&](std::span<const double> r, std::span<double> v) {
        for (std::size_t i = 0; i < r.size(); ++i) v[i] = shell(r[i]);
      },
      breaks, spec);
  out.error += spec.tail_tol;
  out.converged = out.converged && ok;
  return out;
}

QuadResult riemannian_integral_cartesian(const PointFunction& f, const HalfPlanePoint& base,
                                         const RadialEnvelope& envelope, const QuadratureSpec& spec) {
  const double cutoff = tail_cutoff(envelope, spec);
  const double x0 = base.x();
  const double y0 = base.y();
  std::vector<double> radii;
  for (double r = 0.125; r < cutoff; r *= 2.0) radii.push_back(r);
  radii.push_back(cutoff);

  // Breakpoints in eta = log y at the top and bottom of each geodesic circle.
  std::vector<double> eta_breaks{std::log(y0)};
  for (double r : radii) {
    eta_breaks.push_back(std::log(y0) - r);
    eta_breaks.push_back(std::log(y0) + r);
  }
  std::sort(eta_breaks.begin(), eta_breaks.end());

  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  inner.abs_tol = spec.abs_tol * 1e-3;
  QuadResult stats;
  auto row = [&](double eta) {
    const double y = std::exp(eta);
    // x-breakpoints where the horizontal line crosses each geodesic circle.
    std::vector<double> xb{x0};
    double half_width = 0.0;
    for (double r : radii) {
      const double cy = y0 * std::cosh(r);
      const double rad = y0 * std::sinh(r);
      const double h = rad * rad - (y - cy) * (y - cy);
      if (h > 0.0) {
        const double w = std::sqrt(h);
        xb.push_back(x0 - w);
        xb.push_back(x0 + w);
        half_width = std::max(half_width, w);
      }
    }
    if (half_width == 0.0) return 0.0;
    std::sort(xb.begin(), xb.end());
    const QuadResult q = integrate(
        [&](std::span<const double> x, std::span<double> v) {
          for (std::size_t i = 0; i < x.size(); ++i) v[i] = f(HalfPlanePoint(x[i], y));
        },
        xb, inner);
    stats.converged = stats.converged && q.converged;
    stats.evaluations += q.evaluations;
    return q.value / y;  // dx dy / y^2 = dx d(eta) / y
  };
  QuadResult out = integrate(
      [&](std::span<const double> e, std::span<double> v) {
        for (std::size_t i = 0; i < e.size(); ++i) v[i] = row(e[i]);
      },
      eta_breaks, spec);
  out.converged = out.converged && stats.converged;
  out.evaluations += stats.evaluations;
  out.error += spec.tail_tol;
  return out;
}

QuadResult radial_integral(const std::function<double(double)>& g, const RadialEnvelope& envelope,
                           const QuadratureSpec& spec) {
  const double cutoff = tail_cutoff(envelope, spec);
  std::vector<double> breaks{0.0};
  for (double r = 1.0; r < cutoff; r += 1.0) breaks.push_back(r);
  breaks.push_back(cutoff);
  QuadResult out = integrate(
      [&](std::span<const double> r, std::span<double> v) {
        for (std::size_t i = 0; i < r.size(); ++i) v[i] = 2.0 * pi * std::sinh(r[i]) * g(r[i]);
      },
      breaks, spec);
  out.error += spec.tail_tol;
  return out;
}

MonteCarloResult monte_carlo_integral(const PointFunction& f, const GeodesicBall& ball, int samples,
                                      std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("Monte-Carlo needs at least two samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double R = ball.radius();
  const double cm1 = std::cosh(R) - 1.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    // Radial CDF (cosh r - 1)/(cosh R - 1) makes the samples volume-uniform.
    const double r = std::acosh(1.0 + uni(rng) * cm1);
    const double theta = 2.0 * pi * uni(rng);
    const double v = f(polar_point(ball.center(), r, theta));
    sum += v;
    sum_sq += v * v;
  }
  const double vol = ball_volume(R);
  const double mean = sum / samples;
  const double var = std::max(0.0, sum_sq / samples - mean * mean);
  return {vol * mean, vol * std::sqrt(var / (samples - 1)), samples};
}

}  // namespace hyplab
