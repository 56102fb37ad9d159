#include "hyplab/covering.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>

#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

const double kLog2_3 = std::log2(3.0);

double pow2(double e) {
  // ldexp is exact for integral exponents in range.
  if (e == std::floor(e) && std::abs(e) < 1000) return std::ldexp(1.0, static_cast<int>(e));
  return std::exp2(e);
}

// Closed interval with outward rounding. This file is compiled with
// -frounding-math so the compiler honours fesetround.
struct Iv {
  double lo;
  double hi;
};

class RoundingScope {
 public:
  explicit RoundingScope(int mode) : saved_(std::fegetround()) { std::fesetround(mode); }
  ~RoundingScope() { std::fesetround(saved_); }
  RoundingScope(const RoundingScope&) = delete;
  RoundingScope& operator=(const RoundingScope&) = delete;

 private:
  int saved_;
};

double add_dir(double a, double b, int mode) {
  RoundingScope s(mode);
  volatile double va = a, vb = b;
  return va + vb;
}

double mul_dir(double a, double b, int mode) {
  RoundingScope s(mode);
  volatile double va = a, vb = b;
  return va * vb;
}

Iv operator+(Iv a, Iv b) { return {add_dir(a.lo, b.lo, FE_DOWNWARD), add_dir(a.hi, b.hi, FE_UPWARD)}; }
Iv operator-(Iv a, Iv b) { return {add_dir(a.lo, -b.hi, FE_DOWNWARD), add_dir(a.hi, -b.lo, FE_UPWARD)}; }

Iv operator*(Iv a, Iv b) {
  double lo = mul_dir(a.lo, b.lo, FE_DOWNWARD), hi = mul_dir(a.lo, b.lo, FE_UPWARD);
  for (auto [p, q] : {std::pair{a.lo, b.hi}, std::pair{a.hi, b.lo}, std::pair{a.hi, b.hi}}) {
    lo = std::min(lo, mul_dir(p, q, FE_DOWNWARD));
    hi = std::max(hi, mul_dir(p, q, FE_UPWARD));
  }
  return {lo, hi};
}

Iv point(double v) { return {v, v}; }

Iv widen(double v) {
  return {std::nextafter(std::nextafter(v, -INFINITY), -INFINITY), std::nextafter(std::nextafter(v, INFINITY), INFINITY)};
}

// Enclosure of base^e for base > 0. Integral exponents use directed
// products, so exact powers stay degenerate intervals.
Iv ipow(double base, double e) {
  if (e == std::floor(e) && std::abs(e) <= 64) {
    const int n = static_cast<int>(std::abs(e));
    Iv acc = point(1.0);
    for (int i = 0; i < n; ++i) acc = acc * point(base);
    if (e >= 0) return acc;
    RoundingScope dn(FE_DOWNWARD);
    volatile double lo = 1.0 / acc.hi;
    RoundingScope up(FE_UPWARD);
    volatile double hi = 1.0 / acc.lo;
    return {lo, hi};
  }
  return widen(std::pow(base, e));
}

Iv imin(Iv a, Iv b) { return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)}; }

}  // namespace

RectExtents rect_extents(const DyadicRectangle& r) {
  if (!(r.scale_Rp > 0.0)) throw InvalidArgument("covering scale R' must be > 0");
  const double s = pow2(r.scale_Rp * r.j);
  const double ylo = pow2(r.scale_Rp * (r.j - 1));
  return {{s * (r.k - 1), s * (r.k + 1)}, {ylo, std::pow(3.0, r.scale_Rp) * ylo}};
}

bool rect_contains(const DyadicRectangle& r, const HalfPlanePoint& z) {
  const RectExtents e = rect_extents(r);
  return e.x.contains_open(z.x()) && e.y.contains_open(z.y());
}

std::vector<DyadicRectangle> locate(const HalfPlanePoint& z, double Rp) {
  if (!(Rp > 0.0)) throw InvalidArgument("covering scale R' must be > 0");
  // y-condition: j - 1 in (log2 y / R' - log2 3, log2 y / R').
  const double ly = std::log2(z.y()) / Rp;
  const int jlo = static_cast<int>(std::floor(ly - kLog2_3));
  const int jhi = static_cast<int>(std::ceil(ly)) + 1;
  std::vector<DyadicRectangle> out;
  for (int j = jlo; j <= jhi + 1; ++j) {
    const double s = pow2(Rp * j);
    const long kc = static_cast<long>(std::floor(z.x() / s));
    for (long k = kc - 1; k <= kc + 2; ++k) {
      DyadicRectangle r{j, k, Rp};
      if (rect_contains(r, z)) out.push_back(r);
    }
  }
  return out;
}

std::vector<DyadicRectangle> rectangles_meeting(double x0, double x1, double y0, double y1, double Rp) {
  if (!(Rp > 0.0) || !(y0 > 0.0) || !(y1 > y0) || !(x1 > x0)) throw InvalidArgument("invalid box");
  const int jlo = static_cast<int>(std::floor(std::log2(y0) / Rp - kLog2_3));
  const int jhi = static_cast<int>(std::ceil(std::log2(y1) / Rp)) + 2;
  std::vector<DyadicRectangle> out;
  for (int j = jlo; j <= jhi; ++j) {
    const double s = pow2(Rp * j);
    const long klo = static_cast<long>(std::floor(x0 / s)) - 1;
    const long khi = static_cast<long>(std::ceil(x1 / s)) + 1;
    for (long k = klo; k <= khi; ++k) {
      const DyadicRectangle r{j, k, Rp};
      const RectExtents e = rect_extents(r);
      if (e.x.lo < x1 && e.x.hi > x0 && e.y.lo < y1 && e.y.hi > y0) out.push_back(r);
    }
  }
  return out;
}

double inscribed_radius(double Rp) {
  if (!(Rp > 0.0)) throw InvalidArgument("covering scale R' must be > 0");
  const double t = std::min(-std::expm1(-Rp * std::log(2.0)), std::expm1(Rp * std::log(1.5)));
  return std::atanh(t);
}

GeodesicBall inscribed_ball(const DyadicRectangle& r) {
  const double R = inscribed_radius(r.scale_Rp);
  const double s = pow2(r.scale_Rp * r.j);
  return GeodesicBall(HalfPlanePoint(s * r.k, s / std::cosh(R)), R);
}

namespace {

Containment check_containment(const DyadicRectangle& r, Iv t) {
  const double Rp = r.scale_Rp;
  if (!(Rp > 0.0)) throw InvalidArgument("covering scale R' must be > 0");
  const Iv s = ipow(2.0, Rp * r.j);
  // Euclidean image: centre (s k, (s / cosh R) cosh R) = (s k, s), radius s tanh R.
  const Iv cx = s * point(static_cast<double>(r.k));
  const Iv cy = s;
  const Iv rad = s * t;
  const Iv ylo = ipow(2.0, Rp * (r.j - 1));
  // Each margin must be >= 0 for containment.
  const Iv margins[4] = {
      (cx - rad) - s * point(static_cast<double>(r.k - 1)),
      s * point(static_cast<double>(r.k + 1)) - (cx + rad),
      (cy - rad) - ylo,
      ipow(3.0, Rp) * ylo - (cy + rad),
  };
  bool proved = true;
  for (const Iv& m : margins) {
    if (m.hi < 0.0) return Containment::Refuted;
    proved = proved && m.lo >= 0.0;
  }
  return proved ? Containment::Proved : Containment::Undecided;
}

}  // namespace

Containment ball_in_rectangle(const DyadicRectangle& r, double tanh_radius) {
  return check_containment(r, point(tanh_radius));
}

Containment inscribed_ball_contained(const DyadicRectangle& r) {
  const double Rp = r.scale_Rp;
  if (!(Rp > 0.0)) throw InvalidArgument("covering scale R' must be > 0");
  return check_containment(r, imin(point(1.0) - ipow(2.0, -Rp), ipow(1.5, Rp) - point(1.0)));
}

ChartMap::Coords ChartMap::forward(const HalfPlanePoint& z) const {
  const double inv = pow2(-scale_Rp * j);
  return {inv * z.x() - static_cast<double>(k), inv * z.y()};
}

HalfPlanePoint ChartMap::inverse(double X, double Y) const {
  if (!(Y > 0.0)) throw InvalidArgument("chart inverse needs Y > 0");
  const double s = pow2(scale_Rp * j);
  return {s * (X + static_cast<double>(k)), s * Y};
}

RectExtents ChartMap::reference() const {
  const double ylo = pow2(-scale_Rp);
  return {{-1.0, 1.0}, {ylo, std::pow(3.0, scale_Rp) * ylo}};
}

namespace {

QuadResult lebesgue_box(const PlaneFunction& f, const Interval& x, const Interval& y, const QuadratureSpec& spec) {
  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  QuadResult stats;
  QuadResult out = integrate_scalar(
      [&](double yy) {
        const QuadResult row = integrate_scalar([&](double xx) { return f(xx, yy); }, x.lo, x.hi, inner);
        stats.converged = stats.converged && row.converged;
        return row.value;
      },
      y.lo, y.hi, spec);
  out.converged = out.converged && stats.converged;
  return out;
}

}  // namespace

PushforwardCheck chart_pushforward_integral_check(const PlaneFunction& f, int j, long k, double Rp,
                                                  const QuadratureSpec& spec) {
  const ChartMap chart{j, k, Rp};
  const RectExtents ref = chart.reference();
  const RectExtents rect = rect_extents({j, k, Rp});
  const double w = pow2(-2.0 * Rp * j);

  const QuadResult lhs = lebesgue_box([&](double X, double Y) { return f(X, Y) * f(X, Y); }, ref.x, ref.y, spec);
  auto pulled = [&](double x, double y) {
    const auto c = chart.forward(HalfPlanePoint(x, y));
    const double v = f(c.X, c.Y);
    return v * v;
  };
  const QuadResult rhs = lebesgue_box([&](double x, double y) { return w * pulled(x, y); }, rect.x, rect.y, spec);
  const QuadResult hyp = riemannian_integral_box([&](const HalfPlanePoint& z) { return pulled(z.x(), z.y()); },
                                                 rect.x.lo, rect.x.hi, rect.y.lo, rect.y.hi, spec);
  for (const QuadResult* q : {&lhs, &rhs, &hyp}) q->checked("chart pushforward integral");
  return {lhs.value,
          rhs.value,
          hyp.value,
          1.0 / (ref.y.hi * ref.y.hi),
          1.0 / (ref.y.lo * ref.y.lo),
          lhs.error + rhs.error + hyp.error};
}

NormEquivalence covering_norm_sum(const PlaneFunction& f, double x0, double x1, double y0, double y1, double Rp,
                                  const QuadratureSpec& spec) {
  auto sq = [&](const HalfPlanePoint& z) {
    const double v = f(z.x(), z.y());
    return v * v;
  };
  NormEquivalence out{};
  out.norm_sq = riemannian_integral_box(sq, x0, x1, y0, y1, spec).checked("norm over support box");
  const auto rects = rectangles_meeting(x0, x1, y0, y1, Rp);
  out.rectangles = static_cast<int>(rects.size());
  out.multiplicity = multiplicity_bound(Rp);
  for (const DyadicRectangle& r : rects) {
    const RectExtents e = rect_extents(r);
    const double a = std::max(e.x.lo, x0), b = std::min(e.x.hi, x1);
    const double c = std::max(e.y.lo, y0), d = std::min(e.y.hi, y1);
    out.covered_sq += riemannian_integral_box(sq, a, b, c, d, spec).checked("norm over rectangle");
  }
  return out;
}

double hyperbolic_laplacian_fd(const PlaneFunction& f, double x, double y, double h) {
  const double s = h * y;
  const double c = f(x, y);
  const double lap = (f(x + s, y) + f(x - s, y) + f(x, y + s) + f(x, y - s) - 4.0 * c) / (s * s);
  return y * y * lap;
}

}  // namespace hyplab
