#include "hyplab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hyplab/errors.hpp"
#include "hyplab/parallel.hpp"
#include "json.hpp"

namespace hyplab {

using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kMaxInstances = 50'000'000;

struct Box {
  double x0, x1, y0, y1;
};

Box bounding_box(const Primitive& p) {
  return std::visit(
      [](const auto& s) -> Box {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EuclideanRect>) {
          return {s.x0, s.x1, s.y0, s.y1};
        } else if constexpr (std::is_same_v<T, EuclideanDisc>) {
          return {s.cx - s.radius, s.cx + s.radius, s.cy - s.radius, s.cy + s.radius};
        } else if constexpr (std::is_same_v<T, GeodesicBallShape>) {
          const EuclideanDisc d = euclidean_image(GeodesicBall({s.x, s.y}, s.radius));
          return {d.cx - d.radius, d.cx + d.radius, d.cy - d.radius, d.cy + d.radius};
        } else {
          return {s.x0, s.x1, 0.0, kInf};
        }
      },
      p);
}

// Discs, with geodesic balls converted to their Euclidean image.
EuclideanDisc as_disc(const Primitive& p) {
  if (const auto* d = std::get_if<EuclideanDisc>(&p)) return *d;
  const auto& b = std::get<GeodesicBallShape>(p);
  return euclidean_image(GeodesicBall({b.x, b.y}, b.radius));
}

bool primitive_contains(const Primitive& p, double x, double y) {
  if (const auto* r = std::get_if<EuclideanRect>(&p)) return r->x0 < x && x < r->x1 && r->y0 < y && y < r->y1;
  if (const auto* s = std::get_if<VerticalStrip>(&p)) return s->x0 < x && x < s->x1;
  return as_disc(p).contains(x, y);
}

void validate_primitive(const Primitive& p) {
  const Box b = bounding_box(p);
  if (!(b.x1 > b.x0)) throw InvalidArgument("region primitive has empty x-extent");
  if (const auto* r = std::get_if<EuclideanRect>(&p)) {
    if (!(r->y1 > r->y0)) throw InvalidArgument("region rectangle has empty y-extent");
  }
  if (const auto* d = std::get_if<EuclideanDisc>(&p)) {
    if (!(d->radius > 0.0)) throw InvalidArgument("region disc radius must be > 0");
  }
  if (const auto* g = std::get_if<GeodesicBallShape>(&p)) {
    if (!(g->y > 0.0) || !(g->radius > 0.0)) throw InvalidArgument("region geodesic ball needs y > 0, radius > 0");
  }
}

// Integer range [lo, hi] of scale indices j whose instances of a primitive
// with canonical y-extent (py0, py1) can meet heights in (ya, yb).
struct JRange {
  int lo;
  int hi;
};

JRange scale_range(const Replication& rep, double py0, double py1, double ya, double yb) {
  const double lq = std::log(rep.scale_ratio);
  double lo = -kInf, hi = kInf;
  if (py1 < kInf && ya > 0.0) lo = std::floor(std::log(ya / py1) / lq) - 1.0;
  if (py0 > 0.0 && yb < kInf) hi = std::ceil(std::log(yb / py0) / lq) + 1.0;
  if (rep.j_min) lo = std::max(lo, static_cast<double>(*rep.j_min));
  if (rep.j_max) hi = std::min(hi, static_cast<double>(*rep.j_max));
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("replicated region needs a finite scale range here");
  return {static_cast<int>(lo), static_cast<int>(hi)};
}

// Range of horizontal indices n for which [px0 + n p, px1 + n p] meets
// [xa, xb] (all in instance-scaled coordinates).
std::pair<long, long> shift_range(double period, double px0, double px1, double xa, double xb) {
  if (period <= 0.0) return (px0 < xb && px1 > xa) ? std::pair{0L, 0L} : std::pair{1L, 0L};
  const double lo = std::ceil((xa - px1) / period);
  const double hi = std::floor((xb - px0) / period);
  if (hi - lo > static_cast<double>(kMaxInstances)) throw InvalidArgument("region window spans too many instances");
  return {static_cast<long>(lo), static_cast<long>(hi)};
}

// Calls fn(P, s, shift) for every instance z -> s z + shift of every
// primitive whose bounding box meets the canonical window; the window may be
// unbounded in y only if the replication bounds j.
template <class Fn>
void for_each_instance(const std::vector<Primitive>& prims, const std::optional<Replication>& rep, double xa,
                       double xb, double ya, double yb, Fn&& fn) {
  long count = 0;
  for (const Primitive& p : prims) {
    const Box b = bounding_box(p);
    if (!rep) {
      if (b.x0 < xb && b.x1 > xa && b.y0 < yb && b.y1 > ya) fn(p, 1.0, 0.0);
      continue;
    }
    const JRange jr = scale_range(*rep, b.y0, b.y1, ya, yb);
    for (int j = jr.lo; j <= jr.hi; ++j) {
      const double s = std::pow(rep->scale_ratio, j);
      if (!(s * b.y0 < yb && s * b.y1 > ya)) continue;
      const auto [n0, n1] = shift_range(rep->period_x, b.x0, b.x1, xa / s, xb / s);
      count += std::max(0L, n1 - n0 + 1);
      if (count > kMaxInstances) throw InvalidArgument("region window spans too many instances");
      for (long n = n0; n <= n1; ++n) fn(p, s, s * static_cast<double>(n) * rep->period_x);
    }
  }
}

}  // namespace

Region::Region(std::vector<Primitive> primitives, std::optional<Replication> replication, bool complement,
               Isometry frame)
    : primitives_(std::move(primitives)), replication_(replication), complement_(complement), frame_(frame) {
  if (!(frame_.scale > 0.0)) throw InvalidArgument("region frame scale must be > 0");
  for (const Primitive& p : primitives_) validate_primitive(p);
  if (replication_) {
    const Replication& r = *replication_;
    if (!(r.scale_ratio > 1.0)) throw InvalidArgument("replication scale_ratio must be > 1");
    if (!(r.period_x >= 0.0)) throw InvalidArgument("replication period_x must be >= 0");
    if (r.j_min && r.j_max && *r.j_min > *r.j_max) throw InvalidArgument("replication j_min > j_max");
    for (const Primitive& p : primitives_) {
      const Box b = bounding_box(p);
      if ((b.y0 <= 0.0 || b.y1 == kInf) && !(r.j_min && r.j_max))
        throw InvalidArgument("y-unbounded primitive needs a finite replication j range");
    }
  }
}

bool Region::contains_canonical(double x, double y) const {
  bool inside = false;
  for_each_instance(primitives_, replication_, x, x, y, y, [&](const Primitive& p, double s, double shift) {
    if (!inside && primitive_contains(p, (x - shift) / s, y / s)) inside = true;
  });
  return inside != complement_;
}

bool Region::contains(const HalfPlanePoint& z) const {
  const HalfPlanePoint c = frame_.inverse().apply(z);
  return contains_canonical(c.x(), c.y());
}

bool membership(const Region& region, const HalfPlanePoint& z) { return region.contains(z); }

double Region::union_length(double y, double xa, double xb) const {
  std::vector<std::pair<double, double>> iv;
  for_each_instance(primitives_, replication_, xa, xb, y, y, [&](const Primitive& p, double s, double shift) {
    const double yy = y / s;
    double a = 0, b = 0;
    if (const auto* r = std::get_if<EuclideanRect>(&p)) {
      if (!(r->y0 < yy && yy < r->y1)) return;
      a = r->x0, b = r->x1;
    } else if (const auto* st = std::get_if<VerticalStrip>(&p)) {
      a = st->x0, b = st->x1;
    } else {
      const EuclideanDisc d = as_disc(p);
      const double dy = yy - d.cy;
      const double h = (d.radius - dy) * (d.radius + dy);
      if (!(h > 0.0)) return;
      const double w = std::sqrt(h);
      a = d.cx - w, b = d.cx + w;
    }
    a = std::max(xa, s * a + shift);
    b = std::min(xb, s * b + shift);
    if (b > a) iv.emplace_back(a, b);
  });
  std::sort(iv.begin(), iv.end());
  double total = 0.0, cur_a = 0.0, cur_b = -kInf;
  for (const auto& [a, b] : iv) {
    if (a > cur_b) {
      if (cur_b > -kInf) total += cur_b - cur_a;
      cur_a = a, cur_b = b;
    } else {
      cur_b = std::max(cur_b, b);
    }
  }
  if (cur_b > -kInf) total += cur_b - cur_a;
  return total;
}

double Region::chord_length(double y, double xa, double xb) const {
  if (!(xb > xa)) return 0.0;
  const double a = frame_.scale, b = frame_.shift;
  const double inside = a * union_length(y / a, (xa - b) / a, (xb - b) / a);
  return complement_ ? std::max(0.0, (xb - xa) - inside) : inside;
}

std::vector<double> Region::chord_breakpoints(double ya, double yb, double xa, double xb) const {
  const double a = frame_.scale, b = frame_.shift;
  std::vector<double> out;
  for_each_instance(primitives_, replication_, (xa - b) / a, (xb - b) / a, ya / a, yb / a,
                    [&](const Primitive& p, double s, double) {
                      const Box bx = bounding_box(p);
                      for (double y : {s * bx.y0 * a, s * bx.y1 * a})
                        if (y > ya && y < yb) out.push_back(y);
                    });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> Region::crossing_angles(const HalfPlanePoint& base, double r) const {
  // Work in coordinates normalised so that base = (0, 1); the circle is
  // X^2 + Y^2 - 2 C Y + 1 = 0 with C = cosh r, S = sinh r.
  const double bx = base.x(), by = base.y();
  const double C = std::cosh(r), S = std::sinh(r);
  const double er = std::exp(r), emr = std::exp(-r);
  std::vector<double> angles;
  auto push = [&](double X, double Y) {
    if (Y > 0.0) angles.push_back(std::atan2(-2.0 * X, X * X + Y * Y - 1.0));
  };
  auto vertical = [&](double c, double ylo, double yhi) {
    const double h = (S - std::abs(c)) * (S + std::abs(c));
    if (!(h > 0.0)) return;
    const double q = std::sqrt(h);
    const double y_up = C + q;
    const double y_dn = (1.0 + c * c) / (C + q);
    if (y_dn > ylo && y_dn < yhi) push(c, y_dn);
    if (y_up > ylo && y_up < yhi) push(c, y_up);
  };
  auto horizontal = [&](double c, double xlo, double xhi) {
    if (!(c > emr && c < er)) return;
    const double w = std::sqrt((er - c) * (c - emr));
    if (-w > xlo && -w < xhi) push(-w, c);
    if (w > xlo && w < xhi) push(w, c);
  };
  auto disc = [&](double dx, double dy, double rho) {
    // Power of the disc centre with respect to the circle, in the stable
    // hyperbolic form 2 dy (cosh d(base, D) - cosh r).
    const double dD = geodesic_distance({0.0, 1.0}, {dx, dy});
    const double power = 4.0 * dy * std::sinh(0.5 * (dD + r)) * std::sinh(0.5 * (dD - r));
    const double nx = dx, ny = dy - C;
    const double nn = nx * nx + ny * ny;
    if (nn == 0.0) return;
    const double off = 0.5 * (power + rho * rho) / nn;  // (n.D - k) / |n|^2
    const double h2 = rho * rho - off * off * nn;
    if (!(h2 > 0.0)) return;
    const double w = std::sqrt(h2 / nn);
    const double fx = dx - off * nx, fy = dy - off * ny;
    push(fx - w * ny, fy + w * nx);
    push(fx + w * ny, fy - w * nx);
  };

  const double ymin = by * emr, ymax = by * er;
  const std::optional<Replication>& rep = replication_;
  for (const Primitive& p : primitives_) {
    const Box b = bounding_box(p);
    auto visit_instance = [&](double s, double shift) {
      // Instance z -> s z + shift, then normalisation ((x - bx)/by, y/by).
      const double sc = s / by, sh = (shift - bx) / by;
      if (const auto* rc = std::get_if<EuclideanRect>(&p)) {
        const double X0 = sc * rc->x0 + sh, X1 = sc * rc->x1 + sh, Y0 = sc * rc->y0, Y1 = sc * rc->y1;
        vertical(X0, Y0, Y1);
        vertical(X1, Y0, Y1);
        horizontal(Y0, X0, X1);
        horizontal(Y1, X0, X1);
      } else if (const auto* st = std::get_if<VerticalStrip>(&p)) {
        vertical(sc * st->x0 + sh, 0.0, kInf);
        vertical(sc * st->x1 + sh, 0.0, kInf);
      } else {
        const EuclideanDisc d = as_disc(p);
        disc(sc * d.cx + sh, sc * d.cy, sc * d.radius);
      }
    };
    if (!rep) {
      visit_instance(1.0, 0.0);
      continue;
    }
    const JRange jr = scale_range(*rep, b.y0, b.y1, ymin, ymax);
    long count = 0;
    for (int j = jr.lo; j <= jr.hi; ++j) {
      const double s = std::pow(rep->scale_ratio, j);
      const double band_lo = std::max(s * b.y0, ymin), band_hi = std::min(s * b.y1, ymax);
      if (!(band_hi > band_lo)) continue;
      // Half-width of the circle within the band, from the stable
      // horizontal-line formula.
      double half;
      const double cyc = by * C;
      if (band_lo <= cyc && cyc <= band_hi) {
        half = by * S;
      } else {
        const double e = (cyc < band_lo ? band_lo : band_hi) / by;
        half = by * std::sqrt(std::max(0.0, (er - e) * (e - emr)));
      }
      const auto [n0, n1] = shift_range(rep->period_x, b.x0, b.x1, (bx - half) / s, (bx + half) / s);
      count += std::max(0L, n1 - n0 + 1);
      if (count > kMaxInstances) throw InvalidArgument("geodesic circle meets too many region instances");
      for (long n = n0; n <= n1; ++n) visit_instance(s, s * static_cast<double>(n) * rep->period_x);
    }
  }
  return angles;
}

std::vector<std::pair<double, double>> Region::occupied_arcs(const HalfPlanePoint& base, double r) const {
  std::vector<std::pair<double, double>> arcs;
  if (r <= 0.0) {
    if (contains(base)) arcs.emplace_back(-pi, pi);
    return arcs;
  }
  const HalfPlanePoint cb = frame_.inverse().apply(base);
  std::vector<double> a = crossing_angles(cb, r);
  a.push_back(-pi);
  a.push_back(pi);
  std::sort(a.begin(), a.end());
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i] <= a[i - 1]) continue;
    const HalfPlanePoint m = polar_point(cb, r, 0.5 * (a[i] + a[i - 1]));
    if (!contains_canonical(m.x(), m.y())) continue;
    if (!arcs.empty() && arcs.back().second == a[i - 1])
      arcs.back().second = a[i];
    else
      arcs.emplace_back(a[i - 1], a[i]);
  }
  return arcs;
}

double Region::angular_occupancy(const HalfPlanePoint& base, double r) const {
  double inside = 0.0;
  for (const auto& [lo, hi] : occupied_arcs(base, r)) inside += hi - lo;
  return inside;
}

Region Region::transformed(const Isometry& iso) const {
  return Region(primitives_, replication_, complement_, iso.compose(frame_));
}

QuadResult ball_mass_result(const Region& region, const GeodesicBall& ball, const QuadratureSpec& spec) {
  const EuclideanDisc d = euclidean_image(ball);
  // y = cy - rho cos(phi): the disc chord is 2 rho sin(phi) and the
  // endpoint square roots disappear.
  std::vector<double> breaks{0.0};
  for (double y : region.chord_breakpoints(d.cy - d.radius, d.cy + d.radius, d.cx - d.radius, d.cx + d.radius))
    breaks.push_back(std::acos(std::clamp((d.cy - y) / d.radius, -1.0, 1.0)));
  breaks.push_back(pi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return integrate(
      [&](std::span<const double> phi, std::span<double> out) {
        for (std::size_t i = 0; i < phi.size(); ++i) {
          const double sn = std::sin(phi[i]);
          const double y = d.cy - d.radius * std::cos(phi[i]);
          const double w = d.radius * sn;
          out[i] = region.chord_length(y, d.cx - w, d.cx + w) * d.radius * sn / (y * y);
        }
      },
      breaks, spec);
}

double ball_mass(const Region& region, const GeodesicBall& ball, const QuadratureSpec& spec) {
  return ball_mass_result(region, ball, spec).checked("ball mass");
}

QuadResult ball_mass_polar(const Region& region, const GeodesicBall& ball, const QuadratureSpec& spec) {
  return integrate(
      [&](std::span<const double> r, std::span<double> out) {
        for (std::size_t i = 0; i < r.size(); ++i)
          out[i] = region.angular_occupancy(ball.center(), r[i]) * std::sinh(r[i]);
      },
      0.0, ball.radius(), spec);
}

MonteCarloResult ball_mass_monte_carlo(const Region& region, const GeodesicBall& ball, int samples,
                                       std::uint64_t seed) {
  return monte_carlo_integral([&](const HalfPlanePoint& z) { return region.contains(z) ? 1.0 : 0.0; }, ball,
                              samples, seed);
}

QuadResult rect_mass_result(const Region& region, const DyadicRectangle& r, const QuadratureSpec& spec) {
  const RectExtents e = rect_extents(r);
  std::vector<double> breaks{e.y.lo};
  for (double y : region.chord_breakpoints(e.y.lo, e.y.hi, e.x.lo, e.x.hi)) breaks.push_back(y);
  breaks.push_back(e.y.hi);
  return integrate(
      [&](std::span<const double> y, std::span<double> out) {
        for (std::size_t i = 0; i < y.size(); ++i)
          out[i] = region.chord_length(y[i], e.x.lo, e.x.hi) / (y[i] * y[i]);
      },
      breaks, spec);
}

double rect_mass(const Region& region, const DyadicRectangle& r, const QuadratureSpec& spec) {
  return rect_mass_result(region, r, spec).checked("rectangle mass");
}

ThicknessCertificate thickness_scan(const Region& region, double R, const ScanWindow& window, double grid_step,
                                    double delta, const QuadratureSpec& spec) {
  if (!(grid_step > 0.0)) throw InvalidArgument("thickness scan needs grid_step > 0");
  if (!(R > 0.0)) throw InvalidArgument("thickness scan needs R > 0");
  if (!(window.y_min > 0.0) || !(window.y_max >= window.y_min) || !(window.x_max >= window.x_min))
    throw InvalidArgument("thickness scan window must be bounded with y_min > 0");
  std::vector<HalfPlanePoint> nodes;
  const double e0 = std::log(window.y_min), e1 = std::log(window.y_max);
  const int ne = static_cast<int>(std::floor((e1 - e0) / grid_step + 1e-9));
  for (int i = 0; i <= ne; ++i) {
    const double y = std::exp(e0 + i * grid_step);
    const int nx = static_cast<int>(std::floor((window.x_max - window.x_min) / (grid_step * y) + 1e-9));
    for (int k = 0; k <= nx; ++k) nodes.emplace_back(window.x_min + k * grid_step * y, y);
  }
  std::vector<QuadResult> mass(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { mass[i] = ball_mass_result(region, GeodesicBall(nodes[i], R), spec); });

  ThicknessCertificate c;
  c.R = R;
  c.delta = delta;
  c.nodes = static_cast<int>(nodes.size());
  std::ostringstream g;
  g << "log y in [" << e0 << ", " << e1 << "], x in [" << window.x_min << ", " << window.x_max
    << "], step " << grid_step << " in (log y, x/y)";
  c.grid = g.str();
  c.min_mass = kInf;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!mass[i].converged) {
      ++c.failed_nodes;
      continue;
    }
    if (mass[i].value < c.min_mass) {
      c.min_mass = mass[i].value;
      c.argmin = nodes[i];
    }
  }
  if (c.min_mass < delta) {
    c.mode = ThicknessCertificate::Mode::Refuted;
    c.witness = c.argmin;
    c.witness_mass = c.min_mass;
  } else if (c.failed_nodes == c.nodes) {
    c.mode = ThicknessCertificate::Mode::Refuted;  // nothing certified
  } else {
    c.mode = delta > 0.0 ? ThicknessCertificate::Mode::CertifiedOnGrid : ThicknessCertificate::Mode::Refuted;
  }
  return c;
}

Assumption2Result assumption2_scan(const Region& region, double Rp, int j_min, int j_max, long k_min, long k_max,
                                   const QuadratureSpec& spec) {
  if (j_min > j_max || k_min > k_max) throw InvalidArgument("empty rectangle index window");
  std::vector<DyadicRectangle> rects;
  for (int j = j_min; j <= j_max; ++j)
    for (long k = k_min; k <= k_max; ++k) rects.push_back({j, k, Rp});
  std::vector<double> m(rects.size());
  parallel_for(rects.size(), [&](std::size_t i) { m[i] = rect_mass(region, rects[i], spec); });
  Assumption2Result out;
  out.rectangles = static_cast<int>(rects.size());
  out.min_mass = kInf;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    if (m[i] < out.min_mass) {
      out.min_mass = m[i];
      out.argmin = rects[i];
    }
  }
  return out;
}

namespace {

using nlohmann::json;

double num(const json& o, const char* key) {
  if (!o.contains(key) || !o[key].is_number()) throw ConfigError(std::string("region file: missing number '") + key + "'");
  return o[key].get<double>();
}

}  // namespace

Region region_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("region file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version")) throw ConfigError("region file: missing version");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
    throw ConfigError("region file: unsupported version " + doc["version"].dump());
  std::vector<Primitive> prims;
  for (const json& p : doc.value("primitives", json::array())) {
    const std::string type = p.value("type", "");
    if (type == "euclidean_rect") {
      prims.push_back(EuclideanRect{num(p, "x0"), num(p, "x1"), num(p, "y0"), num(p, "y1")});
    } else if (type == "euclidean_disc") {
      prims.push_back(EuclideanDisc{num(p, "cx"), num(p, "cy"), num(p, "radius")});
    } else if (type == "geodesic_ball") {
      prims.push_back(GeodesicBallShape{num(p, "x"), num(p, "y"), num(p, "radius")});
    } else if (type == "vertical_strip") {
      prims.push_back(VerticalStrip{num(p, "x0"), num(p, "x1")});
    } else {
      throw ConfigError("region file: unknown primitive type '" + type + "'");
    }
  }
  std::optional<Replication> rep;
  if (doc.contains("replication") && !doc["replication"].is_null()) {
    const json& r = doc["replication"];
    Replication x;
    x.period_x = r.value("period_x", 0.0);
    x.scale_ratio = num(r, "scale_ratio");
    if (r.contains("j_min") && !r["j_min"].is_null()) x.j_min = r["j_min"].get<int>();
    if (r.contains("j_max") && !r["j_max"].is_null()) x.j_max = r["j_max"].get<int>();
    rep = x;
  }
  Isometry frame;
  if (doc.contains("frame")) frame = {num(doc["frame"], "scale"), num(doc["frame"], "shift")};
  try {
    return Region(std::move(prims), rep, doc.value("complement", false), frame);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("region file: ") + e.what());
  }
}

std::string region_to_json(const Region& region) {
  json doc;
  doc["version"] = 1;
  doc["complement"] = region.complement();
  json prims = json::array();
  for (const Primitive& p : region.primitives()) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, EuclideanRect>)
            prims.push_back({{"type", "euclidean_rect"}, {"x0", s.x0}, {"x1", s.x1}, {"y0", s.y0}, {"y1", s.y1}});
          else if constexpr (std::is_same_v<T, EuclideanDisc>)
            prims.push_back({{"type", "euclidean_disc"}, {"cx", s.cx}, {"cy", s.cy}, {"radius", s.radius}});
          else if constexpr (std::is_same_v<T, GeodesicBallShape>)
            prims.push_back({{"type", "geodesic_ball"}, {"x", s.x}, {"y", s.y}, {"radius", s.radius}});
          else
            prims.push_back({{"type", "vertical_strip"}, {"x0", s.x0}, {"x1", s.x1}});
        },
        p);
  }
  doc["primitives"] = prims;
  if (const auto& r = region.replication()) {
    json jr{{"period_x", r->period_x}, {"scale_ratio", r->scale_ratio}};
    jr["j_min"] = r->j_min ? json(*r->j_min) : json(nullptr);
    jr["j_max"] = r->j_max ? json(*r->j_max) : json(nullptr);
    doc["replication"] = jr;
  }
  if (region.frame().scale != 1.0 || region.frame().shift != 0.0)
    doc["frame"] = {{"scale", region.frame().scale}, {"shift", region.frame().shift}};
  return doc.dump(2);
}

Region load_region(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open region file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return region_from_json(ss.str());
}

}  // namespace hyplab
