#include "hyplab/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyplab/errors.hpp"
#include "hyplab/heatkernel.hpp"
#include "hyplab/parallel.hpp"
#include "hyplab/regions.hpp"
#include "hyplab/simd/kernels.hpp"
#include "json.hpp"

namespace hyplab {

using std::numbers::pi;

namespace {

double sinhc(double x) { return std::abs(x) < 1e-5 ? 1.0 + x * x / 6.0 : std::sinh(x) / x; }

// Mehler nodes for one radius: phi_s(r) = sum_i g_i cos(s u_i).
void mehler_rule(double r, double s_max, std::vector<double>& g, std::vector<double>& u) {
  const Rule& gl = gauss_legendre(16);
  const int panels = static_cast<int>(std::max(std::ceil(s_max * r / 6.0), std::ceil(r / 2.0))) + 1;
  const double c = 2.0 * std::numbers::sqrt2 / pi;
  g.resize(16 * panels);
  u.resize(16 * panels);
  std::size_t idx = 0;
  for (int k = 0; k < panels; ++k) {
    const double va = std::sqrt(r * k / panels), vb = std::sqrt(r * (k + 1) / panels);
    const double mid = 0.5 * (va + vb), half = 0.5 * (vb - va);
    for (std::size_t i = 0; i < gl.size(); ++i, ++idx) {
      const double v = mid + half * gl.nodes[i];
      const double x2 = 0.5 * v * v;
      g[idx] = half * gl.weights[i] * c / std::sqrt(std::sinh(r - x2) * sinhc(x2));
      u[idx] = r - v * v;
    }
  }
}

void check_r(double r) {
  if (!(r >= 0.0) || r > 700.0) throw InvalidArgument("spherical function needs 0 <= r <= 700");
}

}  // namespace

double spectral_lambda(double s) { return std::sqrt(s * s + 0.25); }

double plancherel_density(double s) { return s * std::tanh(pi * s); }

void spherical_function_batch(std::span<const double> freq, double r, std::span<double> out) {
  check_r(r);
  if (freq.empty()) return;
  if (r == 0.0) {
    std::fill(out.begin(), out.begin() + freq.size(), 1.0);
    return;
  }
  double s_max = 0.0;
  for (double s : freq) {
    if (!(s >= 0.0)) throw InvalidArgument("spherical function needs s >= 0");
    s_max = std::max(s_max, s);
  }
  thread_local std::vector<double> g, u;
  mehler_rule(r, s_max, g, u);
  simd::active().cosine_sum(g, u, freq, out.first(freq.size()));
}

double spherical_function(double s, double r) {
  double out = 0.0;
  spherical_function_batch(std::span<const double>(&s, 1), r, std::span<double>(&out, 1));
  return out;
}

QuadResult spherical_function_circle(double s, double r, const QuadratureSpec& spec) {
  check_r(r);
  const double emr = std::exp(-r), sh = std::sinh(r);
  QuadResult q = integrate(
      [&](std::span<const double> th, std::span<double> out) {
        for (std::size_t i = 0; i < th.size(); ++i) {
          const double h = std::sin(0.5 * th[i]);
          const double x = emr + 2.0 * sh * h * h;
          out[i] = std::cos(s * std::log(x)) / std::sqrt(x);
        }
      },
      0.0, pi, spec);
  q.value /= pi;
  q.error /= pi;
  return q;
}

SGrid SGrid::uniform(double s_max, int n) {
  if (!(s_max > 0.0) || n < 4) throw InvalidArgument("uniform s-grid needs s_max > 0 and n >= 4");
  SGrid g;
  g.s.resize(n);
  g.w.assign(n, 0.0);
  const int m = n - 1;
  const double h = s_max / m;
  for (int i = 0; i < n; ++i) g.s[i] = s_max * i / m;
  const int simpson = (m % 2 == 0) ? m : m - 3;
  for (int i = 0; i < simpson; i += 2) {
    g.w[i] += h / 3.0;
    g.w[i + 1] += 4.0 * h / 3.0;
    g.w[i + 2] += h / 3.0;
  }
  if (simpson != m) {
    const int i = simpson;
    g.w[i] += 3.0 * h / 8.0;
    g.w[i + 1] += 9.0 * h / 8.0;
    g.w[i + 2] += 9.0 * h / 8.0;
    g.w[i + 3] += 3.0 * h / 8.0;
  }
  return g;
}

SGrid SGrid::gauss_legendre(double s_max, int panels, int order) {
  if (!(s_max > 0.0)) throw InvalidArgument("Gauss-Legendre s-grid needs s_max > 0");
  Rule r = composite_gauss_legendre(0.0, s_max, panels, order);
  return SGrid{std::move(r.nodes), std::move(r.weights)};
}

SGrid SGrid::for_band(double Lambda, int n) {
  if (!(Lambda > 0.5)) throw InvalidArgument("band limit must exceed 1/2 to carry spectrum");
  return uniform(std::sqrt(Lambda * Lambda - 0.25), n);
}

double SpectralCoefficients::lambda_eff() const {
  for (std::size_t k = values.size(); k-- > 0;)
    if (values[k] != 0.0) return spectral_lambda(grid.s[k]);
  return 0.0;
}

double SpectralCoefficients::tail_ratio() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m > 0.0 ? std::abs(values.back()) / m : 0.0;
}

double SpectralCoefficients::max_error() const {
  double m = 0.0;
  for (double e : errors) m = std::max(m, e);
  return m;
}

namespace {

std::vector<double> transform_on(const RadialProfile& f, const Rule& rule, const SGrid& grid) {
  const std::size_t ns = grid.size();
  std::vector<double> table(rule.size() * ns);
  parallel_for(rule.size(), [&](std::size_t j) {
    const double r = rule.nodes[j];
    const double a = 2.0 * pi * rule.weights[j] * f(r) * std::sinh(r);
    std::span<double> row(table.data() + j * ns, ns);
    if (a == 0.0) {
      std::fill(row.begin(), row.end(), 0.0);
      return;
    }
    spherical_function_batch(grid.s, r, row);
    for (double& v : row) v *= a;
  });
  std::vector<double> out(ns, 0.0);
  for (std::size_t j = 0; j < rule.size(); ++j)
    for (std::size_t k = 0; k < ns; ++k) out[k] += table[j * ns + k];
  return out;
}

}  // namespace

SpectralCoefficients spherical_transform(const RadialProfile& f, double r_max, const SGrid& grid,
                                         const HalfPlanePoint& base) {
  if (!(r_max > 0.0)) throw InvalidArgument("spherical transform needs r_max > 0");
  const double width = std::min(0.5, 4.0 / std::max(1.0, grid.s_max()));
  const int panels = std::max(2, static_cast<int>(std::ceil(r_max / width)));
  SpectralCoefficients c;
  c.base = base;
  c.grid = grid;
  c.values = transform_on(f, composite_gauss_legendre(0.0, r_max, panels, 16), grid);
  const std::vector<double> coarse = transform_on(f, composite_gauss_legendre(0.0, r_max, panels / 2, 16), grid);
  c.errors.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) c.errors[k] = std::abs(c.values[k] - coarse[k]);
  return c;
}

SpectralCoefficients heat_coefficients(double t, const SGrid& grid, const HalfPlanePoint& base) {
  if (!(t > 0.0)) throw InvalidArgument("heat coefficients need t > 0");
  SpectralCoefficients c;
  c.base = base;
  c.grid = grid;
  c.values.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    c.values[k] = kHeatMultiplier * std::exp(-t * (grid.s[k] * grid.s[k] + 0.25));
  return c;
}

double inverse_spherical_transform(const SpectralCoefficients& c, double r) {
  return BandlimitedFunction(c)(polar_point(c.base, r, 0.0));
}

double parseval_norm_sq(const SpectralCoefficients& c) {
  double acc = 0.0;
  for (std::size_t k = 0; k < c.grid.size(); ++k)
    acc += c.grid.w[k] * plancherel_density(c.grid.s[k]) * c.values[k] * c.values[k];
  return kPlancherel * acc;
}

double calibrate_plancherel(const QuadratureSpec& spec) {
  const double h = heat_kernel(KernelQuery(1.0, 0.0), spec);
  const double den =
      integrate_scalar([](double s) { return std::exp(-(s * s + 0.25)) * plancherel_density(s); }, 0.0, 12.0, spec)
          .checked("Plancherel calibration");
  return h / den;
}

BandlimitedFunction::BandlimitedFunction(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("band-limited function needs at least one component");
  for (const Component& c : components_) {
    if (!(c.coeffs.grid == components_.front().coeffs.grid))
      throw InvalidArgument("band-limited components must share one s-grid");
    if (c.coeffs.values.size() != c.coeffs.grid.size()) throw InvalidArgument("coefficient/grid size mismatch");
  }
}

BandlimitedFunction::BandlimitedFunction(SpectralCoefficients c, double weight)
    : BandlimitedFunction(std::vector<Component>{{std::move(c), weight}}) {}

const SGrid& BandlimitedFunction::grid() const { return components_.at(0).coeffs.grid; }

namespace {

// Number of leading grid nodes carrying any nonzero coefficient.
std::size_t active_prefix(const std::vector<BandlimitedFunction::Component>& comps) {
  std::size_t n = 0;
  for (const auto& c : comps)
    for (std::size_t k = c.coeffs.values.size(); k > n; --k)
      if (c.coeffs.values[k - 1] != 0.0) {
        n = k;
        break;
      }
  return n;
}

}  // namespace

std::vector<double> BandlimitedFunction::spectral_vector(const HalfPlanePoint& z) const {
  const SGrid& g = grid();
  const std::size_t n = active_prefix(components_);
  std::vector<double> out(g.size(), 0.0), phi(n);
  for (const Component& c : components_) {
    spherical_function_batch(std::span<const double>(g.s.data(), n), geodesic_distance(z, c.coeffs.base), phi);
    for (std::size_t k = 0; k < n; ++k) out[k] += c.weight * c.coeffs.values[k] * phi[k];
  }
  return out;
}

double BandlimitedFunction::synthesize(std::span<const double> g, std::span<const double> multiplier) const {
  const SGrid& gr = grid();
  double acc = 0.0;
  for (std::size_t k = 0; k < gr.size(); ++k) {
    const double m = multiplier.empty() ? 1.0 : multiplier[k];
    acc += gr.w[k] * plancherel_density(gr.s[k]) * m * g[k];
  }
  return kPlancherel * acc;
}

double BandlimitedFunction::operator()(const HalfPlanePoint& z) const { return synthesize(spectral_vector(z), {}); }

std::vector<double> BandlimitedFunction::parseval_density() const {
  const SGrid& g = grid();
  const std::size_t n = active_prefix(components_);
  std::vector<double> q(g.size(), 0.0), phi(n);
  for (std::size_t a = 0; a < components_.size(); ++a) {
    const Component& ca = components_[a];
    for (std::size_t k = 0; k < n; ++k) q[k] += ca.weight * ca.weight * ca.coeffs.values[k] * ca.coeffs.values[k];
    for (std::size_t b = a + 1; b < components_.size(); ++b) {
      const Component& cb = components_[b];
      spherical_function_batch(std::span<const double>(g.s.data(), n),
                               geodesic_distance(ca.coeffs.base, cb.coeffs.base), phi);
      for (std::size_t k = 0; k < n; ++k)
        q[k] += 2.0 * ca.weight * cb.weight * ca.coeffs.values[k] * cb.coeffs.values[k] * phi[k];
    }
  }
  return q;
}

double BandlimitedFunction::norm_sq() const { return synthesize(parseval_density(), {}); }

double BandlimitedFunction::lambda_eff() const {
  double m = 0.0;
  for (const Component& c : components_) m = std::max(m, c.coeffs.lambda_eff());
  return m;
}

SpectralCoefficients project(const SpectralCoefficients& c, double Lambda) {
  SpectralCoefficients out = c;
  for (std::size_t k = 0; k < out.values.size(); ++k)
    if (!(Lambda >= 0.5) || spectral_lambda(out.grid.s[k]) > Lambda) out.values[k] = 0.0;
  return out;
}

BandlimitedFunction project(const BandlimitedFunction& u, double Lambda) {
  std::vector<BandlimitedFunction::Component> comps = u.components();
  for (auto& c : comps) c.coeffs = project(c.coeffs, Lambda);
  return BandlimitedFunction(std::move(comps));
}

BandlimitedFunction functional_calculus_apply(const BandlimitedFunction& u, const Multiplier& phi) {
  std::vector<BandlimitedFunction::Component> comps = u.components();
  const SGrid& g = u.grid();
  std::vector<double> m(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) m[k] = phi(spectral_lambda(g.s[k]));
  for (auto& c : comps)
    for (std::size_t k = 0; k < g.size(); ++k) c.coeffs.values[k] *= m[k];
  return BandlimitedFunction(std::move(comps));
}

double multiplier_sup(const Multiplier& phi, double Lambda) {
  if (!(Lambda >= 0.5)) return 0.0;
  constexpr int n = 4097;
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(phi(0.5 + (Lambda - 0.5) * i / (n - 1))));
  return m;
}

Multiplier lift_multiplier(int m, int p, double t) {
  if (p < 0) throw InvalidArgument("derivative order must be >= 0");
  return [m, p, t](double lambda) {
    const double x = lambda * t;
    return std::pow(lambda, m) * (p % 2 == 0 ? std::sinh(x) : std::cosh(x));
  };
}

LiftEvaluator::LiftEvaluator(const BandlimitedFunction& u, double Lambda) : u_(project(u, Lambda)) {
  for (double s : u_.grid().s) lambda_.push_back(spectral_lambda(s));
}

std::vector<double> LiftEvaluator::at(std::span<const double> t, const HalfPlanePoint& z) const {
  const std::vector<double> g = u_.spectral_vector(z);
  std::vector<double> m(lambda_.size()), out;
  out.reserve(t.size());
  for (double ti : t) {
    for (std::size_t k = 0; k < lambda_.size(); ++k) m[k] = std::sinh(lambda_[k] * ti) / lambda_[k];
    out.push_back(u_.synthesize(g, m));
  }
  return out;
}

double LiftEvaluator::operator()(double t, const HalfPlanePoint& z) const {
  return at(std::span<const double>(&t, 1), z)[0];
}

double harmonic_lift(const BandlimitedFunction& u, double Lambda, double t, const HalfPlanePoint& z) {
  return LiftEvaluator(u, Lambda)(t, z);
}

LiftResidual harmonic_lift_residual(const BandlimitedFunction& u, double Lambda, double t0, double t1, double x0,
                                    double x1, double y0, double y1, int n, double h) {
  if (n < 2 || !(h > 0.0) || !(y0 > 0.0)) throw InvalidArgument("lift residual needs n >= 2, h > 0, y0 > 0");
  const LiftEvaluator lift(u, Lambda);
  auto node = [n](double a, double b, int i) { return a + (b - a) * i / (n - 1); };

  // Times: t_i for spatial neighbours, t_i + {-2h..2h} at the centre, and
  // {-2h..2h} around 0 for the initial velocity.
  std::vector<double> times;
  for (int i = 0; i < n; ++i)
    for (int o = -2; o <= 2; ++o) times.push_back(node(t0, t1, i) + o * h);
  for (int o = -2; o <= 2; ++o) times.push_back(o * h);
  std::vector<double> plain(n);
  for (int i = 0; i < n; ++i) plain[i] = node(t0, t1, i);

  struct Cell {
    double residual = 0.0, vmax = 0.0, init_err = 0.0, init = 0.0;
  };
  std::vector<Cell> cells(n * n);
  parallel_for(cells.size(), [&](std::size_t idx) {
    const double x = node(x0, x1, static_cast<int>(idx % n)), y = node(y0, y1, static_cast<int>(idx / n));
    const double hs = h * y;
    const std::vector<double> c = lift.at(times, {x, y});
    std::vector<std::vector<double>> nb;
    for (auto [dx, dy] : std::initializer_list<std::pair<int, int>>{{-2, 0}, {-1, 0}, {1, 0}, {2, 0}, {0, -2},
                                                                    {0, -1}, {0, 1}, {0, 2}})
      nb.push_back(lift.at(plain, {x + dx * hs, y + dy * hs}));
    auto d2 = [h](double m2, double m1, double c0, double p1, double p2) {
      return (-m2 + 16.0 * m1 - 30.0 * c0 + 16.0 * p1 - p2) / (12.0 * h * h);
    };
    Cell cell;
    for (int i = 0; i < n; ++i) {
      const double* ct = &c[5 * i];
      const double vtt = d2(ct[0], ct[1], ct[2], ct[3], ct[4]);
      // y^2 (v_xx + v_yy) with spatial step h y.
      const double lap = d2(nb[0][i], nb[1][i], ct[2], nb[2][i], nb[3][i]) + d2(nb[4][i], nb[5][i], ct[2], nb[6][i], nb[7][i]);
      cell.residual = std::max(cell.residual, std::abs(vtt + lap));
      cell.vmax = std::max(cell.vmax, std::abs(ct[2]));
    }
    const double* z0 = &c[5 * n];
    const double vt0 = (-z0[4] + 8.0 * z0[3] - 8.0 * z0[1] + z0[0]) / (12.0 * h);
    const double pu = lift.projected()({x, y});
    cell.init_err = std::abs(vt0 - pu);
    cell.init = std::abs(pu);
    cells[idx] = cell;
  });
  LiftResidual out;
  out.points = n * n * n;
  for (const Cell& c : cells) {
    out.max_residual = std::max(out.max_residual, c.residual);
    out.max_abs = std::max(out.max_abs, c.vmax);
    out.max_initial_error = std::max(out.max_initial_error, c.init_err);
    out.max_initial = std::max(out.max_initial, c.init);
  }
  return out;
}

RatioEstimate spectral_estimate_ratio(const BandlimitedFunction& u, double Lambda, const Region& region,
                                      const QuadratureSpec& spec, double r_cut) {
  if (!(r_cut > 0.0)) throw InvalidArgument("ratio needs r_cut > 0");
  const BandlimitedFunction v = project(u, Lambda);
  const double denom = v.norm_sq();
  if (!(denom > 0.0)) throw InvalidArgument("spectral_estimate_ratio: projected function is zero");
  const HalfPlanePoint base = v.components().front().coeffs.base;
  bool radial = true;
  for (const auto& c : v.components()) radial = radial && c.coeffs.base == base;

  std::vector<double> breaks;
  for (double r = 0.0; r < r_cut; r += 0.5) breaks.push_back(r);
  breaks.push_back(r_cut);

  double num = 0.0, in_ball = 0.0;
  if (radial) {
    num = integrate(
              [&](std::span<const double> r, std::span<double> out) {
                for (std::size_t i = 0; i < r.size(); ++i) {
                  const double f = v(polar_point(base, r[i], 0.0));
                  out[i] = f * f * region.angular_occupancy(base, r[i]) * std::sinh(r[i]);
                }
              },
              breaks, spec)
              .checked("ratio numerator");
    in_ball = integrate(
                  [&](std::span<const double> r, std::span<double> out) {
                    for (std::size_t i = 0; i < r.size(); ++i) {
                      const double f = v(polar_point(base, r[i], 0.0));
                      out[i] = 2.0 * pi * f * f * std::sinh(r[i]);
                    }
                  },
                  breaks, spec)
                  .checked("ratio ball mass");
  } else {
    const double lam = v.lambda_eff();
    const Rule& gl = gauss_legendre(16);
    auto arc_integral = [&](double r, double a, double b) {
      const int panels = 1 + static_cast<int>((b - a) * (1.0 + lam * std::sinh(r)) / 4.0);
      const double w = (b - a) / panels;
      double acc = 0.0;
      for (int p = 0; p < panels; ++p)
        for (std::size_t i = 0; i < gl.size(); ++i) {
          const double th = a + w * (p + 0.5 + 0.5 * gl.nodes[i]);
          const double f = v(polar_point(base, r, th));
          acc += 0.5 * w * gl.weights[i] * f * f;
        }
      return acc;
    };
    num = integrate(
              [&](std::span<const double> r, std::span<double> out) {
                for (std::size_t i = 0; i < r.size(); ++i) {
                  double acc = 0.0;
                  for (const auto& [a, b] : region.occupied_arcs(base, r[i])) acc += arc_integral(r[i], a, b);
                  out[i] = acc * std::sinh(r[i]);
                }
              },
              breaks, spec)
              .checked("ratio numerator");
    in_ball = integrate(
                  [&](std::span<const double> r, std::span<double> out) {
                    for (std::size_t i = 0; i < r.size(); ++i) out[i] = arc_integral(r[i], -pi, pi) * std::sinh(r[i]);
                  },
                  breaks, spec)
                  .checked("ratio ball mass");
  }
  RatioEstimate e;
  e.r_cut = r_cut;
  e.denominator = denom;
  const double tail = std::max(0.0, denom - in_ball) / denom;
  e.lower = std::clamp(num / denom, 0.0, 1.0);
  e.upper = std::clamp(e.lower + tail, 0.0, 1.0);
  e.value = std::clamp(e.lower + tail * region.angular_occupancy(base, r_cut) / (2.0 * pi), 0.0, 1.0);
  return e;
}

OccupancyTable occupancy_table(const Region& region, const HalfPlanePoint& center, double r_cut,
                               std::span<const double> breakpoints, double panel, int order) {
  if (!(r_cut > 0.0)) throw InvalidArgument("occupancy table needs r_cut > 0");
  std::vector<double> bp{0.0, r_cut};
  for (double b : breakpoints)
    if (b > 0.0 && b < r_cut) bp.push_back(b);
  std::sort(bp.begin(), bp.end());
  OccupancyTable t;
  t.center = center;
  t.r_cut = r_cut;
  t.rule = composite_gauss_legendre(bp, panel, order);
  t.theta.resize(t.rule.size());
  parallel_for(t.rule.size(), [&](std::size_t j) { t.theta[j] = region.angular_occupancy(center, t.rule.nodes[j]); });
  return t;
}

RatioEstimate table_ratio(const OccupancyTable& table, const SpectralCoefficients& c) {
  if (!(c.base == table.center)) throw InvalidArgument("table_ratio: profile and table centres differ");
  const double denom = parseval_norm_sq(c);
  if (!(denom > 0.0)) throw InvalidArgument("table_ratio: zero function");
  const std::size_t n = table.rule.size();
  std::vector<double> f(n);
  const BandlimitedFunction u(c);
  parallel_for(n, [&](std::size_t j) { f[j] = u(polar_point(c.base, table.rule.nodes[j], 0.0)); });
  double inside = 0.0, ball = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = table.rule.weights[j] * std::sinh(table.rule.nodes[j]) * f[j] * f[j];
    inside += w * table.theta[j];
    ball += w * 2.0 * pi;
  }
  RatioEstimate e;
  e.r_cut = table.r_cut;
  e.denominator = denom;
  const double tail = std::max(0.0, denom - ball) / denom;
  e.lower = std::clamp(inside / denom, 0.0, 1.0);
  e.upper = std::clamp(e.lower + tail, 0.0, 1.0);
  e.value = std::clamp(e.lower + tail * table.theta.back() / (2.0 * pi), 0.0, 1.0);
  return e;
}

SlepianResult slepian_min_ratio(const OccupancyTable& table, double Lambda, int basis, int p, int grid_nodes) {
  if (basis < 1 || p < 1) throw InvalidArgument("Slepian basis needs basis >= 1, p >= 1");
  const SGrid grid = SGrid::for_band(Lambda, grid_nodes);
  const double S = grid.s_max();
  const std::size_t ns = grid.size(), nr = table.rule.size();

  // Even Legendre polynomials in s/S times the endpoint taper.
  Eigen::MatrixXd Bs(ns, basis);
  for (std::size_t k = 0; k < ns; ++k) {
    const double x = grid.s[k] / S;
    const double taper = std::pow(1.0 - x * x, p);
    double p0 = 1.0, p1 = x;
    for (int l = 0; l <= 2 * basis; ++l) {
      if (l % 2 == 0 && l / 2 < basis) Bs(k, l / 2) = p0 * taper;
      const double p2 = ((2.0 * l + 3.0) * x * p1 - (l + 1.0) * p0) / (l + 2.0);
      p0 = p1;
      p1 = p2;
    }
  }
  Eigen::VectorXd wr(ns);
  for (std::size_t k = 0; k < ns; ++k) wr(k) = kPlancherel * grid.w[k] * plancherel_density(grid.s[k]);

  Eigen::MatrixXd phi(nr, ns);
  parallel_for(nr, [&](std::size_t j) {
    std::vector<double> row(ns);
    spherical_function_batch(grid.s, table.rule.nodes[j], row);
    for (std::size_t k = 0; k < ns; ++k) phi(j, k) = row[k];
  });
  const Eigen::MatrixXd F = phi * (wr.asDiagonal() * Bs);  // f_m(r_j)

  Eigen::VectorXd win(nr), wall(nr);
  for (std::size_t j = 0; j < nr; ++j) {
    const double sh = table.rule.weights[j] * std::sinh(table.rule.nodes[j]);
    win(j) = sh * table.theta[j];
    wall(j) = sh * 2.0 * pi;
  }
  const Eigen::MatrixXd A = F.transpose() * win.asDiagonal() * F;
  const Eigen::MatrixXd Bin = F.transpose() * wall.asDiagonal() * F;
  const Eigen::MatrixXd B = Bs.transpose() * wr.asDiagonal() * Bs;
  const Eigen::MatrixXd U = A + (B - Bin);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B);
  const Eigen::VectorXd d = eb.eigenvalues();
  const double dmax = d.maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < d.size(); ++i)
    if (d(i) > 1e-13 * dmax) keep.push_back(i);
  Eigen::MatrixXd T(basis, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) T.col(i) = eb.eigenvectors().col(keep[i]) / std::sqrt(d(keep[i]));
  const Eigen::MatrixXd M = T.transpose() * U * T;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(0.5 * (M + M.transpose()));
  const Eigen::VectorXd c = T * em.eigenvectors().col(0);

  SlepianResult out;
  out.Lambda = Lambda;
  out.ratio = std::clamp(em.eigenvalues()(0), 0.0, 1.0);
  out.basis_size = static_cast<int>(keep.size());
  out.minimizer.base = table.center;
  out.minimizer.grid = grid;
  const Eigen::VectorXd vals = Bs * c;
  out.minimizer.values.assign(vals.data(), vals.data() + vals.size());
  return out;
}

std::string coefficients_to_json(const SpectralCoefficients& c) {
  nlohmann::json j;
  j["version"] = 1;
  j["base"] = {c.base.x(), c.base.y()};
  j["s"] = c.grid.s;
  j["w"] = c.grid.w;
  j["values"] = c.values;
  if (!c.errors.empty()) j["errors"] = c.errors;
  return j.dump();
}

SpectralCoefficients coefficients_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  }
  if (j.value("version", 0) != 1) throw ConfigError("coefficient file: unsupported version");
  try {
    SpectralCoefficients c;
    c.base = HalfPlanePoint(j.at("base").at(0).get<double>(), j.at("base").at(1).get<double>());
    c.grid.s = j.at("s").get<std::vector<double>>();
    c.grid.w = j.at("w").get<std::vector<double>>();
    c.values = j.at("values").get<std::vector<double>>();
    if (j.contains("errors")) c.errors = j["errors"].get<std::vector<double>>();
    if (c.grid.s.size() != c.grid.w.size() || c.values.size() != c.grid.s.size() || c.grid.s.empty())
      throw ConfigError("coefficient file: array sizes differ");
    for (std::size_t k = 1; k < c.grid.s.size(); ++k)
      if (!(c.grid.s[k] > c.grid.s[k - 1])) throw ConfigError("coefficient file: s-grid not increasing");
    if (!(c.grid.s[0] >= 0.0)) throw ConfigError("coefficient file: negative s");
    for (double v : c.values)
      if (!std::isfinite(v)) throw ConfigError("coefficient file: non-finite value");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  }
}

}  // namespace hyplab
