#include "hyplab/heatkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hyplab/errors.hpp"
#include "hyplab/parallel.hpp"
#include "hyplab/simd/kernels.hpp"

namespace hyplab {

using std::numbers::pi;

KernelQuery::KernelQuery(double t_, double d_) : t(t_), d(d_) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("heat kernel needs t > 0");
  if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidArgument("heat kernel needs d >= 0");
}

QuadResult heat_kernel_result(const KernelQuery& q, const QuadratureSpec& spec) {
  spec.validate();
  const double t = q.t;
  const double d = q.d;
  const auto& kernels = simd::active();
  const BatchIntegrand g = [&](std::span<const double> u, std::span<double> out) { kernels.mckean(t, d, u, out); };

  double s_max = std::max(d + 1.0, 2.0 * std::sqrt(t * std::log(1.0 / spec.tail_tol)));
  double u_hi = std::sqrt(s_max - d);
  QuadResult acc = integrate(g, 0.0, u_hi, spec);
  for (int doubling = 0; doubling < 16; ++doubling) {
    s_max *= 2.0;
    const double u_next = std::sqrt(s_max - d);
    const QuadResult inc = integrate(g, u_hi, u_next, spec);
    acc += inc;
    u_hi = u_next;
    if (std::abs(inc.value) <= spec.tail_tol * std::abs(acc.value)) break;
  }
  const double pref = std::numbers::sqrt2 / std::pow(4.0 * pi * t, 1.5) * std::exp(-0.25 * t - d * d / (4.0 * t));
  acc.value *= pref;
  acc.error *= pref;
  return acc;
}

double heat_kernel(const KernelQuery& q, const QuadratureSpec& spec) {
  return heat_kernel_result(q, spec).checked("heat kernel");
}

double heat_kernel(double t, const HalfPlanePoint& z1, const HalfPlanePoint& z2, const QuadratureSpec& spec) {
  return heat_kernel(KernelQuery(t, geodesic_distance(z1, z2)), spec);
}

double kernel_weight_f(double t) { return std::exp(0.25 * t) * std::pow(t, 1.5); }

double kernel_support_radius(double t, double tol) {
  // sinh(r) e^{-r^2/4t} <= e^{t} e^{-(r - 2t)^2/4t}.
  return 2.0 * t + 2.0 * std::sqrt(t * (std::log(1.0 / tol) + t)) + 2.0;
}

namespace {

std::vector<double> unit_breaks(double hi) {
  std::vector<double> b{0.0};
  for (double r = 1.0; r < hi; r += 1.0) b.push_back(r);
  b.push_back(hi);
  return b;
}

}  // namespace

QuadResult kernel_mass(double t, const QuadratureSpec& spec) {
  const double R = kernel_support_radius(t, spec.tail_tol);
  const auto breaks = unit_breaks(R);
  bool ok = true;
  QuadResult out = integrate(
      [&](std::span<const double> r, std::span<double> v) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          const QuadResult h = heat_kernel_result(KernelQuery(t, r[i]), spec);
          ok = ok && h.converged;
          v[i] = 2.0 * pi * std::sinh(r[i]) * h.value;
        }
      },
      breaks, spec);
  out.converged = out.converged && ok;
  out.error += spec.tail_tol;
  return out;
}

double HeatKernelCache::operator()(double t, double d) {
  const std::pair key{t, d};
  {
    std::shared_lock lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
  }
  const double v = heat_kernel(KernelQuery(t, d), spec_);
  std::unique_lock lock(mutex_);
  values_.emplace(key, v);  // no-op if another thread got there first
  return v;
}

std::size_t HeatKernelCache::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

KernelProfile::KernelProfile(double t, double r_max, int intervals, const QuadratureSpec& spec)
    : t_(t), r_max_(r_max), h_(r_max / intervals), values_(static_cast<std::size_t>(intervals) + 3) {
  if (intervals < 4 || !(r_max > 0.0)) throw InvalidArgument("kernel profile needs r_max > 0 and >= 4 intervals");
  // One guard node on each side; H is even in r.
  parallel_for(values_.size(), [&](std::size_t i) {
    const double r = std::abs((static_cast<double>(i) - 1.0) * h_);
    values_[i] = std::log(heat_kernel(KernelQuery(t, r), spec));
  });
}

double KernelProfile::operator()(double r) const {
  if (r > r_max_) return 0.0;
  const double x = r / h_ + 1.0;
  const std::size_t i = std::min(static_cast<std::size_t>(x), values_.size() - 3);
  const std::size_t i0 = std::max<std::size_t>(i, 1) - 1;
  const double s = x - static_cast<double>(i0);  // in [0, 3]
  const double* v = &values_[i0];
  // Cubic Lagrange on nodes 0..3.
  const double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
  const double l1 = s * (s - 2) * (s - 3) / 2.0;
  const double l2 = -s * (s - 1) * (s - 3) / 2.0;
  const double l3 = s * (s - 1) * (s - 2) / 6.0;
  return std::exp(l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3]);
}

namespace {

// \int H(a, z1, z) H(b, z, z2) dvol(z) in polar coordinates about z1.
QuadResult convolve(double a, double b, const HalfPlanePoint& z1, const HalfPlanePoint& z2,
                    const QuadratureSpec& spec) {
  const double d12 = geodesic_distance(z1, z2);
  const double ra = kernel_support_radius(a, spec.tail_tol);
  const KernelProfile ha(a, ra, std::max(64, static_cast<int>(ra * 200)), spec);
  const KernelProfile hb(b, ra + d12 + 1.0, std::max(64, static_cast<int>((ra + d12 + 1.0) * 200)), spec);
  const double hb0 = hb(0.0);
  const PointFunction f = [&](const HalfPlanePoint& z) {
    return ha(geodesic_distance(z1, z)) * hb(geodesic_distance(z, z2));
  };
  const RadialEnvelope env = [&](double r) { return ha(r) * hb0; };
  return riemannian_integral_polar(f, z1, env, spec);
}

}  // namespace

SemigroupReport semigroup_check(double t, double s, const HalfPlanePoint& z1, const HalfPlanePoint& z2,
                                const QuadratureSpec& spec) {
  if (!(s > 0.0) || !(s < t)) throw InvalidArgument("semigroup check needs 0 < s < t");
  SemigroupReport rep{};
  rep.direct = heat_kernel(t, z1, z2, spec);
  const QuadResult c = convolve(s, t - s, z1, z2, spec);
  rep.convolved = c.checked("semigroup convolution");
  rep.quad_error = c.error;
  rep.residual = std::abs(rep.direct - rep.convolved);
  rep.relative = rep.residual / rep.direct;
  return rep;
}

double semigroup_residual(double t, double s, const HalfPlanePoint& z1, const HalfPlanePoint& z2,
                          const QuadratureSpec& spec) {
  return semigroup_check(t, s, z1, z2, spec).residual;
}

double diagonal_ratio(double t, const QuadratureSpec& spec) {
  return heat_kernel(KernelQuery(t, 0.0), spec) * kernel_weight_f(t) / std::sqrt(t);
}

double gaussian_lower_ratio(double d, const QuadratureSpec& spec) {
  return heat_kernel(KernelQuery(2.0, d), spec) * std::exp(0.5 * d * d);
}

double GaussianFit::bound(double t, double d) const {
  const double gt = gamma * t;
  return K * std::exp(-alpha * d * d / t - 0.25 * gt) / gt;
}

namespace {

std::vector<double> kernel_matrix(std::span<const double> t_grid, std::span<const double> d_grid,
                                  const QuadratureSpec& spec) {
  std::vector<double> h(t_grid.size() * d_grid.size());
  parallel_for(h.size(), [&](std::size_t idx) {
    const std::size_t i = idx / d_grid.size();
    const std::size_t j = idx % d_grid.size();
    h[idx] = heat_kernel(KernelQuery(t_grid[i], d_grid[j]), spec);
  });
  return h;
}

}  // namespace

GaussianFit gaussian_upper_fit(std::span<const double> t_grid, std::span<const double> d_grid,
                               const QuadratureSpec& spec, const GaussianSearch& search) {
  if (t_grid.empty() || d_grid.empty()) throw InvalidArgument("Gaussian fit needs non-empty grids");
  if (search.gamma_steps < 1 || search.alpha_steps < 1) throw InvalidArgument("empty Gaussian search grid");
  const std::vector<double> h = kernel_matrix(t_grid, d_grid, spec);
  const std::size_t nd = d_grid.size();

  GaussianFit best;
  best.K = std::numeric_limits<double>::infinity();
  const double lg0 = std::log(search.gamma_min);
  const double lg1 = std::log(search.gamma_max);
  for (int gi = 0; gi < search.gamma_steps; ++gi) {
    const double gamma =
        search.gamma_steps == 1 ? search.gamma_min : std::exp(lg0 + (lg1 - lg0) * gi / (search.gamma_steps - 1));
    for (int ai = 1; ai <= search.alpha_steps; ++ai) {
      const double alpha = 0.5 * ai / search.alpha_steps;
      // Log domain keeps e^{alpha d^2/t} from overflowing.
      double logK = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        for (std::size_t j = 0; j < nd; ++j) {
          const double d = d_grid[j];
          logK = std::max(logK, std::log(h[i * nd + j]) + 0.25 * gamma * t + std::log(gamma * t) + alpha * d * d / t);
        }
      }
      const double K = std::exp(logK);
      const bool tie = std::abs(K - best.K) <= 1e-12 * best.K;
      if ((K < best.K && !tie) || (tie && alpha > best.alpha)) {
        best.K = K;
        best.gamma = gamma;
        best.alpha = alpha;
      }
    }
  }
  if (!std::isfinite(best.K)) throw InvalidArgument("Gaussian upper fit infeasible on the search grid");
  // Absorb the rounding of the exp/log round trip so the grid maximum is
  // not reported as a violation.
  best.K *= 1.0 + 1e-13;
  best.t_grid.assign(t_grid.begin(), t_grid.end());
  best.d_grid.assign(d_grid.begin(), d_grid.end());
  best.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    for (std::size_t j = 0; j < nd; ++j)
      best.max_violation = std::max(best.max_violation, h[i * nd + j] / best.bound(t_grid[i], d_grid[j]) - 1.0);
  return best;
}

double gaussian_fit_violation(const GaussianFit& fit, std::span<const double> t_grid,
                              std::span<const double> d_grid, const QuadratureSpec& spec) {
  const std::vector<double> h = kernel_matrix(t_grid, d_grid, spec);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    for (std::size_t j = 0; j < d_grid.size(); ++j)
      worst = std::max(worst, h[i * d_grid.size() + j] / fit.bound(t_grid[i], d_grid[j]) - 1.0);
  return worst;
}

std::vector<double> refine_grid(std::span<const double> g) {
  std::vector<double> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (g[i - 1] + g[i]));
    out.push_back(g[i]);
  }
  return out;
}

double evolve_from_kernel(const HalfPlanePoint& z0, double offset, double t, const HalfPlanePoint& z,
                          const QuadratureSpec& spec) {
  if (!(offset > 0.0)) throw InvalidArgument("evolution offset must be > 0");
  if (!(t >= 0.0)) throw InvalidArgument("evolution time must be >= 0");
  return heat_kernel(t + offset, z, z0, spec);
}

QuadResult evolve_by_convolution(const HalfPlanePoint& z0, double offset, double t, const HalfPlanePoint& z,
                                 const QuadratureSpec& spec) {
  if (!(offset > 0.0) || !(t > 0.0)) throw InvalidArgument("convolution needs offset > 0 and t > 0");
  return convolve(offset, t, z0, z, spec);
}

}  // namespace hyplab
