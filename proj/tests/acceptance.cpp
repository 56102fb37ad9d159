// Acceptance run: one PASS/FAIL line per criterion, indented detail lines
// before it. Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fixtures_util.hpp"
#include "hyplab/covering.hpp"
#include "hyplab/geometry.hpp"
#include "hyplab/heatkernel.hpp"
#include "hyplab/observability.hpp"
#include "hyplab/regions.hpp"
#include "hyplab/simd/kernels.hpp"
#include "hyplab/spectral.hpp"

using namespace hyplab;
using std::numbers::pi;

namespace {

template <class... Args>
void info(const char* fmt, Args... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

struct Outcome {
  bool pass = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s [%d] %s (%.1f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.note.empty() ? "" : ": ",
              o.note.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

// Least-squares line through (x, y); returns max |residual|.
double affine_fit_residual(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                           double& intercept) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  intercept = (sy - slope * sx) / n;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - slope * x[i] - intercept));
  return worst;
}

BandlimitedFunction two_bumps(const SGrid& grid) {
  SpectralCoefficients a = heat_coefficients(0.5, grid, {0.0, 1.0});
  SpectralCoefficients b = heat_coefficients(0.8, grid, {0.7, 1.6});
  return BandlimitedFunction({{a, 1.0}, {b, -0.6}});
}

}  // namespace

int main() {
  std::printf("hyplab acceptance, %s kernels\n", simd::active().name.data());
  const QuadratureSpec spec;

  criterion(1, "geometry oracles", [&](Outcome& o) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ux(-10, 10), ul(-4, 4), ur(0.01, 6), ut(-pi, pi);
    double worst_boundary = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const HalfPlanePoint c(ux(rng), std::exp(ul(rng)));
      const double r = ur(rng), phi = ut(rng);
      // A point of the Euclidean image circle, centre (x, y cosh r), radius y sinh r.
      const EuclideanDisc e = euclidean_image(GeodesicBall(c, r));
      const double py = e.cy + e.radius * std::sin(phi);
      if (!(py > 0.0)) continue;
      const HalfPlanePoint p(e.cx + e.radius * std::cos(phi), py);
      worst_boundary = std::max(worst_boundary, std::abs(geodesic_distance(c, p) - r));
    }
    info("max |d - r| over 1000 boundary points: %.3e", worst_boundary);
    o.require(worst_boundary < 1e-10, "boundary distance");

    double worst_triangle = -INFINITY, worst_iso = 0.0;
    std::uniform_real_distribution<double> us(-2, 2), ub(-50, 50);
    for (int i = 0; i < 10000; ++i) {
      const HalfPlanePoint a(ux(rng), std::exp(ul(rng))), b(ux(rng), std::exp(ul(rng))), c(ux(rng), std::exp(ul(rng)));
      const double dab = geodesic_distance(a, b), dbc = geodesic_distance(b, c), dac = geodesic_distance(a, c);
      worst_triangle = std::max(worst_triangle, (dac - dab - dbc) / std::max(1.0, dac));
      const Isometry g{std::exp(us(rng)), ub(rng)};
      worst_iso = std::max(worst_iso, std::abs(geodesic_distance(g.apply(a), g.apply(b)) - dab) / std::max(1.0, dab));
    }
    info("triangle: max (d(a,c) - d(a,b) - d(b,c)) / max(1, d) = %.3e over 10^4 triples", worst_triangle);
    info("isometry: max relative distance change = %.3e over 10^4 pairs", worst_iso);
    o.require(worst_triangle <= 1e-12, "triangle inequality");
    o.require(worst_iso <= 1e-12, "isometry invariance");
  });

  criterion(2, "covering", [&](Outcome& o) {
    for (double Rp : {0.5, 1.0, 2.0}) {
      std::mt19937_64 rng(202);
      std::uniform_real_distribution<double> ux(-1000, 1000), ul(std::log(1e-4), std::log(1e4));
      std::size_t worst = 0, empty = 0;
      for (int i = 0; i < 10000; ++i) {
        const HalfPlanePoint z(ux(rng), std::exp(ul(rng)));
        const auto rs = locate(z, Rp);
        empty += rs.empty();
        worst = std::max(worst, rs.size());
        for (const auto& r : rs) o.require(rect_contains(r, z), "locate returned a rectangle missing z");
      }
      info("R' = %.1f: uncovered %zu of 10^4, max multiplicity %zu, N = %d", Rp, empty, worst, multiplicity_bound(Rp));
      o.require(empty == 0, "uncovered sample");
      o.require(worst <= static_cast<std::size_t>(multiplicity_bound(Rp)), "multiplicity above N");
    }
    int proved = 0, total = 0;
    for (double Rp : {1.0, 2.0})
      for (int j = -3; j <= 3; ++j)
        for (long k = -3; k <= 3; ++k) {
          ++total;
          proved += inscribed_ball_contained({j, k, Rp}) == Containment::Proved;
        }
    info("inscribed-ball containment proved for %d of %d rectangles (|j|, |k| <= 3, R' in {1, 2})", proved, total);
    o.require(proved == total, "containment not proved");
  });

  criterion(3, "heat kernel mass", [&](Outcome& o) {
    for (double t : {0.5, 1.0, 2.0}) {
      const auto t0 = std::chrono::steady_clock::now();
      const QuadResult m = kernel_mass(t, spec);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      info("t = %.1f: mass - 1 = %.3e (quadrature error %.1e, %.3f s)", t, m.value - 1.0, m.error, secs);
      o.require(std::abs(m.value - 1.0) <= 1e-6, "mass off at t = " + std::to_string(t));
      o.require(secs < 10.0, "mass too slow");
    }
  });

  criterion(4, "semigroup identity", [&](Outcome& o) {
    const HalfPlanePoint pairs[][2] = {{{0.0, 1.0}, {0.0, 1.0}}, {{0.0, 1.0}, {0.8, 1.7}}, {{-2.0, 5.0}, {1.0, 0.5}}};
    double worst = 0.0;
    for (auto [t, s] : {std::pair{2.0, 1.0}, {1.0, 0.5}, {3.0, 1.0}})
      for (const auto& p : pairs) {
        const SemigroupReport r = semigroup_check(t, s, p[0], p[1], spec);
        worst = std::max(worst, r.relative);
        info("t = %.1f, s = %.1f, d = %.3f: relative residual %.3e", t, s, geodesic_distance(p[0], p[1]), r.relative);
      }
    o.require(worst < 1e-4, "semigroup residual");
  });

  criterion(5, "diagonal and Gaussian bounds", [&](Outcome& o) {
    double lo = INFINITY, hi = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double t = 0.1 * std::pow(100.0, i / 29.0);
      const double q = diagonal_ratio(t, spec);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    info("H(t,0) f(t) / sqrt t over 30 log-spaced t in [0.1, 10]: min %.6f, max (bound) %.6f", lo, hi);
    o.require(std::isfinite(hi) && lo > 0.0, "diagonal ratio");

    double c = INFINITY;
    for (int i = 0; i <= 60; ++i) c = std::min(c, gaussian_lower_ratio(0.1 * i, spec));
    info("min over d in [0, 6] of H(2,d) e^{d^2/2}: c = %.6e", c);
    o.require(c > 0.0, "lower ratio");

    const std::vector<double> tg{0.5, 1.0, 2.0, 4.0}, dg{0, 1, 2, 3, 4, 5, 6};
    const GaussianFit fit = gaussian_upper_fit(tg, dg, spec);
    const double validation = gaussian_fit_violation(fit, refine_grid(tg), refine_grid(dg), spec);
    info("upper fit K = %.6e, gamma = %.6f, alpha = %.6f; violation %.3e on fit grid, %.3e on 2x grid", fit.K,
         fit.gamma, fit.alpha, fit.max_violation, validation);
    o.require(fit.max_violation <= 0.0, "fit violated on its grid");
    o.require(validation <= 1e-8, "fit violated on validation grid");
  });

  criterion(6, "spectral vs McKean kernel", [&](Outcome& o) {
    const SGrid grid = SGrid::uniform(12.0, 512);
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      const SpectralCoefficients c = heat_coefficients(t, grid);
      for (double d : {0.0, 1.0, 2.0, 3.0}) {
        const double a = inverse_spherical_transform(c, d), b = heat_kernel(KernelQuery(t, d), spec);
        worst = std::max(worst, std::abs(a / b - 1.0));
      }
    }
    info("max relative gap over {0.5,1,2} x {0,1,2,3}: %.3e (c_P = %.17g)", worst, kPlancherel);
    o.require(worst < 1e-4, "kernel routes disagree");
    const double cal = calibrate_plancherel(spec);
    info("calibrated c_P = %.17g", cal);
    o.require(std::abs(cal / kPlancherel - 1.0) < 1e-8, "calibration drift");
  });

  criterion(7, "spectral projector", [&](Outcome& o) {
    const BandlimitedFunction u = two_bumps(SGrid::uniform(6.0, 256));
    for (double L : {1.0, 2.0, 3.0}) {
      const BandlimitedFunction p = project(u, L), pp = project(p, L);
      for (std::size_t a = 0; a < 2; ++a)
        o.require(pp.components()[a].coeffs.values == p.components()[a].coeffs.values, "not idempotent");
      o.require(p.norm_sq() <= u.norm_sq() * (1.0 + 1e-12), "not contractive");
      info("Lambda = %.0f: ||Pi u||^2 / ||u||^2 = %.6f, idempotent coefficientwise", L, p.norm_sq() / u.norm_sq());
    }
    // Parseval against direct quadrature for a radial state.
    const SpectralCoefficients c = project(heat_coefficients(0.5, SGrid::uniform(12.0, 512)), 2.0);
    const double parseval = parseval_norm_sq(c);
    const double direct =
        radial_integral([&](double r) { const double f = inverse_spherical_transform(c, r); return f * f; },
                        [](double r) { return 10.0 * std::exp(-0.5 * r); }, QuadratureSpec{1e-8, 1e-14, 4000, 1e-10, 0})
            .value;
    info("radial Pi_2 H(0.5): Parseval %.8e, direct %.8e, gap %.2e", parseval, direct, std::abs(direct / parseval - 1));
    o.require(std::abs(direct / parseval - 1.0) < 1e-3, "Parseval gap");

    const BandlimitedFunction v = project(u, 3.0);
    const double nv = v.norm_sq();
    double worst = 0.0;
    for (int m = 0; m <= 4; ++m)
      for (int p = 0; m + p <= 4; ++p)
        for (double t : {0.3, 0.7, 1.5}) {
          const Multiplier phi = lift_multiplier(m, p, t);
          const double lhs = functional_calculus_apply(v, phi).norm_sq();
          const double sup = multiplier_sup(phi, v.lambda_eff());
          worst = std::max(worst, lhs / (sup * sup * nv) - 1.0);
        }
    info("multiplier family lambda^m sinh^(p)(lambda t), m + p <= 4: max (lhs / bound - 1) = %.3e", worst);
    o.require(worst <= 1e-3, "multiplier bound");
  });

  criterion(8, "harmonic lift", [&](Outcome& o) {
    const BandlimitedFunction u = two_bumps(SGrid::uniform(4.0, 256));
    const LiftResidual r = harmonic_lift_residual(u, 2.0, -0.5, 0.5, -0.5, 1.0, 0.6, 2.0, 20, 1e-2);
    info("%d points: max residual %.3e, ||v||_inf %.3e, ratio %.3e", r.points, r.max_residual, r.max_abs,
         r.max_residual / r.max_abs);
    info("d_t v(0) vs Pi u: max error %.3e against max |Pi u| %.3e", r.max_initial_error, r.max_initial);
    o.require(r.points == 8000, "grid size");
    o.require(r.max_residual < 1e-4 * r.max_abs, "PDE residual");
    o.require(r.max_initial_error < 1e-6 * r.max_initial, "initial velocity");
  });

  criterion(9, "thick-vs-thin concentration", [&](Outcome& o) {
    const Region wide = load_region(fixture_path("regions/wide_holes.region"));
    const HalfPlanePoint centre{1.5, 1.0};
    const std::vector<double> bp{1.0};
    const OccupancyTable table = occupancy_table(wide, centre, 6.0, bp, 0.1);
    std::vector<double> Ls{1.0, 2.0, 4.0, 8.0}, neglog;
    for (double L : Ls) {
      const SlepianResult s = slepian_min_ratio(table, L, 16, 6, 512);
      neglog.push_back(-std::log(s.ratio));
      info("Lambda = %.0f: minimal omega-fraction %.6e (-log = %.4f)", L, s.ratio, neglog.back());
    }
    double slope = 0.0, intercept = 0.0;
    const double resid = affine_fit_residual(Ls, neglog, slope, intercept);
    const double range = *std::max_element(neglog.begin(), neglog.end()) - *std::min_element(neglog.begin(), neglog.end());
    info("affine fit -log ratio = %.4f Lambda + %.4f: max residual %.4f = %.1f%% of range %.4f", slope, intercept, resid,
         100.0 * resid / range, range);
    o.require(resid < 0.1 * range, "-log ratio not affine within 10%");

    // Shrinking family: replicated geodesic balls about the same centres,
    // fixed state Pi_4 H(0.5, ., centre).
    const SpectralCoefficients u = project(heat_coefficients(0.5, SGrid::uniform(8.0, 512), centre), 4.0);
    double prev = 1.0;
    std::vector<double> ratios;
    for (double rho : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
      const Region balls({GeodesicBallShape{1.5, 1.0, rho}}, Replication{3.0, 8.0});
      const std::vector<double> b{rho};
      const OccupancyTable t = occupancy_table(balls, centre, 6.0, b, 0.1);
      const RatioEstimate e = table_ratio(t, u);
      info("ball radius %.4f: ratio in [%.6e, %.6e]", rho, e.lower, e.upper);
      o.require(e.upper < prev, "shrinking family not monotone");
      prev = e.upper;
      ratios.push_back(e.upper);
    }
    o.require(ratios.back() < 1e-2 * ratios.front(), "shrinking family does not tend to 0");
  });

  criterion(10, "observability calculator", [&](Outcome& o) {
    const TelescopingConstants c = telescoping_constants(0.8, 1.0);
    const double logc = observability_log_constant({1.0, 1.0, 1.0, 0.8});
    info("lambda = 0.8, C~ = 1: mu = %.10f, C' = %.10f, log C_obs(T=1) = %.12f", c.mu, c.C_prime, logc);
    o.require(std::abs(c.mu - 1.0 / 0.4375) < 1e-12, "mu");
    o.require(std::abs(c.C_prime - 6.3) < 1e-12, "C'");
    o.require(std::abs(logc - 42.0) < 1e-10, "C_obs");

    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> lu(std::log(0.1), std::log(10.0)), le(-20.0, -1e-6);
    double root = 0.0, bound_gap = -INFINITY;
    for (int i = 0; i < 10000; ++i) {
      const double K = std::exp(lu(rng)), T = std::exp(lu(rng)), eta = std::exp(le(rng));
      const double L = hoelder_lambda(K, T, eta);
      // Substitute back in extended precision so the check measures the root,
      // not the cancellation in K L - T L^2.
      const long double Ll = L;
      const long double expo = static_cast<long double>(K) * Ll - static_cast<long double>(T) * Ll * Ll;
      root = std::max(root, static_cast<double>(std::fabs(std::exp(expo - std::log(static_cast<long double>(eta))) - 1.0L)));
      bound_gap = std::max(bound_gap, L / hoelder_lambda_bound(K, T, eta) - 1.0);
    }
    info("Lambda(eta): max |e^{K L - T L^2} / eta - 1| = %.3e; max (L / bound - 1) = %.3e", root, bound_gap);
    o.require(root <= 1e-12, "root property");
    o.require(bound_gap <= 1e-15, "Lambda bound");

    double ident = 0.0, expo = 0.0;
    bool ineq = true;
    for (double lam : {0.71, 0.75, 0.8, 0.9, 0.99})
      for (double T : {0.1, 1.0, 10.0}) {
        const ObservabilityAudit a = observability_audit({1.0, 1.0, T, lam});
        ident = std::max(ident, a.max_identity_residual);
        expo = std::max(expo, a.max_exponent_residual);
        ineq = ineq && a.all_inequalities;
      }
    info("telescoping identities: max residual %.3e (units of T), exponent identity %.3e relative", ident, expo);
    o.require(ident <= 1e-12 && expo <= 1e-12, "telescoping identities");
    o.require(ineq, "telescoping inequalities");

    double prev = INFINITY;
    bool mono = true;
    for (double T : {0.1, 0.5, 1.0, 2.0, 5.0, 50.0}) {
      const double v = observability_log_constant({1.0, 1.0, T, 0.8});
      mono = mono && v < prev;
      prev = v;
    }
    info("log C_obs strictly decreasing in T over {0.1, ..., 50}: %s", mono ? "yes" : "no");
    o.require(mono, "monotonicity in T");
  });

  criterion(11, "necessary-condition extraction", [&](Outcome& o) {
    const GaussianConstants g = fit_gaussian_constants(spec);
    info("alpha = %.6f, beta = %.2f, K = %.6e, gamma = %.6f, C_low = %.6e (violation %.2e / %.2e)", g.alpha, g.beta,
         g.K, g.gamma, g.C_low, g.fit_violation, g.validation_violation);
    o.require(g.fit_violation <= 0.0 && g.validation_violation <= 1e-8, "Gaussian fit");
    const Region wide = load_region(fixture_path("regions/wide_holes.region"));
    const double C_obs = observability_constant({1.0, 1.0, 1.0, 0.8});
    const ThicknessExtraction x = necessary_condition_experiment(wide, C_obs, g);
    for (const CenterExtraction& c : x.centers) {
      info("z0 = (%g, %g): C'' = %.6e, L = %.2f, delta = %.6e; obs %s, mass(B(z0, %.0f)) = %.2f %s", c.z0.x(),
           c.z0.y(), c.C_doubleprime, c.L, c.delta, c.obs_holds ? "holds" : "FAILS", c.mass_radius, c.ball_mass,
           c.mass_holds ? ">= delta" : "< delta");
      o.require(std::isfinite(c.L) && c.delta > 0.0, "degenerate extraction");
      o.require(c.obs_holds && c.mass_holds, "verification");
    }
    info("spread across z0: C'' %.3e, L %.3e", x.C_doubleprime_spread, x.L_spread);
    o.require(x.C_doubleprime_spread <= 0.01 && x.L_spread <= 0.01, "z0 dependence");
  });

  std::printf("%s: %d of 11 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
