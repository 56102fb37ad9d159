#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures_util.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/heatkernel.hpp"
#include "hyplab/observability.hpp"
#include "hyplab/regions.hpp"

using namespace hyplab;
using std::numbers::pi;

namespace {

// \int_{H^2} e^{-a d^2} dvol = pi^{3/2} a^{-1/2} e^{1/(4a)} erf(1/(2 sqrt a)).
double gaussian_volume(double a) {
  return std::pow(pi, 1.5) / std::sqrt(a) * std::exp(0.25 / a) * std::erf(0.5 / std::sqrt(a));
}

const GaussianConstants& constants() {
  static const GaussianConstants g = fit_gaussian_constants(QuadratureSpec{});
  return g;
}

}  // namespace

TEST_CASE("telescoping constants") {
  const TelescopingConstants c = telescoping_constants(0.8, 1.0);
  CHECK(c.mu == doctest::Approx(1.0 / 0.4375).epsilon(1e-14));
  CHECK(c.C_prime == doctest::Approx(6.3).epsilon(1e-14));
  CHECK(telescoping_constants(0.71, 1.0).mu == doctest::Approx(61.47).epsilon(1e-3));
  CHECK(telescoping_constants(1.0 - 1e-9, 1.0).mu == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(telescoping_constants(0.7, 1.0), InvalidArgument);
  CHECK_THROWS_AS(telescoping_constants(1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(telescoping_constants(0.8, 0.0), InvalidArgument);
}

TEST_CASE("observability constant") {
  ObservabilityInputs in{1.0, 1.0, 1.0, 0.8};
  CHECK(observability_log_constant(in) == doctest::Approx(42.0).epsilon(1e-14));
  CHECK(observability_constant(in) == doctest::Approx(std::exp(42.0)).epsilon(1e-12));

  SUBCASE("monotone in T and C_tilde") {
    double prev = INFINITY;
    for (double T : {0.25, 0.5, 1.0, 2.0, 4.0, 100.0}) {
      in.T = T;
      const double v = observability_log_constant(in);
      CHECK(v < prev);
      prev = v;
    }
    in.T = 1e12;
    CHECK(observability_log_constant(in) == doctest::Approx(2.0).epsilon(1e-9));
    in.T = 1.0;
    prev = -INFINITY;
    for (double C : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      in.C_tilde = C;
      const double v = observability_log_constant(in);
      CHECK(v > prev);
      prev = v;
    }
  }
  SUBCASE("lambda search") {
    const LambdaSearchResult best = optimize_lambda(in);
    CHECK(best.lambda > 1.0 / std::sqrt(2.0));
    CHECK(best.lambda < 1.0);
    CHECK(best.log_C_obs <= observability_log_constant(in));
    for (double lam : {0.72, 0.75, 0.8, 0.9, 0.98}) {
      in.lambda = lam;
      CHECK(best.log_C_obs <= observability_log_constant(in) + 1e-12);
    }
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(observability_log_constant({0.0, 1.0, 1.0, 0.8}), InvalidArgument);
    CHECK_THROWS_AS(observability_log_constant({1.0, -1.0, 1.0, 0.8}), InvalidArgument);
    CHECK_THROWS_AS(observability_log_constant({1.0, 1.0, 0.0, 0.8}), InvalidArgument);
    CHECK_THROWS_AS(observability_log_constant({1.0, 1.0, 1.0, 0.5}), InvalidArgument);
  }
}

TEST_CASE("Hoelder frequency") {
  CHECK(hoelder_lambda(1.0, 1.0, std::exp(-1.0)) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(hoelder_lambda(3.0, 2.0, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(hoelder_lambda(1.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(hoelder_lambda(1.0, 1.0, -0.5), InvalidArgument);
  CHECK_THROWS_AS(hoelder_lambda(1.0, 1.0, 1.5), InvalidArgument);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(-3.0, 3.0), etau(-30.0, 0.0);
  for (int i = 0; i < 2000; ++i) {
    const double K = std::exp(logu(rng)), T = std::exp(logu(rng)), eta = std::exp(etau(rng));
    const double L = hoelder_lambda(K, T, eta);
    CAPTURE(K);
    CAPTURE(T);
    CAPTURE(eta);
    CHECK(L > 0.0);
    // Root property in log form, relative to the size of the terms.
    const double scale = std::max({1.0, K * L, T * L * L});
    CHECK(std::abs(K * L - T * L * L - std::log(eta)) <= 1e-12 * scale);
    CHECK(L <= hoelder_lambda_bound(K, T, eta) * (1.0 + 1e-15));
  }
}

TEST_CASE("implied Hoelder constant") {
  for (double K : {0.1, 1.0, 3.0})
    for (double T : {0.5, 1.0, 4.0}) {
      const double C = implied_hoelder_constant(K, T);
      const double target = 6.0 * K * (1.0 + std::exp(1.5 * K * K / T));
      if (target > 1.0) CHECK(std::exp(C * (1.0 + 1.0 / T)) == doctest::Approx(target).epsilon(1e-12));
    }
}

TEST_CASE("telescoping audit") {
  for (double lam : {0.71, 0.8, 0.95})
    for (double T : {0.5, 1.0, 3.0}) {
      const ObservabilityInputs in{1.0, 1.0, T, lam};
      const ObservabilityAudit a = observability_audit(in);
      CAPTURE(lam);
      CAPTURE(T);
      REQUIRE(!a.steps.empty());
      CHECK(a.max_identity_residual <= 1e-12);
      CHECK(a.max_exponent_residual <= 1e-12);
      CHECK(a.all_inequalities);
      const TelescopingStep& s1 = a.steps.front();
      CHECK(s1.l_m == T);
      CHECK(s1.l_m - s1.l_m2 == doctest::Approx(T * (1.0 - lam * lam)).epsilon(1e-14));
      // The weights telescope to the m = 1 term; later ones underflow.
      CHECK(a.telescoped == doctest::Approx(s1.weight).epsilon(1e-12));
      for (std::size_t i = 1; i < a.steps.size(); ++i) CHECK(a.steps[i].log_weight < a.steps[i - 1].log_weight);
      CHECK(-s1.log_weight + 2.0 * in.C_tilde == doctest::Approx(a.log_C_obs).epsilon(1e-13));
      for (const TelescopingStep& s : a.steps) {
        CHECK(s.epsilon <= 1.0);
        CHECK(s.epsilon * s.epsilon * std::exp(-a.constants.C_prime / (s.l_m - s.l_m2)) ==
              doctest::Approx(std::exp(-(2.0 * a.constants.mu - 1.0) * a.constants.C_prime / (s.l_m - s.l_m2))));
      }
    }
}

TEST_CASE("Hoelder inequality on kernel-launched states") {
  const SGrid grid = SGrid::uniform(8.0, 512);
  const HalfPlanePoint z0{0.25, 1.5};
  const SpectralCoefficients u0 = heat_coefficients(0.5, grid, z0);
  QuadratureSpec spec;

  SUBCASE("whole plane needs no constant") {
    const OccupancyTable table = occupancy_table(Region::whole_plane(), z0, 8.0);
    const HoelderReport r = hoelder_check(u0, table, 1.0, 0.0);
    // ||H(t)||^2 = H(2t, 0) by the semigroup property.
    CHECK(r.lhs == doctest::Approx(heat_kernel(KernelQuery(3.0, 0.0), spec)).epsilon(1e-6));
    CHECK(r.initial_norm_sq == doctest::Approx(heat_kernel(KernelQuery(1.0, 0.0), spec)).epsilon(1e-6));
    CHECK(r.omega_norm_sq == doctest::Approx(r.lhs).epsilon(1e-6));
    CHECK(r.holds);
  }

  const Region strips = load_region(fixture_path("regions/strips.region"));
  const OccupancyTable table = occupancy_table(strips, z0, 6.0);

  SUBCASE("omega norm matches the McKean route") {
    const HoelderReport r = hoelder_check(u0, table, 1.0, 1.0);
    const KernelProfile h(1.5, 6.0, 600, spec);
    double want = 0.0;
    for (std::size_t j = 0; j < table.rule.size(); ++j) {
      const double r0 = table.rule.nodes[j];
      want += table.rule.weights[j] * table.theta[j] * h(r0) * h(r0) * std::sinh(r0);
    }
    CHECK(r.omega_norm_sq == doctest::Approx(want).epsilon(1e-5));
  }

  SUBCASE("thick set validates a swept candidate") {
    double candidate = 0.0;
    for (double T : {0.1, 0.25, 0.5}) candidate = std::max(candidate, hoelder_check(u0, table, T, 0.0).required_C_tilde);
    CHECK(candidate > 0.0);
    for (double T : {0.1, 0.25, 0.5}) CHECK(hoelder_check(u0, table, T, candidate * 1.01).holds);
    for (double t1 : {0.0, 0.5})
      for (double eps : {0.1, 1.0})
        CHECK(translated_check(u0, table, t1, t1 + 1.0, eps, candidate * 1.01).holds);
  }

  SUBCASE("tiny distant set fails a small candidate") {
    const Region speck({EuclideanDisc{30.0, 1.0, 0.05}});
    const OccupancyTable far = occupancy_table(speck, z0, 6.0);
    const HoelderReport r = hoelder_check(u0, far, 1.0, 1.0);
    CHECK_FALSE(r.holds);
    CHECK(r.required_C_tilde > 1.0);
  }

  CHECK_THROWS_AS(hoelder_check(heat_coefficients(0.5, SGrid::uniform(8.0, 17), z0), table, 0.0, 1.0),
                  InvalidArgument);
  SpectralCoefficients zero = u0;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  CHECK_THROWS_AS(hoelder_check(zero, table, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("Gaussian constants") {
  const GaussianConstants& g = constants();
  CHECK(g.fit_violation <= 0.0);
  CHECK(g.validation_violation <= 1e-8);
  CHECK(g.alpha > 0.0);
  CHECK(g.alpha <= 0.5);
  CHECK(g.C_low > 0.0);
  CHECK(g.beta == 0.5);
  CHECK(g.C_low <= heat_kernel(KernelQuery(2.0, 0.0), QuadratureSpec{}));
}

TEST_CASE("necessary-condition extraction") {
  const GaussianConstants& g = constants();
  const Region region = load_region(fixture_path("regions/wide_holes.region"));
  const double C_obs = observability_constant({1.0, 1.0, 1.0, 0.8});
  const ThicknessExtraction x = necessary_condition_experiment(region, C_obs, g);

  REQUIRE(x.centers.size() == 3);
  CHECK(x.C_doubleprime_spread <= 1e-6);
  CHECK(x.L_spread == 0.0);
  CHECK(std::isfinite(x.L));
  CHECK(x.delta == doctest::Approx(x.C_doubleprime / 2.0));
  CHECK(x.delta > 0.0);
  for (const CenterExtraction& c : x.centers) {
    CAPTURE(c.z0.x());
    CAPTURE(c.z0.y());
    CHECK(c.lower_integral == doctest::Approx(gaussian_volume(2.0 * g.beta)).epsilon(1e-7));
    CHECK(c.tail_integral == doctest::Approx(gaussian_volume(0.5 * g.alpha)).epsilon(1e-7));
    CHECK(c.obs_holds);
    CHECK(c.mass_holds);
    CHECK(std::exp(-0.5 * g.alpha * c.L * c.L) * c.tail_integral < c.delta);
    CHECK(std::exp(-0.5 * g.alpha * (c.L - 0.25) * (c.L - 0.25)) * c.tail_integral >= c.delta);
  }

  SUBCASE("larger C_obs needs a larger L") {
    ExtractionOptions opt;
    opt.centers = {{0.0, 1.0}};
    opt.verify = false;
    double prev = 0.0;
    for (double scale : {1e-6, 1.0, 1e6, 1e12}) {
      const double L = necessary_condition_experiment(region, C_obs * scale, g, opt).L;
      CHECK(L >= prev);
      prev = L;
    }
  }
  SUBCASE("infeasible search bound") {
    ExtractionOptions opt;
    opt.centers = {{0.0, 1.0}};
    opt.verify = false;
    opt.L_max = 2.0;
    CHECK_THROWS_AS(necessary_condition_experiment(region, C_obs, g, opt), NonConvergence);
  }
}
