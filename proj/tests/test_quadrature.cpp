#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hyplab/errors.hpp"
#include "hyplab/quadrature.hpp"

using namespace hyplab;

TEST_CASE("Gauss-Kronrod integrates smooth functions") {
  QuadratureSpec spec;
  auto r = integrate_scalar([](double x) { return x * x * x * x * x; }, -1.0, 2.0, spec);
  CHECK(r.value == doctest::Approx(64.0 / 6.0 - 1.0 / 6.0).epsilon(1e-14));
  CHECK(r.converged);
  r = integrate_scalar([](double x) { return std::exp(-x * x); }, -10.0, 10.0, spec);
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  r = integrate_scalar([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, spec);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("breakpoints handle kinks") {
  QuadratureSpec spec;
  const double bp[] = {-1.0, 0.3, 1.0};
  auto r = integrate(
      [](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::abs(x[i] - 0.3);
      },
      bp, spec);
  CHECK(r.value == doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-14));
}

TEST_CASE("non-convergence is reported and checked() throws") {
  QuadratureSpec spec;
  spec.max_subdivisions = 2;
  auto r = integrate_scalar([](double x) { return std::sin(200.0 * x); }, 0.0, 10.0, spec);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(r.checked("oscillatory"), NonConvergence);
}

TEST_CASE("invalid specs are rejected") {
  QuadratureSpec spec;
  spec.rel_tol = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = {};
  spec.max_subdivisions = 0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 2, 5, 16, 40}) {
    const Rule& g = gauss_legendre(n);
    REQUIRE(g.size() == static_cast<std::size_t>(n));
    double w = 0, m2 = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      w += g.weights[i];
      m2 += g.weights[i] * g.nodes[i] * g.nodes[i];
      if (i) CHECK(g.nodes[i] > g.nodes[i - 1]);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    if (n >= 2) CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  // Degree 2n-1 exactness.
  const Rule& g = gauss_legendre(6);
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 10);
  CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("composite rules") {
  Rule r = composite_gauss_legendre(0.0, 3.0, 4, 8);
  CHECK(r.size() == 32);
  double s = 0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::cos(r.nodes[i]);
  CHECK(s == doctest::Approx(std::sin(3.0)).epsilon(1e-14));
  const double bp[] = {0.0, 1.0, 5.0};
  Rule b = composite_gauss_legendre(bp, 1.5, 4);
  CHECK(b.size() == 4 * 4);
  double len = 0;
  for (double w : b.weights) len += w;
  CHECK(len == doctest::Approx(5.0));
}
