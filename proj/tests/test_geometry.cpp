#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hyplab/errors.hpp"
#include "hyplab/geometry.hpp"

using namespace hyplab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("distance reference values") {
  CHECK(geodesic_distance({0, 1}, {0, std::exp(1.0)}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(geodesic_distance({0, 1}, {std::sinh(1.0), std::cosh(1.0)}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(geodesic_distance({3, 2}, {3, 2}) == 0.0);
  // Tiny separations stay accurate: d ~ |dz| / y.
  CHECK(geodesic_distance({0, 1}, {1e-9, 1}) == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK(geodesic_distance({0, 1}, {0, 1e8}) == doctest::Approx(std::log(1e8)).epsilon(1e-14));
}

TEST_CASE("invalid inputs throw") {
  CHECK_THROWS_AS(HalfPlanePoint(0, 0), InvalidArgument);
  CHECK_THROWS_AS(HalfPlanePoint(0, -1), InvalidArgument);
  CHECK_THROWS_AS(HalfPlanePoint(NAN, 1), InvalidArgument);
  CHECK_THROWS_AS(GeodesicBall({0, 1}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ball_volume(-1), InvalidArgument);
  CHECK_THROWS_AS(apply_isometry({0, 1}, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("ball volume matches its Euclidean-image integral") {
  CHECK(ball_volume(1.0) == doctest::Approx(2 * kPi * (std::cosh(1.0) - 1)).epsilon(1e-15));
  CHECK(ball_volume(1.0) == doctest::Approx(3.4127).epsilon(1e-4));
  QuadratureSpec spec;
  for (double R : {0.1, 1.0, 3.0}) {
    auto r = riemannian_integral([](const HalfPlanePoint&) { return 1.0; }, GeodesicBall({2, 3}, R), spec);
    CHECK(r.value == doctest::Approx(ball_volume(R)).epsilon(1e-9));
  }
}

TEST_CASE("box integral") {
  QuadratureSpec spec;
  auto r = riemannian_integral_box([](const HalfPlanePoint&) { return 1.0; }, -1, 1, 0.5, 1.5, spec);
  CHECK(r.value == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("isometries preserve distance") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-5, 5), uy(0.01, 10);
  Isometry g{2.5, -7.0};
  for (int i = 0; i < 200; ++i) {
    HalfPlanePoint a(ux(rng), uy(rng)), b(ux(rng), uy(rng));
    CHECK(geodesic_distance(g.apply(a), g.apply(b)) == doctest::Approx(geodesic_distance(a, b)).epsilon(1e-12));
    auto back = g.inverse().apply(g.apply(a));
    CHECK(back.x() == doctest::Approx(a.x()));
    CHECK(back.y() == doctest::Approx(a.y()));
  }
  auto n = Isometry::normalizing({4, 3}).apply({4, 3});
  CHECK(n.x() == doctest::Approx(0.0));
  CHECK(n.y() == doctest::Approx(1.0));
  Isometry h{0.5, 1.0};
  auto z = HalfPlanePoint(1, 2);
  auto c = g.compose(h).apply(z);
  auto s = g.apply(h.apply(z));
  CHECK(c.x() == doctest::Approx(s.x()));
  CHECK(c.y() == doctest::Approx(s.y()));
}

TEST_CASE("triangle inequality") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(-5, 5), uy(0.01, 10);
  for (int i = 0; i < 1000; ++i) {
    HalfPlanePoint a(ux(rng), uy(rng)), b(ux(rng), uy(rng)), c(ux(rng), uy(rng));
    CHECK(geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12);
  }
}

TEST_CASE("ball boundary points sit at the right distance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-5, 5), uy(0.1, 10), ur(0.01, 6), ut(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    HalfPlanePoint c(ux(rng), uy(rng));
    const double r = ur(rng), th = ut(rng);
    auto p = polar_point(c, r, th);
    REQUIRE(std::abs(geodesic_distance(c, p) - r) < 1e-10);
    CHECK(std::abs(std::remainder(polar_angle(c, p.x(), p.y()) - th, 2 * kPi)) < 1e-9);
    EuclideanDisc e = euclidean_image(GeodesicBall(c, r));
    CHECK(std::hypot(p.x() - e.cx, p.y() - e.cy) == doctest::Approx(e.radius).epsilon(1e-10));
  }
  // theta = 0 points up, theta = pi/2 points to -x.
  auto up = polar_point({0, 1}, 1.0, 0.0);
  CHECK(up.x() == doctest::Approx(0.0));
  CHECK(up.y() == doctest::Approx(std::exp(1.0)));
  CHECK(polar_point({0, 1}, 1.0, kPi / 2).x() < 0);
}

TEST_CASE("polar and Cartesian whole-plane integrals agree") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  for (HalfPlanePoint base : {HalfPlanePoint(0, 1), HalfPlanePoint(7, 4)}) {
    PointFunction f = [base](const HalfPlanePoint& z) {
      const double d = geodesic_distance(z, base);
      return std::exp(-d * d) * (1.0 + 0.5 * (z.x() - base.x()) / z.y());
    };
    RadialEnvelope env = [](double r) { return 1.5 * std::exp(-r * r) * std::cosh(r); };
    auto p = riemannian_integral_polar(f, base, env, spec);
    auto c = riemannian_integral_cartesian(f, base, env, spec);
    auto exact = radial_integral([](double r) { return std::exp(-r * r); }, env, spec);
    CHECK(p.value == doctest::Approx(exact.value).epsilon(1e-9));
    CHECK(c.value == doctest::Approx(exact.value).epsilon(1e-8));
  }
}

TEST_CASE("Monte Carlo ball integral agrees within a few standard errors") {
  GeodesicBall ball({1, 2}, 1.5);
  auto mc = monte_carlo_integral([](const HalfPlanePoint& z) { return z.x(); }, ball, 20000, 42);
  QuadratureSpec spec;
  auto q = riemannian_integral([](const HalfPlanePoint& z) { return z.x(); }, ball, spec);
  CHECK(std::abs(mc.value - q.value) < 5 * mc.std_error);
}
