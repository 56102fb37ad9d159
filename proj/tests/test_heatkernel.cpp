#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "doctest.h"
#include "fixtures_util.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/heatkernel.hpp"
#include "hyplab/simd/kernels.hpp"

using namespace hyplab;

TEST_CASE("kernel matches the arbitrary-precision golden file") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  const auto rows = read_table("heat_kernel_golden.txt");
  REQUIRE(rows.size() >= 40);
  for (const auto& row : rows) {
    const double v = heat_kernel(KernelQuery(row[0], row[1]), spec);
    INFO("t=" << row[0] << " d=" << row[1]);
    CHECK(std::abs(v - row[2]) <= row[3] * row[2]);
  }
}

TEST_CASE("invalid queries") {
  CHECK_THROWS_AS(KernelQuery(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(KernelQuery(-1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(KernelQuery(1.0, -0.1), InvalidArgument);
}

TEST_CASE("symmetry, isometry invariance and positivity") {
  QuadratureSpec spec;
  HalfPlanePoint a(0.3, 1.7), b(-2, 0.4);
  CHECK(heat_kernel(1.0, a, b, spec) == heat_kernel(1.0, b, a, spec));
  Isometry g{3.0, 11.0};
  CHECK(heat_kernel(1.0, g.apply(a), g.apply(b), spec) == doctest::Approx(heat_kernel(1.0, a, b, spec)).epsilon(1e-12));
  for (double t : {0.05, 1.0, 10.0}) {
    double prev = INFINITY;
    for (double d = 0; d <= 12; d += 0.5) {
      const double h = heat_kernel(KernelQuery(t, d), spec);
      CHECK(h > 0);
      CHECK(h < prev);
      prev = h;
    }
  }
}

TEST_CASE("stochastic completeness") {
  QuadratureSpec spec;
  for (double t : {0.5, 1.0, 2.0}) {
    const QuadResult m = kernel_mass(t, spec);
    CHECK(m.converged);
    CHECK(std::abs(m.value - 1.0) < 1e-6);
  }
}

TEST_CASE("scalar and vector integrands give the same kernel") {
  if (!simd::avx2_kernels()) return;
  QuadratureSpec spec;
  const auto& s = simd::scalar_kernels();
  const auto* v = simd::avx2_kernels();
  std::vector<double> u(200), a(200), b(200);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.03 * static_cast<double>(i);
  s.mckean(1.3, 2.2, u, a);
  v->mckean(1.3, 2.2, u, b);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("kernel profile interpolates accurately") {
  QuadratureSpec spec;
  KernelProfile p(1.0, 10.0, 2000, spec);
  for (double r : {0.0, 0.0123, 0.77, 3.3333, 9.9}) {
    CHECK(p(r) == doctest::Approx(heat_kernel(KernelQuery(1.0, r), spec)).epsilon(1e-8));
  }
  CHECK(p(10.5) == 0.0);
}

TEST_CASE("cache is consistent under concurrent use") {
  QuadratureSpec spec;
  HeatKernelCache cache(spec);
  std::vector<double> out(8);
  std::vector<std::thread> th;
  for (int w = 0; w < 4; ++w)
    th.emplace_back([&, w] {
      for (int i = 0; i < 8; ++i) {
        const double v = cache(1.0, 0.5 * i);
        if (w == 0) out[static_cast<std::size_t>(i)] = v;
      }
    });
  for (auto& x : th) x.join();
  CHECK(cache.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(out[static_cast<std::size_t>(i)] == heat_kernel(KernelQuery(1.0, 0.5 * i), spec));
}

TEST_CASE("semigroup identity") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-8;
  spec.tail_tol = 1e-12;
  const HalfPlanePoint o(0, 1);
  auto r = semigroup_check(2.0, 1.0, o, o, spec);
  CHECK(r.relative < 1e-4);
  // Isometry moves both points: same residual up to quadrature noise.
  Isometry g{0.25, 3.0};
  HalfPlanePoint p(1.0, 2.0);
  auto r1 = semigroup_check(2.0, 1.0, o, p, spec);
  auto r2 = semigroup_check(2.0, 1.0, g.apply(o), g.apply(p), spec);
  CHECK(r1.relative < 1e-4);
  CHECK(r2.convolved == doctest::Approx(r1.convolved).epsilon(1e-6));
  // s <-> t - s.
  auto r3 = semigroup_check(2.0, 0.7, o, p, spec);
  auto r4 = semigroup_check(2.0, 1.3, o, p, spec);
  CHECK(r3.convolved == doctest::Approx(r4.convolved).epsilon(1e-6));
  CHECK_THROWS_AS(semigroup_check(1.0, 1.0, o, p, spec), InvalidArgument);
}

TEST_CASE("diagonal estimate and Gaussian lower ratio") {
  QuadratureSpec spec;
  double hi = 0;
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) hi = std::max(hi, diagonal_ratio(t, spec));
  CHECK(hi < 1.0);
  // Small-t limit is 1/(4 pi).
  CHECK(diagonal_ratio(0.001, spec) == doctest::Approx(1.0 / (4 * std::numbers::pi)).epsilon(1e-3));
  const double q = diagonal_ratio(0.01, spec) / diagonal_ratio(0.02, spec);
  CHECK(q > 0.5);
  CHECK(q < 2.0);
  double lo = INFINITY;
  for (double d = 0; d <= 6; d += 1) lo = std::min(lo, gaussian_lower_ratio(d, spec));
  CHECK(lo > 0);
  CHECK(gaussian_lower_ratio(0, spec) == heat_kernel(KernelQuery(2.0, 0.0), spec));
}

TEST_CASE("Gaussian upper fit") {
  QuadratureSpec spec;
  const std::vector<double> tg{0.5, 1, 2, 4};
  const std::vector<double> dg{0, 1, 2, 3, 4, 5, 6};
  GaussianFit fit = gaussian_upper_fit(tg, dg, spec);
  CHECK(fit.max_violation <= 0.0);
  CHECK(fit.alpha > 0);
  CHECK(fit.alpha <= 0.5);
  const auto tf = refine_grid(tg), df = refine_grid(dg);
  CHECK(tf.size() == 7);
  CHECK(gaussian_fit_violation(fit, tf, df, spec) <= 1e-8);

  // One constraint: alpha at the bottom of the search, K exact.
  const std::vector<double> t1{1.0}, d1{2.0};
  GaussianSearch search;
  GaussianFit one = gaussian_upper_fit(t1, d1, spec, search);
  CHECK(one.alpha == doctest::Approx(0.5 / search.alpha_steps));
  CHECK(one.gamma == doctest::Approx(search.gamma_min));
  CHECK(one.bound(1.0, 2.0) == doctest::Approx(heat_kernel(KernelQuery(1.0, 2.0), spec)).epsilon(1e-12));
}

TEST_CASE("evolution from a kernel-launched state") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-8;
  spec.tail_tol = 1e-12;
  HalfPlanePoint z0(0, 1), z(0.5, 1.5);
  CHECK(evolve_from_kernel(z0, 1.0, 0.0, z, spec) == heat_kernel(1.0, z, z0, spec));
  CHECK(evolve_from_kernel(z0, 1.0, 1.0, z, spec) == heat_kernel(2.0, z, z0, spec));
  const double conv = evolve_by_convolution(z0, 1.0, 0.8, z, spec).value;
  CHECK(std::abs(conv - evolve_from_kernel(z0, 1.0, 0.8, z, spec)) < 1e-4 * conv);
}
