// Scalar reference kernels. These define the expected results for the
// vector variants and are the fallback on CPUs without AVX2.

#include "hyplab/simd/kernels.hpp"

#include <cmath>

namespace hyplab::simd {
namespace {

void exp_scalar(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]);
}

void cos_scalar(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::cos(x[i]);
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void gemv_scalar(std::span<const double> a, std::span<const double> x, std::span<double> y) {
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < y.size(); ++r) {
    double acc = 0.0;
    const double* row = a.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void gemv_t_scalar(std::span<const double> a, std::span<const double> x, std::span<double> y) {
  const std::size_t cols = y.size();
  for (double& v : y) v = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double* row = a.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * x[r];
  }
}

void cosine_sum_scalar(std::span<const double> g, std::span<const double> u,
                       std::span<const double> freq, std::span<double> out) {
  for (std::size_t k = 0; k < freq.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * std::cos(freq[k] * u[i]);
    out[k] = acc;
  }
}

// sinh(x)/x, accurate near zero.
double sinhc(double x) {
  if (x == 0.0) return 1.0;
  return std::sinh(x) / x;
}

void mckean_scalar(double t, double d, std::span<const double> u, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i];
    const double v2 = v * v;
    const double half = 0.5 * v2;
    const double a = d + half;
    if (a == 0.0) {
      out[i] = 0.0;
      continue;
    }
    const double gauss = std::exp(-(2.0 * d * v2 + v2 * v2) / (4.0 * t));
    const double denom = std::sqrt(a * sinhc(a) * sinhc(half));
    out[i] = 2.0 * (d + v2) * gauss / denom;
  }
}

constexpr KernelTable kScalar{
    Isa::Scalar, "scalar", exp_scalar, cos_scalar, dot_scalar, gemv_scalar,
    gemv_t_scalar, cosine_sum_scalar, mckean_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace hyplab::simd
