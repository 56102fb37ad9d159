#pragma once

// Data-parallel inner loops used by the quadrature, heat-kernel and
// spherical-transform code. Every kernel exists as a scalar reference and,
// on x86-64, as an AVX2+FMA variant. The active table is selected once at
// first use from CPUID, overridable with HYPLAB_SIMD=scalar|avx2.

#include <cstddef>
#include <span>
#include <string_view>

namespace hyplab::simd {

enum class Isa { Scalar, Avx2 };

/// Function table for one instruction set. All kernels are pure; output
/// spans must not alias inputs unless stated.
struct KernelTable {
  Isa isa;
  std::string_view name;

  /// out[i] = exp(x[i]); in-place allowed.
  void (*exp)(std::span<const double> x, std::span<double> out);
  /// out[i] = cos(x[i]); in-place allowed.
  void (*cos)(std::span<const double> x, std::span<double> out);
  double (*dot)(std::span<const double> a, std::span<const double> b);
  /// y = A x, A row-major with rows = y.size(), cols = x.size().
  void (*gemv)(std::span<const double> a, std::span<const double> x, std::span<double> y);
  /// y = A^T x, A row-major with rows = x.size(), cols = y.size().
  void (*gemv_t)(std::span<const double> a, std::span<const double> x, std::span<double> y);
  /// out[k] = sum_i g[i] * cos(freq[k] * u[i]).
  void (*cosine_sum)(std::span<const double> g, std::span<const double> u,
                     std::span<const double> freq, std::span<double> out);
  /// Heat-kernel integrand after the s = d + u^2 substitution, with the
  /// Gaussian factor exp(-d^2/4t) taken out:
  ///   2u (d+u^2) exp(-(2du^2+u^4)/4t) / sqrt(2 sinh(d+u^2/2) sinh(u^2/2)).
  void (*mckean)(double t, double d, std::span<const double> u, std::span<double> out);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the binary or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// Kernels selected for this process.
const KernelTable& active() noexcept;

bool cpu_has_avx2() noexcept;

}  // namespace hyplab::simd
