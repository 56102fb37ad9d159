// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma
// and is only entered after a CPUID check.

#include "hyplab/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace hyplab::simd {
namespace {

// Lane mask selecting the first n (< 4) lanes.
inline __m256i tail_mask(std::size_t n) {
  const __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(n)), idx);
}

// round-to-nearest double -> int64 for |v| < 2^51.
inline __m256i to_int64(__m256d v) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(v, magic)),
                          _mm256_castpd_si256(magic));
}

inline __m256d vexp(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  // Taylor polynomial through r^13 on |r| <= ln(2)/2.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(to_int64(n), _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, result);
}

inline __m256d vcos(__m256d x) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(0.63661977236758134308)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  // pi/2 split into three 33-bit pieces.
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(1.57079632673412561417e+00), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(6.07710050630396597660e-11), r);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(2.02226624871116645580e-21), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060e-10);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-2.50507477628578072866e-8));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(2.75573136213857245213e-6));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.98412698295895385996e-4));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(8.33333333332211858878e-3));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.66666666666666307295e-1));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300e-11);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(2.08757008419747316778e-9));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-2.75573141792967388112e-7));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(2.48015872888517045348e-5));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.38888888888730564116e-3));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(4.16666666666665929218e-2));
  const __m256d cos_r =
      _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  const __m256i qi = to_int64(q);
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d odd = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one));
  const __m256i neg = _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one), two), two);
  const __m256d value = _mm256_blendv_pd(cos_r, sin_r, odd);
  const __m256d sign = _mm256_and_pd(_mm256_castsi256_pd(neg), _mm256_set1_pd(-0.0));
  return _mm256_xor_pd(value, sign);
}

void exp_avx2(std::span<const double> x, std::span<double> out) {
  std::size_t i = 0;
  const std::size_t n = x.size();
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, vexp(_mm256_loadu_pd(x.data() + i)));
  if (i < n) {
    const __m256i m = tail_mask(n - i);
    _mm256_maskstore_pd(out.data() + i, m, vexp(_mm256_maskload_pd(x.data() + i, m)));
  }
}

void cos_avx2(std::span<const double> x, std::span<double> out) {
  std::size_t i = 0;
  const std::size_t n = x.size();
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, vcos(_mm256_loadu_pd(x.data() + i)));
  if (i < n) {
    const __m256i m = tail_mask(n - i);
    _mm256_maskstore_pd(out.data() + i, m, vcos(_mm256_maskload_pd(x.data() + i, m)));
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2_raw(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  if (i < n) {
    const __m256i m = tail_mask(n - i);
    acc1 = _mm256_fmadd_pd(_mm256_maskload_pd(a + i, m), _mm256_maskload_pd(b + i, m), acc1);
  }
  return hsum(_mm256_add_pd(acc0, acc1));
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  return dot_avx2_raw(a.data(), b.data(), a.size());
}

void gemv_avx2(std::span<const double> a, std::span<const double> x, std::span<double> y) {
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < y.size(); ++r) y[r] = dot_avx2_raw(a.data() + r * cols, x.data(), cols);
}

void gemv_t_avx2(std::span<const double> a, std::span<const double> x, std::span<double> y) {
  const std::size_t cols = y.size();
  for (double& v : y) v = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double* row = a.data() + r * cols;
    const __m256d xr = _mm256_set1_pd(x[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(y.data() + c, _mm256_fmadd_pd(_mm256_loadu_pd(row + c), xr, _mm256_loadu_pd(y.data() + c)));
    for (; c < cols; ++c) y[c] = std::fma(row[c], x[r], y[c]);
  }
}

void cosine_sum_avx2(std::span<const double> g, std::span<const double> u,
                     std::span<const double> freq, std::span<double> out) {
  const std::size_t n = g.size();
  const std::size_t full = n - n % 4;
  const __m256i m = tail_mask(n - full);
  for (std::size_t k = 0; k < freq.size(); ++k) {
    const __m256d f = _mm256_set1_pd(freq[k]);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < full; i += 4) {
      const __m256d c = vcos(_mm256_mul_pd(f, _mm256_loadu_pd(u.data() + i)));
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(g.data() + i), c, acc);
    }
    if (full < n) {
      const __m256d c = vcos(_mm256_mul_pd(f, _mm256_maskload_pd(u.data() + full, m)));
      acc = _mm256_fmadd_pd(_mm256_maskload_pd(g.data() + full, m), c, acc);
    }
    out[k] = hsum(acc);
  }
}

// sinh(x)/x for x >= 0: odd Taylor series below 0.5, exponentials above.
inline __m256d vsinhc(__m256d x) {
  const __m256d z = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0));

  const __m256d e = vexp(x);
  const __m256d big = _mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_sub_pd(e, _mm256_div_pd(_mm256_set1_pd(1.0), e))), x);
  const __m256d small = _mm256_cmp_pd(x, _mm256_set1_pd(0.5), _CMP_LT_OQ);
  return _mm256_blendv_pd(big, p, small);
}

inline __m256d vmckean(__m256d t4, __m256d d, __m256d u) {
  const __m256d u2 = _mm256_mul_pd(u, u);
  const __m256d half = _mm256_mul_pd(_mm256_set1_pd(0.5), u2);
  const __m256d a = _mm256_add_pd(d, half);
  const __m256d expo = _mm256_div_pd(_mm256_fmadd_pd(_mm256_add_pd(d, d), u2, _mm256_mul_pd(u2, u2)), t4);
  const __m256d gauss = vexp(_mm256_sub_pd(_mm256_setzero_pd(), expo));
  const __m256d denom = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_mul_pd(a, vsinhc(a)), vsinhc(half)));
  const __m256d num = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_add_pd(d, u2)), gauss);
  const __m256d value = _mm256_div_pd(num, denom);
  const __m256d zero = _mm256_cmp_pd(a, _mm256_setzero_pd(), _CMP_EQ_OQ);
  return _mm256_andnot_pd(zero, value);
}

void mckean_avx2(double t, double d, std::span<const double> u, std::span<double> out) {
  const __m256d t4 = _mm256_set1_pd(4.0 * t);
  const __m256d dv = _mm256_set1_pd(d);
  std::size_t i = 0;
  const std::size_t n = u.size();
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, vmckean(t4, dv, _mm256_loadu_pd(u.data() + i)));
  if (i < n) {
    const __m256i m = tail_mask(n - i);
    // Inactive lanes load 1.0 so no lane divides 0 by 0.
    const __m256d uu = _mm256_blendv_pd(_mm256_set1_pd(1.0), _mm256_maskload_pd(u.data() + i, m), _mm256_castsi256_pd(m));
    _mm256_maskstore_pd(out.data() + i, m, vmckean(t4, dv, uu));
  }
}

constexpr KernelTable kAvx2{
    Isa::Avx2, "avx2", exp_avx2, cos_avx2, dot_avx2, gemv_avx2,
    gemv_t_avx2, cosine_sum_avx2, mckean_avx2,
};

}  // namespace

const KernelTable* avx2_table_if_compiled() noexcept { return &kAvx2; }

}  // namespace hyplab::simd

#else

namespace hyplab::simd {
const KernelTable* avx2_table_if_compiled() noexcept { return nullptr; }
}  // namespace hyplab::simd

#endif
