#include "hyplab/simd/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace hyplab::simd {

const KernelTable* avx2_table_if_compiled() noexcept;

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() noexcept {
  if (!cpu_has_avx2()) return nullptr;
  return avx2_table_if_compiled();
}

namespace {

const KernelTable& select() noexcept {
  const char* env = std::getenv("HYPLAB_SIMD");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return scalar_kernels();
  if (const KernelTable* v = avx2_kernels()) return *v;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace hyplab::simd
