#include <cstdlib>
#include <string_view>

#include "shiftscope/kernels.hpp"
#include "variants.hpp"

namespace shiftscope::kernels {

namespace {

constexpr KernelSet kScalar{Isa::scalar, "scalar", scalar::squared_distance, scalar::cross_squared_distances,
                            scalar::upper_squared_distances, scalar::quadratic_forms};

#if defined(SHIFTSCOPE_HAVE_AVX2)
constexpr KernelSet kAvx2{Isa::avx2, "avx2", avx2::squared_distance, avx2::cross_squared_distances,
                          avx2::upper_squared_distances, avx2::quadratic_forms};
#endif

#if defined(SHIFTSCOPE_HAVE_NEON)
constexpr KernelSet kNeon{Isa::neon, "neon", neon::squared_distance, neon::cross_squared_distances,
                          neon::upper_squared_distances, neon::quadratic_forms};
#endif

const KernelSet* detect_simd() {
#if defined(SHIFTSCOPE_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
#if defined(SHIFTSCOPE_HAVE_NEON)
  return &kNeon;
#endif
  return nullptr;
}

bool simd_disabled_by_env() {
  const char* value = std::getenv("SHIFTSCOPE_SIMD");
  if (value == nullptr) return false;
  std::string_view v(value);
  return v == "off" || v == "scalar" || v == "0";
}

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

const KernelSet* simd_kernels() {
  static const KernelSet* simd = detect_simd();
  return simd;
}

const KernelSet& active_kernels() {
  static const KernelSet& active = [] () -> const KernelSet& {
    const KernelSet* simd = simd_kernels();
    return (simd != nullptr && !simd_disabled_by_env()) ? *simd : kScalar;
  }();
  return active;
}

std::vector<const KernelSet*> available_kernels() {
  std::vector<const KernelSet*> sets{&kScalar};
  if (const KernelSet* simd = simd_kernels()) sets.push_back(simd);
  return sets;
}

}  // namespace shiftscope::kernels
