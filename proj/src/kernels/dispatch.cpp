// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "b2dr/kernels/kernels.hpp"

namespace b2dr::kernels {

#if defined(B2DR_HAVE_AVX2_KERNELS)
namespace avx2 {
const KernelTable& table();
}
#endif

const KernelTable* avx2_table() {
#if defined(B2DR_HAVE_AVX2_KERNELS) && (defined(__x86_64__) || defined(__i386__))
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &avx2::table();
#endif
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    const char* forced = std::getenv("B2DR_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace b2dr::kernels
