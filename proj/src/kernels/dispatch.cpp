#include <cstdlib>
#include <cstring>

#include "relocnet/kernels.hpp"

namespace relocnet::kernels {
namespace {

const KernelTable* select() {
  const char* forced = std::getenv("RELOCNET_KERNEL");
#ifdef RELOCNET_BUILD_AVX2
#if defined(__GNUC__) || defined(__clang__)
  const bool cpu_ok = __builtin_cpu_supports("avx2");
#else
  const bool cpu_ok = false;
#endif
  if (forced) {
    if (std::strcmp(forced, "avx2") == 0 && cpu_ok) return &kAvx2;
    if (std::strcmp(forced, "scalar") == 0) return &kScalar;
  }
  if (cpu_ok) return &kAvx2;
#else
  (void)forced;
#endif
  return &kScalar;
}

}  // namespace

const KernelTable& active() {
  static const KernelTable* table = select();
  return *table;
}

const char* active_name() { return active().name; }

}  // namespace relocnet::kernels
