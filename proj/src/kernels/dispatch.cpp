#include <cstdlib>
#include <cstring>

#include "primeorbit/kernels.hpp"

namespace primeorbit {

#ifndef PRIMEORBIT_HAVE_AVX2
const KernelSet* avx2_kernels() { return nullptr; }
#endif

namespace {

const KernelSet& choose() {
  const char* env = std::getenv("PRIMEORBIT_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
#if defined(PRIMEORBIT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return *avx2_kernels();
#endif
  return scalar_kernels();
}

}  // namespace

const KernelSet& active_kernels() {
  static const KernelSet& k = choose();
  return k;
}

}  // namespace primeorbit
