#pragma once

#include <cstddef>
#include <string_view>

namespace primeorbit {

// Data-parallel inner loops. Every entry has a scalar reference version; the
// AVX2 versions must agree with it to about 1e-14 relative.
struct KernelSet {
  const char* name;

  // s[i] = sin(2 pi t[i]), c[i] = cos(2 pi t[i]); t is measured in turns.
  void (*sincos_turns)(const double* t, double* s, double* c, std::size_t n);

  // out[i] = 2 * sum_{k=1..K} (re[k-1] cos(2 pi k x[i]) - im[k-1] sin(2 pi k x[i])),
  // the oscillating part of a real trigonometric polynomial.
  void (*roof_oscillation)(const double* re, const double* im, std::size_t K, const double* x, double* out,
                           std::size_t n);

  // (*sum_re, *sum_im) = sum_i e^{2 pi i t[i]}.
  void (*character_sum)(const double* t, std::size_t n, double* sum_re, double* sum_im);
};

const KernelSet& scalar_kernels();
// nullptr when the binary was built without AVX2 support.
const KernelSet* avx2_kernels();

// Chosen once: AVX2 when the CPU reports avx2 and fma, unless the environment
// variable PRIMEORBIT_SIMD is set to "scalar".
const KernelSet& active_kernels();

}  // namespace primeorbit
