#include <immintrin.h>

#include <cmath>

#include "primeorbit/kernels.hpp"

namespace primeorbit {

namespace {

// Taylor coefficients; on |r| <= pi/4 the truncation error is below 1e-18.
constexpr double kS3 = -1.0 / 6.0;
constexpr double kS5 = 1.0 / 120.0;
constexpr double kS7 = -1.0 / 5040.0;
constexpr double kS9 = 1.0 / 362880.0;
constexpr double kS11 = -1.0 / 39916800.0;
constexpr double kS13 = 1.0 / 6227020800.0;
constexpr double kS15 = -1.0 / 1307674368000.0;
constexpr double kS17 = 1.0 / 355687428096000.0;
constexpr double kC2 = -1.0 / 2.0;
constexpr double kC4 = 1.0 / 24.0;
constexpr double kC6 = -1.0 / 720.0;
constexpr double kC8 = 1.0 / 40320.0;
constexpr double kC10 = -1.0 / 3628800.0;
constexpr double kC12 = 1.0 / 479001600.0;
constexpr double kC14 = -1.0 / 87178291200.0;
constexpr double kC16 = 1.0 / 20922789888000.0;

inline void sincos4(__m256d t, __m256d& s, __m256d& c) {
  const __m256d y = _mm256_mul_pd(t, _mm256_set1_pd(4.0));
  const __m256d q = _mm256_round_pd(y, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_mul_pd(_mm256_sub_pd(y, q), _mm256_set1_pd(1.5707963267948966));
  const __m256d r2 = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(kS17);
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS15));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS13));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS11));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS9));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS7));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS5));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(kS3));
  const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(ps, r2), r, r);

  __m256d pc = _mm256_set1_pd(kC16);
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC14));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC12));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC10));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC8));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC6));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC4));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(kC2));
  const __m256d cr = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0));

  // Low mantissa bits of q + 1.5*2^52 hold q in two's complement.
  const __m256i qi = _mm256_castpd_si256(_mm256_add_pd(q, _mm256_set1_pd(6755399441055744.0)));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one));
  const __m256d ssign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(qi, two), 62));
  const __m256d csign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one), two), 62));

  s = _mm256_xor_pd(_mm256_blendv_pd(sr, cr, swap), ssign);
  c = _mm256_xor_pd(_mm256_blendv_pd(cr, sr, swap), csign);
}

void sincos_turns_avx2(const double* t, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vs, vc;
    sincos4(_mm256_loadu_pd(t + i), vs, vc);
    _mm256_storeu_pd(s + i, vs);
    _mm256_storeu_pd(c + i, vc);
  }
  if (i < n) {
    alignas(32) double tt[4] = {0, 0, 0, 0}, ss[4], cc[4];
    for (std::size_t l = 0; i + l < n; ++l) tt[l] = t[i + l];
    __m256d vs, vc;
    sincos4(_mm256_load_pd(tt), vs, vc);
    _mm256_store_pd(ss, vs);
    _mm256_store_pd(cc, vc);
    for (std::size_t l = 0; i + l < n; ++l) {
      s[i + l] = ss[l];
      c[i + l] = cc[l];
    }
  }
}

inline __m256d roof4(const double* re, const double* im, std::size_t K, __m256d x) {
  __m256d s1, c1;
  sincos4(x, s1, c1);
  __m256d wr = c1, wi = s1;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < K; ++k) {
    const __m256d a = _mm256_set1_pd(re[k]);
    const __m256d b = _mm256_set1_pd(im[k]);
    acc = _mm256_add_pd(acc, _mm256_fmsub_pd(a, wr, _mm256_mul_pd(b, wi)));
    const __m256d nr = _mm256_fmsub_pd(wr, c1, _mm256_mul_pd(wi, s1));
    const __m256d ni = _mm256_fmadd_pd(wr, s1, _mm256_mul_pd(wi, c1));
    wr = nr;
    wi = ni;
  }
  return _mm256_add_pd(acc, acc);
}

void roof_oscillation_avx2(const double* re, const double* im, std::size_t K, const double* x, double* out,
                           std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, roof4(re, im, K, _mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double xx[4] = {0, 0, 0, 0}, oo[4];
    for (std::size_t l = 0; i + l < n; ++l) xx[l] = x[i + l];
    _mm256_store_pd(oo, roof4(re, im, K, _mm256_load_pd(xx)));
    for (std::size_t l = 0; i + l < n; ++l) out[i + l] = oo[l];
  }
}

void character_sum_avx2(const double* t, std::size_t n, double* sum_re, double* sum_im) {
  __m256d ar = _mm256_setzero_pd(), ai = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s, c;
    sincos4(_mm256_loadu_pd(t + i), s, c);
    ar = _mm256_add_pd(ar, c);
    ai = _mm256_add_pd(ai, s);
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, ar);
  _mm256_store_pd(m, ai);
  if (i < n) {
    alignas(32) double tt[4] = {0, 0, 0, 0}, ss[4], cc[4];
    std::size_t rem = n - i;
    for (std::size_t l = 0; l < rem; ++l) tt[l] = t[i + l];
    __m256d s, c;
    sincos4(_mm256_load_pd(tt), s, c);
    _mm256_store_pd(ss, s);
    _mm256_store_pd(cc, c);
    for (std::size_t l = 0; l < rem; ++l) {
      r[l] += cc[l];
      m[l] += ss[l];
    }
  }
  *sum_re = (r[0] + r[2]) + (r[1] + r[3]);
  *sum_im = (m[0] + m[2]) + (m[1] + m[3]);
}

const KernelSet kAvx2 = {"avx2", sincos_turns_avx2, roof_oscillation_avx2, character_sum_avx2};

}  // namespace

const KernelSet* avx2_kernels() { return &kAvx2; }

}  // namespace primeorbit
