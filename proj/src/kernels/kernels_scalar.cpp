#include <cmath>

#include "primeorbit/kernels.hpp"

namespace primeorbit {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

// Reduce to a quarter turn first so that large t keeps full accuracy.
inline void sincos_turn(double t, double& s, double& c) {
  double y = 4.0 * t;
  double q = std::nearbyint(y);
  double r = (y - q) * kHalfPi;
  double sr = std::sin(r);
  double cr = std::cos(r);
  switch (static_cast<long long>(q) & 3) {
    case 0: s = sr; c = cr; break;
    case 1: s = cr; c = -sr; break;
    case 2: s = -sr; c = -cr; break;
    default: s = -cr; c = sr; break;
  }
}

void sincos_turns_scalar(const double* t, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) sincos_turn(t[i], s[i], c[i]);
}

void roof_oscillation_scalar(const double* re, const double* im, std::size_t K, const double* x, double* out,
                             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double s1, c1;
    sincos_turn(x[i], s1, c1);
    double wr = c1, wi = s1;
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      acc += re[k] * wr - im[k] * wi;
      double nr = wr * c1 - wi * s1;
      double ni = wr * s1 + wi * c1;
      wr = nr;
      wi = ni;
    }
    out[i] = 2.0 * acc;
  }
}

void character_sum_scalar(const double* t, std::size_t n, double* sum_re, double* sum_im) {
  // Four interleaved accumulators mirror the vector lane layout.
  double ar[4] = {0, 0, 0, 0}, ai[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      double s, c;
      sincos_turn(t[i + l], s, c);
      ar[l] += c;
      ai[l] += s;
    }
  }
  for (int l = 0; i < n; ++i, ++l) {
    double s, c;
    sincos_turn(t[i], s, c);
    ar[l] += c;
    ai[l] += s;
  }
  *sum_re = (ar[0] + ar[2]) + (ar[1] + ar[3]);
  *sum_im = (ai[0] + ai[2]) + (ai[1] + ai[3]);
}

const KernelSet kScalar = {"scalar", sincos_turns_scalar, roof_oscillation_scalar, character_sum_scalar};

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

}  // namespace primeorbit
