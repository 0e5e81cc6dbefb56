#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "primeorbit/roof.hpp"
#include "primeorbit/turn.hpp"

namespace primeorbit {

struct TorusMode {
  int m = 0;
  int n = 0;
  std::complex<double> c;
};

// r(x, y) = sum c_{m,n} e^{2 pi i (m x + n y)}. Only one of each pair
// (m, n), (-m, -n) is stored; the conjugate is implied.
class Torus2Function {
 public:
  Torus2Function(double mean, std::vector<TorusMode> modes);

  double operator()(double x, double y) const;
  double mean() const { return mean_; }
  // mean - 2 sum |c|; must be positive.
  double min_bound() const { return min_bound_; }
  const std::vector<TorusMode>& modes() const { return modes_; }

 private:
  double mean_;
  std::vector<TorusMode> modes_;
  double min_bound_;
};

struct ReparamOptions {
  std::size_t quadrature_nodes = 64;
  std::size_t max_nodes = 4096;
  std::size_t harmonics = 32;
  double tol = 1e-12;
  bool normalize = true;
};

struct ReparamResult {
  AnalyticRoof roof;
  std::size_t nodes_used = 0;
  // Largest change seen in the final node doubling.
  double quadrature_change = 0.0;
  // Coefficients below the noise floor that were set to zero.
  std::size_t dropped = 0;
  double scale = 1.0;
};

// Time to cross from (x, 0) to (x + alpha, 1) along the straight segment at
// speed r: f(x) = int_0^1 dy / r(x + alpha y, y). The first return to
// {y = 0} is then the rotation by alpha.
double crossing_time(const Torus2Function& r, double alpha, double x, std::size_t nodes);

// Tabulates the crossing time on 4K points, takes the discrete Fourier
// transform, fits decay constants and certifies positivity.
ReparamResult roof_from_reparam(const Torus2Function& r, Turn alpha, const ReparamOptions& opts = {});

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace primeorbit
