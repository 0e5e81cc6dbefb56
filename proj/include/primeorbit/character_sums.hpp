#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "primeorbit/continued_fraction.hpp"
#include "primeorbit/roof.hpp"
#include "primeorbit/rotation.hpp"

namespace primeorbit {

// x_j = j / size for j < size.
std::vector<CirclePoint> uniform_grid(std::size_t size);

// e^{2 pi i k x} (1 - e^{2 pi i k n alpha}) / (1 - e^{2 pi i k alpha}); n for k = 0.
std::complex<double> char_sum_closed_form(std::int64_t k, const CirclePoint& x, const ContinuedFraction& cf,
                                          std::uint64_t n);

// sum_{j<n} e^{2 pi i k (x + j alpha)} term by term through the active kernels.
std::complex<double> char_sum_direct(std::int64_t k, Turn x, Turn alpha, std::uint64_t n);
std::complex<double> char_sum_direct(std::int64_t k, const CirclePoint& x, const ContinuedFraction& cf,
                                     std::uint64_t n);

struct Lemma4Row {
  std::size_t level = 0;
  std::int64_t k = 0;
  double q_n = 0.0;
  // Largest |S_{q_n}(chi_k)(x)| over the grid.
  double max_abs = 0.0;
  double norm_lo = 0.0;
  // min(q_n, 4 pi |k| / (||k alpha|| q_{n+1})) with the certified lower ||k alpha||.
  double bound = 0.0;
  // Same with |k| dropped from the numerator.
  double bound_without_k = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool pass_without_k = false;
  bool triangle_pass = false;
};

Lemma4Row lemma4_bound_check(std::int64_t k, const std::vector<CirclePoint>& grid, const ContinuedFraction& cf,
                             std::size_t level);

std::vector<Lemma4Row> lemma4_table(const ContinuedFraction& cf, std::int64_t kmax, std::size_t level_lo,
                                    std::size_t level_hi, std::size_t grid_size);

struct DeviationResult {
  std::size_t level = 0;
  double q_n = 0.0;
  // sup over the grid of |S_{q_n}(f)(x) - q_n a_0|.
  double sup = 0.0;
  double argmax = 0.0;
  double error = 0.0;
};

DeviationResult deviation_qn(const AnalyticRoof& f, const std::vector<CirclePoint>& grid,
                             const ContinuedFraction& cf, std::size_t level);

struct BoundFit {
  std::vector<double> q;
  std::vector<double> lhs;
  double c_prime = 0.0;
  double C_prime = 0.0;
  bool pass = false;
};

// Least squares fit of log(lhs) against q, with C' raised until
// C' e^{-c' q} majorizes every point.
BoundFit fit_exponential_bound(const std::vector<double>& q, const std::vector<double>& deviations);

struct UniformSupResult {
  std::size_t level = 0;
  std::uint64_t k_cap = 0;
  // max over K <= k_cap and grid x of |S_{K q_n}(f)(x) - K q_n a_0|.
  double sup = 0.0;
  // max of |S_{q_n}(f)(y) - q_n a_0| over the points y = T^{j q_n} x the chain visits.
  double orbit_deviation = 0.0;
  // deviation_qn on the grid alone.
  double grid_deviation = 0.0;
  double chain_bound = 0.0;
  double grid_chain_bound = 0.0;
  bool pass = false;
  bool grid_pass = false;
};

// k_cap = min(floor(e^{d q_n}), cap).
std::uint64_t horizon_multiplier(const ContinuedFraction& cf, std::size_t level, double d, std::uint64_t cap);

UniformSupResult uniform_sup_check(const AnalyticRoof& f, const std::vector<CirclePoint>& grid,
                                   const ContinuedFraction& cf, std::size_t level, std::uint64_t k_cap,
                                   std::uint64_t step_budget = 1ull << 32);

// Pieces of the same computation used by tests: S_{K q_n} - K q_n a_0 for
// K = 1..k_cap at one start point.
std::vector<double> chained_deviations(const AnalyticRoof& f, const CirclePoint& x, const ContinuedFraction& cf,
                                       std::size_t level, std::uint64_t k_cap);

}  // namespace primeorbit
