#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "primeorbit/continued_fraction.hpp"
#include "primeorbit/roof.hpp"
#include "primeorbit/turn.hpp"

namespace primeorbit {

// Exact point of R/Z, always reduced into [0, 1).
class CirclePoint {
 public:
  CirclePoint() = default;
  explicit CirclePoint(const mpq_class& v);
  static CirclePoint parse(const std::string& text);

  const mpq_class& value() const { return value_; }
  Turn turn() const { return Turn::from_rational(value_); }
  double to_double() const { return value_.get_d(); }

 private:
  mpq_class value_ = 0;
};

mpq_class frac(const mpq_class& v);

struct OrbitErrorBudget {
  std::int64_t steps = 0;
  std::size_t approx_level = 0;
  // |n| / (q_N q_{N+1}) >= |n (alpha - p_N/q_N)|.
  mpq_class bound = 0;
};

struct RotateResult {
  CirclePoint point;
  OrbitErrorBudget budget;
};

// x + n p_N/q_N mod 1 for the smallest N whose budget is below tol.
RotateResult rotate_n(const CirclePoint& x, const ContinuedFraction& cf, std::int64_t n, double tol);
RotateResult rotate_n_at_level(const CirclePoint& x, const ContinuedFraction& cf, std::int64_t n,
                               std::size_t level);

// Fixed-point stand-in for alpha used by the floating kernels: the cylinder
// midpoint rounded to 2^-128.
struct AlphaApprox {
  Turn alpha;
  // Bound on |alpha_true - alpha| as a circle displacement per step.
  double step_error = 0.0;

  static AlphaApprox from_cf(const ContinuedFraction& cf);
  static AlphaApprox exact(Turn a) { return {a, 0.0}; }
};

// Circle position x + j alpha for j = start .. start + count - 1, as doubles.
void orbit_positions(Turn x, Turn alpha, std::uint64_t start, std::size_t count, double* out);

struct BirkhoffResult {
  double value = 0.0;
  double error = 0.0;
};

// S_n(f)(x) with a certified bound covering alpha substitution, rounding of x
// (x_error), evaluation and summation. Throws Precision if the bound reaches tol.
BirkhoffResult birkhoff_sum(const AnalyticRoof& f, Turn x, double x_error, const AlphaApprox& alpha,
                            std::uint64_t n, double tol);
BirkhoffResult birkhoff_sum(const AnalyticRoof& f, const CirclePoint& x, const ContinuedFraction& cf,
                            std::uint64_t n, double tol);

// Same sum without the tolerance gate, returning sum_{j<n} (f - a_0).
BirkhoffResult birkhoff_deviation(const AnalyticRoof& f, Turn x, double x_error, const AlphaApprox& alpha,
                                  std::uint64_t n);

// Error bound of birkhoff_deviation without doing the work.
double birkhoff_error_bound(const AnalyticRoof& f, double x_error, const AlphaApprox& alpha, std::uint64_t n);

struct CocycleResult {
  double residual = 0.0;
  double tolerance = 0.0;
};

// |S_{m+n}(x) - S_m(x) - S_n(T^m x)| with tolerance = the sum of the three
// certified error bounds.
CocycleResult cocycle_check(const AnalyticRoof& f, const CirclePoint& x, const ContinuedFraction& cf,
                            std::uint64_t m, std::uint64_t n);

}  // namespace primeorbit
