#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "primeorbit/continued_fraction.hpp"
#include "primeorbit/roof.hpp"
#include "primeorbit/rotation.hpp"
#include "primeorbit/summation.hpp"
#include "primeorbit/turn.hpp"

namespace primeorbit {

// (x, s) in the suspension space with 0 <= s < f(x).
struct FlowPoint {
  Turn base;
  double height = 0.0;
};

// Rejects heights outside [0, f(x)).
FlowPoint make_flow_point(Turn base, double height, const AnalyticRoof& f);

struct FlowStep {
  std::uint64_t steps = 0;
  double residual = 0.0;
  // Certified bound on |S_n(f)(x) + residual - (t + s)|.
  double error = 0.0;
};

struct FlowResult {
  FlowPoint point;
  FlowStep step;
};

enum class BoundaryPolicy {
  // Throw AmbiguousBoundaryError when t + s is within tolerance of a crossing.
  Throw,
  // Keep the computed answer and count the event.
  Count,
};

// Follows one orbit of the flow through nondecreasing times. The base orbit is
// walked once, so a sweep over many times costs one pass over the steps.
class FlowCursor {
 public:
  FlowCursor(const AnalyticRoof& f, FlowPoint start, const AlphaApprox& alpha, double x_error, double tol,
             BoundaryPolicy policy, std::uint64_t step_budget);

  // State at absolute time t (relative to the start point); t must not
  // decrease between calls.
  FlowResult advance_to(double t);

  std::uint64_t steps() const { return n_; }
  Turn base() const { return base_; }
  // S_n(f)(x) - n a_0 for the current n.
  double deviation() const { return dev_.value(); }
  // f at the current base point.
  double roof_here();
  std::uint64_t ambiguous() const { return ambiguous_; }
  double last_margin() const { return last_margin_; }

 private:
  double dev_at(std::uint64_t j);
  double boundary_tolerance(double t) const;

  const AnalyticRoof& f_;
  FlowPoint start_;
  AlphaApprox alpha_;
  double x_error_;
  double tol_;
  BoundaryPolicy policy_;
  std::uint64_t step_budget_;

  std::uint64_t n_ = 0;
  Turn base_;
  NeumaierSum dev_;
  double last_t_ = 0.0;
  std::uint64_t ambiguous_ = 0;
  double last_margin_ = 0.0;

  static constexpr std::size_t kBlock = 1024;
  std::array<double, kBlock> buf_{};
  std::array<double, kBlock> pos_{};
  std::uint64_t buf_start_ = 0;
  std::size_t buf_len_ = 0;
};

// T_t(p). Throws Budget when more than step_budget base steps are needed and
// AmbiguousBoundaryError when t + s sits within tolerance of a crossing.
FlowResult flow_time_t(const FlowPoint& p, double t, const AnalyticRoof& f, const AlphaApprox& alpha, double tol,
                       std::uint64_t step_budget = 1ull << 32);
FlowResult flow_time_t(const FlowPoint& p, double t, const AnalyticRoof& f, const ContinuedFraction& cf,
                       double tol, std::uint64_t step_budget = 1ull << 32);

// Quotient metric of the chart metric max(circle distance, |height difference|)
// under (x, f(x)) ~ (Tx, 0), truncated at the certified roof minimum.
class FlowMetric {
 public:
  FlowMetric(const AnalyticRoof& f, Turn alpha);

  double operator()(const FlowPoint& p, const FlowPoint& q) const;
  double cap() const { return cap_; }

 private:
  // inf_y rho(p, (y, f(y))) + rho((y + alpha, 0), q)
  double through_roof(const FlowPoint& p, const FlowPoint& q, double bound) const;
  // inf_{y, y'} rho(p, (y, f(y))) + |y - y'| + rho((y', f(y')), q)
  double along_roof(const FlowPoint& p, const FlowPoint& q, double bound) const;

  const AnalyticRoof& f_;
  double alpha_;
  double cap_;
};

double chart_distance(const FlowPoint& p, const FlowPoint& q);

struct NearReturn {
  double d_physical = 0.0;
  double d_integer = 0.0;
};

// d_physical = d(T_{S_{K q_n}(f)(x)} p, p), d_integer = d(T_{K q_n} p, p).
NearReturn near_return_check(const FlowPoint& p, const AnalyticRoof& f, const ContinuedFraction& cf,
                             std::size_t level, std::uint64_t K, double tol = 1e-9);

struct NearReturnRow {
  std::uint64_t K = 0;
  double d_physical = 0.0;
  double d_integer = 0.0;
  // Largest d_physical among starts whose height stays below the roof at
  // T^{K q_n} x, the situation the K / q_{n+1} bound describes.
  double d_physical_below_roof = 0.0;
  // K / q_{n+1}
  double physical_bound = 0.0;
};

struct NearReturnScan {
  std::size_t level = 0;
  std::uint64_t k_cap = 0;
  std::vector<NearReturnRow> rows;
  double max_physical = 0.0;
  double max_integer = 0.0;
  // (start, K) pairs where s >= f(T^{K q_n} x), left out of the bound check.
  std::uint64_t above_roof = 0;
  // Boundary-ambiguous flow evaluations (kept, not resolved).
  std::uint64_t ambiguous = 0;
  bool physical_bound_pass = true;
};

// Maxima over the start points for every K = 1..k_cap.
NearReturnScan near_return_scan(const std::vector<FlowPoint>& starts, const AnalyticRoof& f,
                                const ContinuedFraction& cf, std::size_t level, std::uint64_t k_cap,
                                double tol = 1e-9);

// Bases (i + 1/2) / bases with heights (j + 1/2) f(x) / heights.
std::vector<FlowPoint> start_grid(const AnalyticRoof& f, std::size_t bases, std::size_t heights);
// Bases 0.1, 0.3, 0.5, 0.7, 0.9 with heights f(x)/6, f(x)/2, 5f(x)/6.
std::vector<FlowPoint> default_start_grid(const AnalyticRoof& f);

}  // namespace primeorbit
