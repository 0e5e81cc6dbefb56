#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "primeorbit/continued_fraction.hpp"
#include "primeorbit/primes.hpp"
#include "primeorbit/roof.hpp"
#include "primeorbit/special_flow.hpp"

namespace primeorbit {

using cplx = std::complex<double>;

enum class TestKind { One, Character, Height, SmoothBox };

struct TestFunction {
  std::string name;
  TestKind kind = TestKind::One;
  int frequency = 0;
  double offset = 0.0;
  // Smoothed box [x0, x1] x [s0, s1] with transition half-width w.
  double x0 = 0, x1 = 0, s0 = 0, s1 = 0, w = 0;
  cplx target;

  cplx operator()(double x, double s) const;
  bool constant() const { return kind == TestKind::One; }
};

// 1/2 (1 + t/w + sin(pi t / w) / pi) on [-w, w], 0 below, 1 above.
double smooth_step(double t, double w);

// g = 1, e^{2 pi i x}, e^{4 pi i x}, s - int s dnu, and a smoothed box, with
// targets int g dnu for the normalized roof f.
std::vector<TestFunction> default_test_set(const AnalyticRoof& f);

// int over {0 <= s < f(x)} of the box, by Gauss-Legendre with node doubling.
double smooth_box_integral(const TestFunction& box, const AnalyticRoof& f);

using Averages = std::vector<cplx>;

Averages prime_orbit_average(const FlowPoint& p0, const AnalyticRoof& f, const ContinuedFraction& cf,
                             const PrimeTable& table, std::uint64_t horizon, const std::vector<TestFunction>& g);
Averages residue_class_average(const FlowPoint& p0, const AnalyticRoof& f, const ContinuedFraction& cf,
                               std::size_t level, const std::vector<TestFunction>& g);
Averages integer_orbit_average(const FlowPoint& p0, const AnalyticRoof& f, const ContinuedFraction& cf,
                               std::uint64_t M, const std::vector<TestFunction>& g);

// Boxes have corners on a 16 x 16 lattice over [0, 1] x [0, m_f].
constexpr int kDiscrepancyCells = 16;
using CellCounts = std::array<std::array<std::uint64_t, kDiscrepancyCells>, kDiscrepancyCells>;

void add_to_cells(CellCounts& cells, double x, double s, double m_f);
double discrepancy_from_cells(const CellCounts& cells, std::uint64_t total, double m_f);
double box_discrepancy(const std::vector<FlowPoint>& points, const AnalyticRoof& f);

struct ExperimentConfig {
  std::size_t level_lo = 2;
  std::size_t level_hi = 6;
  double d = 0.3;
  std::uint64_t max_horizon = 10000000;
  double tol = 1e-12;
  unsigned workers = 1;
  std::vector<FlowPoint> starts;
  std::vector<TestFunction> tests;
};

struct StartRecord {
  double x = 0.0;
  double s = 0.0;
  Averages prime_avg;
  Averages residue_avg;
  Averages integer_avg;
  double discrepancy = 0.0;
  // |sum over residue classes of class sums - total prime sum|, per test.
  std::vector<double> decomposition_residual;
};

struct TestSummary {
  std::string name;
  cplx target;
  double prime_residue = 0.0;
  double residue_target = 0.0;
  double prime_target = 0.0;
  double integer_target = 0.0;
};

struct ExperimentReport {
  std::size_t level = 0;
  std::uint64_t q_n = 0;
  std::uint64_t k_n = 0;
  std::uint64_t horizon = 0;
  bool capped = false;
  std::uint64_t prime_count = 0;
  // Primes <= horizon in the class 0 mod q_n (at most q_n itself).
  std::uint64_t class_zero_primes = 0;
  std::vector<std::uint64_t> class_counts;
  std::vector<StartRecord> starts;
  std::vector<TestSummary> worst;
  double worst_discrepancy = 0.0;
  double worst_decomposition_residual = 0.0;
  // Set when the level could not be run; the other fields are then empty.
  std::string error;
};

struct ExperimentResult {
  std::vector<ExperimentReport> levels;
  std::uint64_t ambiguous = 0;
  double m_f = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const AnalyticRoof& f, const ContinuedFraction& cf,
                                const PrimeTable& table);

// Largest horizon the configuration will visit; the prime table must reach it.
std::uint64_t experiment_max_horizon(const ExperimentConfig& config, const ContinuedFraction& cf);

struct TrendSummary {
  // Consecutive level pairs where both worst gaps shrink for every
  // nonconstant test function.
  std::vector<std::pair<std::size_t, std::size_t>> improving_pairs;
  bool constant_gaps_zero = true;
  // |prime_avg - target| at the last level below that at the first level,
  // for every nonconstant test function.
  bool last_below_first = false;
  bool pass = false;
};

TrendSummary trend_summary(const ExperimentResult& result);

nlohmann::json experiment_to_json(const ExperimentResult& result, const ExperimentConfig& config);

}  // namespace primeorbit
