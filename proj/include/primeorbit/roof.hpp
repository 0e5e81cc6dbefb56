#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "primeorbit/turn.hpp"

namespace primeorbit {

struct DecayConstants {
  double C = 0.0;
  double c = 0.0;
};

// f(x) = a_0 + 2 Re sum_{k=1..K} a_k e^{2 pi i k x}, i.e. a finite Fourier
// series with a_{-k} = conj(a_k). Construction certifies positivity.
class AnalyticRoof {
 public:
  AnalyticRoof() = default;
  // coefficients[k] = a_k for k = 0..K; the imaginary part of a_0 must be 0.
  AnalyticRoof(std::vector<std::complex<double>> coefficients, DecayConstants decay);

  std::size_t kmax() const { return re_.size(); }
  double mean() const { return a0_; }
  std::complex<double> coefficient(long k) const;
  const DecayConstants& decay() const { return decay_; }

  // Certified lower bound for min f: a_0 - sum_{k != 0} |a_k|, rounded down.
  double min_bound() const { return min_bound_; }
  // Certified upper bound for max f.
  double max_bound() const { return max_bound_; }
  // 2 pi sum_{k != 0} |k| |a_k|.
  double lipschitz() const { return lipschitz_; }
  // sum_{k != 0} |a_k|
  double abs_sum() const { return abs_sum_; }
  // Bound on |computed f(x) - f(x)| for the evaluation kernels at a given x.
  double eval_error() const { return eval_error_; }

  double operator()(double x) const;
  double operator()(Turn x) const { return (*this)(x.to_double()); }
  // out[i] = f(x[i]) through the active kernels.
  void evaluate(const double* x, double* out, std::size_t n) const;
  // out[i] = f(x[i]) - a_0.
  void oscillation(const double* x, double* out, std::size_t n) const;

  const std::vector<double>& re() const { return re_; }
  const std::vector<double>& im() const { return im_; }

  bool is_constant() const { return abs_sum_ == 0.0; }

 private:
  double a0_ = 1.0;
  std::vector<double> re_;
  std::vector<double> im_;
  DecayConstants decay_;
  double min_bound_ = 1.0;
  double max_bound_ = 1.0;
  double lipschitz_ = 0.0;
  double abs_sum_ = 0.0;
  double eval_error_ = 0.0;
};

AnalyticRoof constant_roof(double value);
// a_k = C e^{-c k} e^{i phase k}, k = 1..K.
AnalyticRoof geometric_roof(double a0, double C, double c, double phase, std::size_t K);
// The project default: a_0 = 1, C = 0.3, c = 1, phase 0.7, K = 32.
AnalyticRoof default_roof();

// Divides every coefficient (and C) by a_0.
AnalyticRoof normalize_roof(const AnalyticRoof& f);

nlohmann::json roof_to_json(const AnalyticRoof& f);
AnalyticRoof roof_from_json(const nlohmann::json& j);

}  // namespace primeorbit
