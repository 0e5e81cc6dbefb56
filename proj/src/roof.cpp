#include "primeorbit/roof.hpp"

#include <cmath>
#include <limits>

#include "primeorbit/error.hpp"
#include "primeorbit/kernels.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "character_sums";
constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

AnalyticRoof::AnalyticRoof(std::vector<std::complex<double>> coefficients, DecayConstants decay)
    : decay_(decay) {
  if (coefficients.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "roof needs a_0");
  if (coefficients[0].imag() != 0.0) {
    throw Error(ErrorKind::InvalidArgument, kModule, "a_0 must be real for a real roof");
  }
  a0_ = coefficients[0].real();
  double weighted = 0.0;
  for (std::size_t k = 1; k < coefficients.size(); ++k) {
    const auto& a = coefficients[k];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw Error(ErrorKind::InvalidArgument, kModule, "non-finite roof coefficient");
    }
    double mag = std::abs(a);
    double cap = decay.C * std::exp(-decay.c * static_cast<double>(k));
    if (mag > cap * (1 + 1e-12) + 1e-300) {
      throw Error(ErrorKind::Validation, kModule,
                  "coefficient a_" + std::to_string(k) + " violates the declared decay bound");
    }
    re_.push_back(a.real());
    im_.push_back(a.imag());
    abs_sum_ += 2.0 * mag;
    weighted += 2.0 * static_cast<double>(k) * mag;
  }
  double K = static_cast<double>(re_.size());
  // Slack covers rounding in the sums themselves.
  double slack = 4.0 * (K + 2.0) * kEps * (std::abs(a0_) + abs_sum_);
  min_bound_ = a0_ - abs_sum_ - slack;
  max_bound_ = a0_ + abs_sum_ + slack;
  lipschitz_ = 2.0 * M_PI * weighted * (1 + 4 * kEps);
  // Angle-doubling recurrence error grows like k * eps per harmonic, plus
  // summation error.
  eval_error_ = kEps * (8.0 * weighted / 2.0 + 4.0 * (K + 2.0) * (abs_sum_ + std::abs(a0_)));
  if (!(min_bound_ > 0.0)) {
    throw Error(ErrorKind::Positivity, kModule,
                "roof positivity not certified: a_0 - sum |a_k| = " + std::to_string(a0_ - abs_sum_));
  }
}

std::complex<double> AnalyticRoof::coefficient(long k) const {
  if (k == 0) return a0_;
  std::size_t m = static_cast<std::size_t>(k < 0 ? -k : k);
  if (m > re_.size()) return 0.0;
  std::complex<double> a(re_[m - 1], im_[m - 1]);
  return k < 0 ? std::conj(a) : a;
}

double AnalyticRoof::operator()(double x) const {
  double out;
  evaluate(&x, &out, 1);
  return out;
}

void AnalyticRoof::oscillation(const double* x, double* out, std::size_t n) const {
  if (re_.empty()) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  active_kernels().roof_oscillation(re_.data(), im_.data(), re_.size(), x, out, n);
}

void AnalyticRoof::evaluate(const double* x, double* out, std::size_t n) const {
  oscillation(x, out, n);
  for (std::size_t i = 0; i < n; ++i) out[i] += a0_;
}

AnalyticRoof constant_roof(double value) {
  return AnalyticRoof({std::complex<double>(value, 0.0)}, DecayConstants{0.0, 1.0});
}

AnalyticRoof geometric_roof(double a0, double C, double c, double phase, std::size_t K) {
  std::vector<std::complex<double>> a(K + 1);
  a[0] = a0;
  for (std::size_t k = 1; k <= K; ++k) {
    double kd = static_cast<double>(k);
    a[k] = std::polar(C * std::exp(-c * kd), phase * kd);
  }
  // Polar rounding can push |a_k| a hair over C e^{-ck}.
  return AnalyticRoof(std::move(a), DecayConstants{C * (1 + 1e-13), c});
}

AnalyticRoof default_roof() { return geometric_roof(1.0, 0.3, 1.0, 0.7, 32); }

AnalyticRoof normalize_roof(const AnalyticRoof& f) {
  double a0 = f.mean();
  if (!(a0 > 0)) throw Error(ErrorKind::Domain, kModule, "cannot normalize a roof with a_0 <= 0");
  if (a0 == 1.0) return f;
  std::vector<std::complex<double>> a(f.kmax() + 1);
  a[0] = 1.0;
  for (std::size_t k = 1; k <= f.kmax(); ++k) a[k] = f.coefficient(static_cast<long>(k)) / a0;
  DecayConstants d = f.decay();
  d.C = d.C / a0 * (1 + 4 * kEps);
  return AnalyticRoof(std::move(a), d);
}

nlohmann::json roof_to_json(const AnalyticRoof& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  long K = static_cast<long>(f.kmax());
  for (long k = -K; k <= K; ++k) {
    auto a = f.coefficient(k);
    coeffs.push_back({k, a.real(), a.imag()});
  }
  return {{"kmax", K},
          {"coefficients", coeffs},
          {"decay", {{"C", f.decay().C}, {"c", f.decay().c}}},
          {"mean", f.mean()},
          {"min_bound", f.min_bound()},
          {"lipschitz", f.lipschitz()}};
}

AnalyticRoof roof_from_json(const nlohmann::json& j) {
  if (!j.contains("coefficients") || !j["coefficients"].is_array()) {
    throw Error(ErrorKind::Parse, kModule, "roof document has no coefficient array");
  }
  long K = 0;
  for (const auto& t : j["coefficients"]) {
    if (!t.is_array() || t.size() != 3) {
      throw Error(ErrorKind::Parse, kModule, "coefficients must be [k, re, im] triples");
    }
    K = std::max(K, std::abs(t[0].get<long>()));
  }
  std::vector<std::complex<double>> pos(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<std::complex<double>> neg(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<int> seen_pos(pos.size(), 0), seen_neg(pos.size(), 0);
  for (const auto& t : j["coefficients"]) {
    long k = t[0].get<long>();
    std::complex<double> a(t[1].get<double>(), t[2].get<double>());
    if (k >= 0) {
      pos[static_cast<std::size_t>(k)] = a;
      seen_pos[static_cast<std::size_t>(k)] = 1;
    } else {
      neg[static_cast<std::size_t>(-k)] = a;
      seen_neg[static_cast<std::size_t>(-k)] = 1;
    }
  }
  for (std::size_t k = 1; k < pos.size(); ++k) {
    if (seen_pos[k] && seen_neg[k] && std::abs(neg[k] - std::conj(pos[k])) > 1e-15 * (1 + std::abs(pos[k]))) {
      throw Error(ErrorKind::Validation, kModule,
                  "coefficients of k = " + std::to_string(k) + " and -k are not conjugate");
    }
    if (!seen_pos[k] && seen_neg[k]) pos[k] = std::conj(neg[k]);
  }
  DecayConstants d;
  if (j.contains("decay")) {
    d.C = j["decay"].value("C", 0.0);
    d.c = j["decay"].value("c", 0.0);
  }
  return AnalyticRoof(std::move(pos), d);
}

}  // namespace primeorbit
