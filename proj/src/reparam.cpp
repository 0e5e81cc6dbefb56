#include "primeorbit/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "primeorbit/error.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "special_flow";

}  // namespace

Torus2Function::Torus2Function(double mean, std::vector<TorusMode> modes) : mean_(mean), modes_(std::move(modes)) {
  double s = 0.0;
  for (const auto& md : modes_) {
    if (md.m == 0 && md.n == 0) throw Error(ErrorKind::InvalidArgument, kModule, "mode (0, 0) is the mean");
    s += 2.0 * std::abs(md.c);
  }
  min_bound_ = mean_ - s * (1 + 1e-14);
  if (!(min_bound_ > 0)) {
    throw Error(ErrorKind::Positivity, kModule, "reparametrization speed is not certified positive");
  }
}

double Torus2Function::operator()(double x, double y) const {
  double v = mean_;
  for (const auto& md : modes_) {
    double ang = 2 * M_PI * (md.m * x + md.n * y);
    v += 2.0 * (md.c.real() * std::cos(ang) - md.c.imag() * std::sin(ang));
  }
  return v;
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = 0.5 * (1.0 - z);
    nodes[n - 1 - i] = 0.5 * (1.0 + z);
    weights[i] = weights[n - 1 - i] = 0.5 * w;
  }
}

double crossing_time(const Torus2Function& r, double alpha, double x, std::size_t nodes) {
  std::vector<double> y, w;
  gauss_legendre(nodes, y, w);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) s += w[i] / r(x + alpha * y[i], y[i]);
  return s;
}

ReparamResult roof_from_reparam(const Torus2Function& r, Turn alpha, const ReparamOptions& opts) {
  if (opts.quadrature_nodes < 64) throw Error(ErrorKind::InvalidArgument, kModule, "need at least 64 quadrature nodes");
  if (opts.harmonics == 0) throw Error(ErrorKind::InvalidArgument, kModule, "need at least one harmonic");
  const double a = alpha.to_double();
  const std::size_t K = opts.harmonics;
  const std::size_t M = 4 * K;
  std::vector<double> xs(M), fx(M);
  for (std::size_t j = 0; j < M; ++j) xs[j] = static_cast<double>(j) / static_cast<double>(M);

  ReparamResult out{constant_roof(1.0)};
  std::size_t nodes = opts.quadrature_nodes;
  for (std::size_t j = 0; j < M; ++j) fx[j] = crossing_time(r, a, xs[j], nodes);
  for (;;) {
    if (2 * nodes > opts.max_nodes) {
      throw Error(ErrorKind::Quadrature, kModule, "crossing-time quadrature did not settle under node doubling");
    }
    double change = 0.0;
    std::vector<double> finer(M);
    for (std::size_t j = 0; j < M; ++j) {
      finer[j] = crossing_time(r, a, xs[j], 2 * nodes);
      change = std::max(change, std::abs(finer[j] - fx[j]));
    }
    fx.swap(finer);
    nodes *= 2;
    if (change <= opts.tol) {
      out.quadrature_change = change;
      break;
    }
  }
  out.nodes_used = nodes;

  std::vector<std::complex<double>> coef(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      double ang = -2 * M_PI * static_cast<double>((k * j) % M) / static_cast<double>(M);
      s += fx[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    coef[k] = s / static_cast<double>(M);
  }
  coef[0] = coef[0].real();
  double scale = opts.normalize ? coef[0].real() : 1.0;
  for (auto& c : coef) c /= scale;
  out.scale = scale;

  // Coefficients at rounding level carry no information and would spoil the fit.
  double floor_level = 1e-14 * std::abs(coef[0]);
  std::vector<double> ks, logs;
  for (std::size_t k = 1; k <= K; ++k) {
    if (std::abs(coef[k]) < floor_level) {
      if (coef[k] != 0.0) ++out.dropped;
      coef[k] = 0.0;
    } else {
      ks.push_back(static_cast<double>(k));
      logs.push_back(std::log(std::abs(coef[k])));
    }
  }
  DecayConstants decay{0.0, 1.0};
  if (!ks.empty()) {
    double c = 1.0;
    if (ks.size() >= 2) {
      double mk = 0, ml = 0;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        mk += ks[i];
        ml += logs[i];
      }
      mk /= static_cast<double>(ks.size());
      ml /= static_cast<double>(ks.size());
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        sxy += (ks[i] - mk) * (logs[i] - ml);
        sxx += (ks[i] - mk) * (ks[i] - mk);
      }
      c = -sxy / sxx;
    }
    if (!(c > 0)) throw Error(ErrorKind::FitFailure, kModule, "fitted roof coefficients do not decay");
    double logC = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ks.size(); ++i) logC = std::max(logC, logs[i] + c * ks[i]);
    decay = {std::exp(logC) * (1 + 1e-12), c};
  }
  out.roof = AnalyticRoof(std::move(coef), decay);
  return out;
}

}  // namespace primeorbit
