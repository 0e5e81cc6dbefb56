#include "primeorbit/character_sums.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "primeorbit/error.hpp"
#include "primeorbit/kernels.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "character_sums";
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kBlock = 512;

// Lower bound for a nonnegative rational; mpq_get_d truncates.
double lower_double(const mpq_class& v) { return v.get_d(); }

// sin(pi y) e^{i pi y} = (1 - e^{2 pi i y}) / (-2i), which is 1-periodic in y.
std::complex<double> half_chord(double y) {
  double s = std::sin(M_PI * y);
  return {s * std::cos(M_PI * y), s * s};
}

Turn signed_times(Turn t, std::int64_t k, std::uint64_t n) {
  Turn r = t.times_unsigned(static_cast<u128>(k < 0 ? -static_cast<__int128>(k) : k) * n);
  return k < 0 ? -r : r;
}

}  // namespace

std::vector<CirclePoint> uniform_grid(std::size_t size) {
  if (size == 0) throw Error(ErrorKind::InvalidArgument, kModule, "grid must be nonempty");
  std::vector<CirclePoint> g;
  g.reserve(size);
  for (std::size_t j = 0; j < size; ++j) {
    mpq_class v(static_cast<unsigned long>(j), static_cast<unsigned long>(size));
    v.canonicalize();
    g.emplace_back(v);
  }
  return g;
}

std::complex<double> char_sum_closed_form(std::int64_t k, const CirclePoint& x, const ContinuedFraction& cf,
                                          std::uint64_t n) {
  if (k == 0) return static_cast<double>(n);
  if (n == 0) return 0.0;
  RationalInterval dist = nearest_integer_distance(k, cf);
  if (lower_double(dist.lo) < 1e-12) {
    throw Error(ErrorKind::Precision, kModule, "||k alpha|| too close to 0 for a stable closed form");
  }
  AlphaApprox a = AlphaApprox::from_cf(cf);
  double phi = signed_times(a.alpha, k, 1).to_double();
  double psi = signed_times(a.alpha, k, n).to_double();
  double kx = signed_times(x.turn(), k, 1).to_double();
  std::complex<double> lead(std::cos(2 * M_PI * kx), std::sin(2 * M_PI * kx));
  return lead * half_chord(psi) / half_chord(phi);
}

std::complex<double> char_sum_direct(std::int64_t k, Turn x, Turn alpha, std::uint64_t n) {
  const KernelSet& ks = active_kernels();
  Turn kalpha = signed_times(alpha, k, 1);
  Turn p = signed_times(x, k, 1);
  std::array<double, kBlock> t;
  double re = 0.0, im = 0.0;
  for (std::uint64_t j = 0; j < n; j += kBlock) {
    std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, n - j));
    for (std::size_t i = 0; i < len; ++i) {
      t[i] = p.to_double();
      p += kalpha;
    }
    double br, bi;
    ks.character_sum(t.data(), len, &br, &bi);
    re += br;
    im += bi;
  }
  return {re, im};
}

std::complex<double> char_sum_direct(std::int64_t k, const CirclePoint& x, const ContinuedFraction& cf,
                                     std::uint64_t n) {
  return char_sum_direct(k, x.turn(), AlphaApprox::from_cf(cf).alpha, n);
}

Lemma4Row lemma4_bound_check(std::int64_t k, const std::vector<CirclePoint>& grid, const ContinuedFraction& cf,
                             std::size_t level) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, kModule, "character sum bound needs k != 0");
  if (level + 1 > cf.levels() + 1) {
    throw Error(ErrorKind::Precision, kModule, "continued fraction too shallow for level " + std::to_string(level));
  }
  Lemma4Row row;
  row.level = level;
  row.k = k;
  if (!cf.q(level).fits_ulong_p()) throw Error(ErrorKind::Budget, kModule, "q_n too large for direct summation");
  std::uint64_t qn = cf.q(level).get_ui();
  row.q_n = static_cast<double>(qn);
  AlphaApprox a = AlphaApprox::from_cf(cf);
  for (const auto& x : grid) {
    double s = std::abs(char_sum_direct(k, x.turn(), a.alpha, qn));
    row.max_abs = std::max(row.max_abs, s);
  }
  double ak = std::abs(static_cast<double>(k));
  double nd = row.q_n;
  double phase_err = ak * (kTurnRoundingError + nd * a.step_error) + kTurnToDoubleError;
  row.tol = nd * (2 * M_PI * phase_err + 8 * kEps) + nd * nd * kEps + 1e-12;
  row.norm_lo = lower_double(nearest_integer_distance(k, cf).lo);
  double qnext = cf.q(level + 1).get_d();
  double second = 4 * M_PI * ak / (row.norm_lo * qnext);
  double second_nok = 4 * M_PI / (row.norm_lo * qnext);
  row.bound = std::min(nd, second);
  row.bound_without_k = std::min(nd, second_nok);
  row.pass = row.max_abs <= row.bound + row.tol;
  row.pass_without_k = row.max_abs <= row.bound_without_k + row.tol;
  row.triangle_pass = row.max_abs <= nd + row.tol;
  return row;
}

std::vector<Lemma4Row> lemma4_table(const ContinuedFraction& cf, std::int64_t kmax, std::size_t level_lo,
                                    std::size_t level_hi, std::size_t grid_size) {
  auto grid = uniform_grid(grid_size);
  std::vector<Lemma4Row> rows;
  for (std::size_t n = level_lo; n <= level_hi; ++n) {
    for (std::int64_t k = -kmax; k <= kmax; ++k) {
      if (k == 0) continue;
      rows.push_back(lemma4_bound_check(k, grid, cf, n));
    }
  }
  return rows;
}

DeviationResult deviation_qn(const AnalyticRoof& f, const std::vector<CirclePoint>& grid,
                             const ContinuedFraction& cf, std::size_t level) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "grid must be nonempty");
  if (!cf.q(level).fits_ulong_p()) throw Error(ErrorKind::Budget, kModule, "q_n too large for direct summation");
  std::uint64_t qn = cf.q(level).get_ui();
  AlphaApprox a = AlphaApprox::from_cf(cf);
  DeviationResult r;
  r.level = level;
  r.q_n = static_cast<double>(qn);
  for (const auto& x : grid) {
    BirkhoffResult b = birkhoff_deviation(f, x.turn(), kTurnRoundingError, a, qn);
    double v = std::abs(b.value);
    if (v > r.sup) {
      r.sup = v;
      r.argmax = x.to_double();
    }
    r.error = std::max(r.error, b.error);
  }
  return r;
}

BoundFit fit_exponential_bound(const std::vector<double>& q, const std::vector<double>& deviations) {
  if (q.size() != deviations.size()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "levels and deviations differ in length");
  }
  if (q.size() < 2) throw Error(ErrorKind::InvalidArgument, kModule, "exponential fit needs at least two levels");
  bool decreasing = false;
  for (std::size_t i = 1; i < deviations.size(); ++i) {
    if (deviations[i] < deviations[i - 1]) decreasing = true;
  }
  if (!decreasing) {
    throw Error(ErrorKind::FitFailure, kModule, "deviations do not decrease; parameter regime too shallow");
  }
  BoundFit fit;
  fit.q = q;
  fit.lhs = deviations;
  std::size_t m = q.size();
  std::vector<double> ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    ly[i] = std::log(std::max(deviations[i], std::numeric_limits<double>::min()));
  }
  double mq = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mq += q[i];
    my += ly[i];
  }
  mq /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (q[i] - mq) * (ly[i] - my);
    sxx += (q[i] - mq) * (q[i] - mq);
  }
  if (sxx == 0) throw Error(ErrorKind::FitFailure, kModule, "all levels share the same q_n");
  fit.c_prime = -sxy / sxx;
  double logC = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) logC = std::max(logC, ly[i] + fit.c_prime * q[i]);
  // Inflate a hair so rounding cannot break the majorant.
  fit.C_prime = std::exp(logC) * (1 + 1e-12);
  fit.pass = fit.c_prime > 0;
  if (!fit.pass) throw Error(ErrorKind::FitFailure, kModule, "fitted decay rate c' is not positive");
  return fit;
}

std::uint64_t horizon_multiplier(const ContinuedFraction& cf, std::size_t level, double d, std::uint64_t cap) {
  DiophantineParams p{1.0, d, d};
  double bits = growth_threshold_log2(cf.q(level), p);
  if (bits > 63 || std::ldexp(1.0, static_cast<int>(std::max(0.0, bits))) > static_cast<double>(cap) * 2) {
    return cap;
  }
  mpz_class fl = growth_threshold_floor(cf.q(level), p, 64);
  std::uint64_t k = fl.get_ui();
  return std::min(k, cap);
}

std::vector<double> chained_deviations(const AnalyticRoof& f, const CirclePoint& x, const ContinuedFraction& cf,
                                       std::size_t level, std::uint64_t k_cap) {
  std::uint64_t qn = cf.q(level).get_ui();
  AlphaApprox a = AlphaApprox::from_cf(cf);
  Turn step = a.alpha.times_unsigned(qn);
  Turn y = x.turn();
  std::vector<double> out;
  double cum = 0.0;
  for (std::uint64_t K = 1; K <= k_cap; ++K) {
    cum += birkhoff_deviation(f, y, kTurnRoundingError, a, qn).value;
    out.push_back(cum);
    y += step;
  }
  return out;
}

UniformSupResult uniform_sup_check(const AnalyticRoof& f, const std::vector<CirclePoint>& grid,
                                   const ContinuedFraction& cf, std::size_t level, std::uint64_t k_cap,
                                   std::uint64_t step_budget) {
  if (!cf.q(level).fits_ulong_p()) throw Error(ErrorKind::Budget, kModule, "q_n too large for direct summation");
  std::uint64_t qn = cf.q(level).get_ui();
  if (k_cap > 0 && (static_cast<double>(k_cap) * static_cast<double>(qn) > static_cast<double>(step_budget))) {
    throw Error(ErrorKind::Budget, kModule,
                "K_cap * q_n = " + std::to_string(k_cap * qn) + " exceeds the orbit step budget");
  }
  UniformSupResult r;
  r.level = level;
  r.k_cap = k_cap;
  AlphaApprox a = AlphaApprox::from_cf(cf);
  Turn step = a.alpha.times_unsigned(qn);
  for (const auto& x : grid) {
    Turn y = x.turn();
    double cum = 0.0;
    for (std::uint64_t K = 1; K <= k_cap; ++K) {
      double dev = birkhoff_deviation(f, y, kTurnRoundingError, a, qn).value;
      r.orbit_deviation = std::max(r.orbit_deviation, std::abs(dev));
      cum += dev;
      r.sup = std::max(r.sup, std::abs(cum));
      y += step;
    }
  }
  r.grid_deviation = deviation_qn(f, grid, cf, level).sup;
  double kc = static_cast<double>(k_cap);
  r.chain_bound = kc * r.orbit_deviation;
  r.grid_chain_bound = kc * r.grid_deviation;
  r.pass = r.sup <= r.chain_bound + 1e-9;
  r.grid_pass = r.sup <= r.grid_chain_bound + 1e-9;
  return r;
}

}  // namespace primeorbit
