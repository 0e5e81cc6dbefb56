#include "primeorbit/special_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "primeorbit/character_sums.hpp"
#include "primeorbit/error.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "special_flow";
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kSamples = 257;
constexpr int kPairSamples = 129;
constexpr double kInvPhi = 0.6180339887498949;

double circ(double a) {
  double d = a - std::floor(a);
  return std::min(d, 1.0 - d);
}

struct Minimum {
  double x;
  double value;
};

template <class F>
Minimum golden_min(F&& h, double lo, double hi, int iters = 80) {
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = h(c), fd = h(d);
  for (int i = 0; i < iters && b - a > 1e-15; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = h(d);
    }
  }
  return fc < fd ? Minimum{c, fc} : Minimum{d, fd};
}

}  // namespace

FlowPoint make_flow_point(Turn base, double height, const AnalyticRoof& f) {
  if (!(height >= 0.0) || !(height < f(base))) {
    throw Error(ErrorKind::Domain, kModule, "height must lie in [0, f(x))");
  }
  return {base, height};
}

FlowCursor::FlowCursor(const AnalyticRoof& f, FlowPoint start, const AlphaApprox& alpha, double x_error,
                       double tol, BoundaryPolicy policy, std::uint64_t step_budget)
    : f_(f),
      start_(start),
      alpha_(alpha),
      x_error_(x_error),
      tol_(tol),
      policy_(policy),
      step_budget_(step_budget),
      base_(start.base) {
  if (!(start.height >= 0.0)) throw Error(ErrorKind::Domain, kModule, "negative starting height");
}

double FlowCursor::dev_at(std::uint64_t j) {
  if (j < buf_start_ || j >= buf_start_ + buf_len_) {
    buf_start_ = j;
    buf_len_ = kBlock;
    orbit_positions(start_.base, alpha_.alpha, j, kBlock, pos_.data());
    f_.oscillation(pos_.data(), buf_.data(), kBlock);
  }
  return buf_[j - buf_start_];
}

double FlowCursor::roof_here() { return f_.mean() + dev_at(n_); }

double FlowCursor::boundary_tolerance(double t) const {
  double sum_err = birkhoff_error_bound(f_, x_error_, alpha_, n_ + 1);
  double arith = 8 * kEps * (std::abs(t) + start_.height + static_cast<double>(n_ + 1) * f_.max_bound());
  return sum_err + arith + tol_;
}

FlowResult FlowCursor::advance_to(double t) {
  if (!(t >= last_t_)) throw Error(ErrorKind::InvalidArgument, kModule, "flow cursor times must not decrease");
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, kModule, "flow time must be finite");
  last_t_ = t;
  const double a0 = f_.mean();
  auto height = [&] { return std::fma(-static_cast<double>(n_), a0, t) + start_.height - dev_.value(); };
  double r = height();
  double top = roof_here();
  while (r >= top) {
    if (n_ >= step_budget_) {
      throw Error(ErrorKind::Budget, kModule,
                  "flow needs more than " + std::to_string(step_budget_) + " base steps");
    }
    dev_.add(top - a0);
    ++n_;
    base_ += alpha_.alpha;
    r = height();
    top = roof_here();
  }
  double eps_b = boundary_tolerance(t);
  double margin = top - r;
  if (n_ > 0) margin = std::min(margin, r);
  last_margin_ = margin;
  if (margin < eps_b) {
    if (policy_ == BoundaryPolicy::Throw) throw AmbiguousBoundaryError(n_, margin, eps_b);
    ++ambiguous_;
  }
  FlowResult out;
  out.point = {base_, std::max(r, 0.0)};
  out.step = {n_, out.point.height, eps_b - tol_};
  return out;
}

FlowResult flow_time_t(const FlowPoint& p, double t, const AnalyticRoof& f, const AlphaApprox& alpha, double tol,
                       std::uint64_t step_budget) {
  if (!(t >= 0)) throw Error(ErrorKind::InvalidArgument, kModule, "flow time must be nonnegative");
  if (t + p.height > static_cast<double>(step_budget) * f.min_bound() + f.max_bound()) {
    throw Error(ErrorKind::Budget, kModule, "flow time exceeds step budget times the roof minimum");
  }
  if (t == 0.0) return {p, {0, p.height, 0.0}};
  FlowCursor c(f, p, alpha, kTurnRoundingError, tol, BoundaryPolicy::Throw, step_budget);
  return c.advance_to(t);
}

FlowResult flow_time_t(const FlowPoint& p, double t, const AnalyticRoof& f, const ContinuedFraction& cf,
                       double tol, std::uint64_t step_budget) {
  return flow_time_t(p, t, f, AlphaApprox::from_cf(cf), tol, step_budget);
}

double chart_distance(const FlowPoint& p, const FlowPoint& q) {
  return std::max(circle_distance(p.base, q.base), std::abs(p.height - q.height));
}

FlowMetric::FlowMetric(const AnalyticRoof& f, Turn alpha)
    : f_(f), alpha_(alpha.to_double()), cap_(f.min_bound()) {}

double FlowMetric::through_roof(const FlowPoint& p, const FlowPoint& q, double bound) const {
  // Every path through the roof climbs at least to f(y) - s_p and starts at s_q.
  if (q.height >= bound) return bound;
  const double xp = p.base.to_double();
  const double xq = q.base.to_double();
  auto h_with = [&](double y, double fy) {
    return std::max(circ(xp - y), std::abs(p.height - fy)) + std::max(circ(y + alpha_ - xq), q.height);
  };
  auto h = [&](double y) { return h_with(y, f_(y - std::floor(y))); };
  std::array<double, kSamples> ys, fs;
  for (int i = 0; i < kSamples; ++i) {
    double y = xp + bound * (2.0 * i / (kSamples - 1) - 1.0);
    ys[i] = y - std::floor(y);
  }
  f_.evaluate(ys.data(), fs.data(), kSamples);
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    double v = h_with(ys[i], fs[i]);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double step = 2.0 * bound / (kSamples - 1);
  double centre = xp + bound * (2.0 * best / (kSamples - 1) - 1.0);
  best_v = std::min(best_v, golden_min(h, centre - step, centre + step).value);
  return std::min(best_v, bound);
}

double FlowMetric::along_roof(const FlowPoint& p, const FlowPoint& q, double bound) const {
  const double xp = p.base.to_double();
  const double xq = q.base.to_double();
  // Both ends must sit within bound of the roof.
  if (p.height + bound < f_.min_bound() || q.height + bound < f_.min_bound()) return bound;
  auto a_of = [&](const FlowPoint& z, double xz, double y) {
    double yy = y - std::floor(y);
    return std::max(circ(xz - yy), std::abs(z.height - f_(yy)));
  };
  std::array<double, kPairSamples> yp, yq, fp, fq;
  for (int i = 0; i < kPairSamples; ++i) {
    double u = bound * (2.0 * i / (kPairSamples - 1) - 1.0);
    yp[i] = xp + u - std::floor(xp + u);
    yq[i] = xq + u - std::floor(xq + u);
  }
  f_.evaluate(yp.data(), fp.data(), kPairSamples);
  f_.evaluate(yq.data(), fq.data(), kPairSamples);
  std::array<double, kPairSamples> ap, aq;
  for (int i = 0; i < kPairSamples; ++i) {
    ap[i] = std::max(circ(xp - yp[i]), std::abs(p.height - fp[i]));
    aq[i] = std::max(circ(xq - yq[i]), std::abs(q.height - fq[i]));
  }
  double best_v = std::numeric_limits<double>::infinity();
  int bi = 0, bj = 0;
  for (int i = 0; i < kPairSamples; ++i) {
    if (ap[i] >= best_v) continue;
    for (int j = 0; j < kPairSamples; ++j) {
      double v = ap[i] + circ(yp[i] - yq[j]) + aq[j];
      if (v < best_v) {
        best_v = v;
        bi = i;
        bj = j;
      }
    }
  }
  double step = 2.0 * bound / (kPairSamples - 1);
  double y1 = xp + bound * (2.0 * bi / (kPairSamples - 1) - 1.0);
  double y2 = xq + bound * (2.0 * bj / (kPairSamples - 1) - 1.0);
  // Alternate one-dimensional refinements.
  for (int round = 0; round < 4; ++round) {
    Minimum m1 = golden_min([&](double y) { return a_of(p, xp, y) + circ(y - y2); }, y1 - step, y1 + step);
    y1 = m1.x;
    Minimum m2 = golden_min([&](double y) { return circ(y1 - y) + a_of(q, xq, y); }, y2 - step, y2 + step);
    y2 = m2.x;
    best_v = std::min(best_v, a_of(p, xp, y1) + m2.value);
  }
  return std::min(best_v, bound);
}

double FlowMetric::operator()(const FlowPoint& p, const FlowPoint& q) const {
  double best = std::min(cap_, chart_distance(p, q));
  if (best == 0.0) return 0.0;
  best = through_roof(p, q, best);
  best = through_roof(q, p, best);
  best = along_roof(p, q, best);
  return best;
}

NearReturn near_return_check(const FlowPoint& p, const AnalyticRoof& f, const ContinuedFraction& cf,
                             std::size_t level, std::uint64_t K, double tol) {
  NearReturn r;
  if (K == 0) return r;
  auto scan = near_return_scan({p}, f, cf, level, K, tol);
  r.d_physical = scan.rows.back().d_physical;
  r.d_integer = scan.rows.back().d_integer;
  return r;
}

NearReturnScan near_return_scan(const std::vector<FlowPoint>& starts, const AnalyticRoof& f,
                                const ContinuedFraction& cf, std::size_t level, std::uint64_t k_cap, double tol) {
  if (f.mean() != 1.0) throw Error(ErrorKind::Domain, kModule, "near-return checks need a normalized roof");
  if (!cf.q(level).fits_ulong_p()) throw Error(ErrorKind::Budget, kModule, "q_n too large for the step budget");
  std::uint64_t qn = cf.q(level).get_ui();
  AlphaApprox a = AlphaApprox::from_cf(cf);
  FlowMetric metric(f, a.alpha);
  NearReturnScan scan;
  scan.level = level;
  scan.k_cap = k_cap;
  scan.rows.resize(k_cap);
  double qnext = cf.q(level + 1).get_d();
  for (std::uint64_t K = 1; K <= k_cap; ++K) {
    scan.rows[K - 1].K = K;
    scan.rows[K - 1].physical_bound = static_cast<double>(K) / qnext;
  }
  Turn step = a.alpha.times_unsigned(qn);
  for (const auto& p : starts) {
    FlowCursor integer(f, p, a, kTurnRoundingError, tol, BoundaryPolicy::Count, ~0ull);
    FlowCursor physical(f, p, a, kTurnRoundingError, tol, BoundaryPolicy::Count, ~0ull);
    Turn y = p.base;
    double cum = 0.0;
    for (std::uint64_t K = 1; K <= k_cap; ++K) {
      cum += birkhoff_deviation(f, y, kTurnRoundingError, a, qn).value;
      y += step;
      double kq = static_cast<double>(K * qn);
      FlowResult phys = physical.advance_to(kq + cum);
      FlowResult inte = integer.advance_to(kq);
      auto& row = scan.rows[K - 1];
      double dp = metric(phys.point, p);
      row.d_physical = std::max(row.d_physical, dp);
      row.d_integer = std::max(row.d_integer, metric(inte.point, p));
      if (p.height < f(y) - tol) {
        row.d_physical_below_roof = std::max(row.d_physical_below_roof, dp);
      } else {
        ++scan.above_roof;
      }
    }
    scan.ambiguous += integer.ambiguous() + physical.ambiguous();
  }
  for (const auto& row : scan.rows) {
    scan.max_physical = std::max(scan.max_physical, row.d_physical);
    scan.max_integer = std::max(scan.max_integer, row.d_integer);
    if (row.d_physical_below_roof > row.physical_bound + 10 * tol) scan.physical_bound_pass = false;
  }
  return scan;
}

std::vector<FlowPoint> start_grid(const AnalyticRoof& f, std::size_t bases, std::size_t heights) {
  std::vector<FlowPoint> out;
  for (std::size_t i = 0; i < bases; ++i) {
    Turn b = Turn::from_double((i + 0.5) / static_cast<double>(bases));
    double fx = f(b);
    for (std::size_t j = 0; j < heights; ++j) out.push_back({b, (j + 0.5) / static_cast<double>(heights) * fx});
  }
  return out;
}

std::vector<FlowPoint> default_start_grid(const AnalyticRoof& f) { return start_grid(f, 5, 3); }

}  // namespace primeorbit
