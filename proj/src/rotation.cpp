#include "primeorbit/rotation.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "primeorbit/error.hpp"
#include "primeorbit/summation.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "rotation_dynamics";
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kBlock = 512;

// Upper bound for a nonnegative rational as a double.
double upper_double(const mpq_class& v) {
  double d = v.get_d();
  return std::nextafter(d * (1 + 4 * kEps), std::numeric_limits<double>::infinity());
}

}  // namespace

mpq_class frac(const mpq_class& v) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return v - mpq_class(fl);
}

CirclePoint::CirclePoint(const mpq_class& v) : value_(frac(v)) { value_.canonicalize(); }

CirclePoint CirclePoint::parse(const std::string& text) {
  mpq_class v;
  auto slash = text.find('/');
  auto dot = text.find_first_of(".eE");
  if (slash == std::string::npos && dot != std::string::npos) {
    // Decimal input is taken at its exact double value.
    std::size_t used = 0;
    double d = std::stod(text, &used);
    if (used != text.size()) throw Error(ErrorKind::Parse, kModule, "malformed circle point '" + text + "'");
    v = d;
  } else if (v.set_str(text, 10) != 0 || v.get_den() == 0) {
    throw Error(ErrorKind::Parse, kModule, "malformed circle point '" + text + "'");
  }
  v.canonicalize();
  return CirclePoint(v);
}

RotateResult rotate_n_at_level(const CirclePoint& x, const ContinuedFraction& cf, std::int64_t n,
                               std::size_t level) {
  if (level > cf.levels()) throw Error(ErrorKind::Precision, kModule, "requested convergent beyond stored depth");
  mpz_class nz(std::to_string(n));
  mpq_class pq = cf.convergent(level);
  RotateResult r;
  r.point = CirclePoint(x.value() + mpq_class(nz) * pq);
  r.budget.steps = n;
  r.budget.approx_level = level;
  mpq_class b(abs(nz), cf.q(level) * cf.q(level + 1));
  b.canonicalize();
  r.budget.bound = b;
  return r;
}

RotateResult rotate_n(const CirclePoint& x, const ContinuedFraction& cf, std::int64_t n, double tol) {
  if (!(tol > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "tolerance must be positive");
  mpq_class t(tol);
  mpz_class an = abs(mpz_class(std::to_string(n)));
  for (std::size_t N = 0; N <= cf.levels(); ++N) {
    mpq_class b(an, cf.q(N) * cf.q(N + 1));
    if (b < t) return rotate_n_at_level(x, cf, n, N);
  }
  throw Error(ErrorKind::Precision, kModule,
              "no stored convergent gives " + std::to_string(n) + " steps within tolerance; deepen the continued fraction");
}

AlphaApprox AlphaApprox::from_cf(const ContinuedFraction& cf) {
  const RationalInterval& cyl = cf.cylinder();
  mpq_class mid = (cyl.lo + cyl.hi) / 2;
  AlphaApprox a;
  a.alpha = Turn::from_rational(mid);
  mpq_class half_width = cyl.width() / 2;
  mpq_class tiny(1, mpz_class(1) << 129);
  a.step_error = (half_width <= tiny ? 0x1p-129 : upper_double(half_width)) + kTurnRoundingError;
  return a;
}

void orbit_positions(Turn x, Turn alpha, std::uint64_t start, std::size_t count, double* out) {
  Turn p = x + alpha.times_unsigned(start);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = p.to_double();
    p += alpha;
  }
}

double birkhoff_error_bound(const AnalyticRoof& f, double x_error, const AlphaApprox& alpha, std::uint64_t n) {
  double nd = static_cast<double>(n);
  double per_term = f.lipschitz() * (x_error + kTurnToDoubleError) + f.eval_error();
  double drift = f.lipschitz() * alpha.step_error * nd * (nd - 1) / 2;
  double sum_err = 2 * kEps * nd * f.abs_sum();
  return (nd * per_term + drift + sum_err) * (1 + 1e-10);
}

BirkhoffResult birkhoff_deviation(const AnalyticRoof& f, Turn x, double x_error, const AlphaApprox& alpha,
                                  std::uint64_t n) {
  NeumaierSum acc;
  if (!f.is_constant()) {
    std::array<double, kBlock> pos, val;
    for (std::uint64_t j = 0; j < n; j += kBlock) {
      std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, n - j));
      orbit_positions(x, alpha.alpha, j, len, pos.data());
      f.oscillation(pos.data(), val.data(), len);
      for (std::size_t i = 0; i < len; ++i) acc.add(val[i]);
    }
  }
  return {acc.value(), birkhoff_error_bound(f, x_error, alpha, n)};
}

BirkhoffResult birkhoff_sum(const AnalyticRoof& f, Turn x, double x_error, const AlphaApprox& alpha,
                            std::uint64_t n, double tol) {
  BirkhoffResult dev = birkhoff_deviation(f, x, x_error, alpha, n);
  double nd = static_cast<double>(n);
  BirkhoffResult r;
  r.value = nd * f.mean() + dev.value;
  r.error = dev.error + 2 * kEps * std::abs(r.value);
  if (!(r.error < tol)) {
    throw Error(ErrorKind::Precision, kModule,
                "Birkhoff sum error bound " + std::to_string(r.error) + " exceeds tolerance " + std::to_string(tol));
  }
  return r;
}

BirkhoffResult birkhoff_sum(const AnalyticRoof& f, const CirclePoint& x, const ContinuedFraction& cf,
                            std::uint64_t n, double tol) {
  return birkhoff_sum(f, x.turn(), kTurnRoundingError, AlphaApprox::from_cf(cf), n, tol);
}

CocycleResult cocycle_check(const AnalyticRoof& f, const CirclePoint& x, const ContinuedFraction& cf,
                            std::uint64_t m, std::uint64_t n) {
  AlphaApprox a = AlphaApprox::from_cf(cf);
  Turn x0 = x.turn();
  Turn xm = x0 + a.alpha.times_unsigned(m);
  double xm_err = kTurnRoundingError + static_cast<double>(m) * a.step_error;
  BirkhoffResult smn = birkhoff_deviation(f, x0, kTurnRoundingError, a, m + n);
  BirkhoffResult sm = birkhoff_deviation(f, x0, kTurnRoundingError, a, m);
  BirkhoffResult sn = birkhoff_deviation(f, xm, xm_err, a, n);
  CocycleResult r;
  r.residual = std::abs(smn.value - sm.value - sn.value);
  r.tolerance = (smn.error + sm.error + sn.error) * (1 + 1e-12) + 4 * kEps * (std::abs(smn.value) + 1e-300);
  return r;
}

}  // namespace primeorbit
