#include "primeorbit/continued_fraction.hpp"

#include <cmath>
#include <limits>

#include <mpfr.h>

#include "primeorbit/error.hpp"
#include "primeorbit/primality.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "cf_construct";

// RAII wrapper so early returns cannot leak MPFR state.
struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

// log2 of c0 e^{delta q}, good to a few bits.
double threshold_log2(const mpz_class& q, const DiophantineParams& params) {
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, q.get_mpz_t());
  double qd = std::ldexp(mant, static_cast<int>(std::min<long>(exp2, 4000)));
  return params.delta * qd * 1.4426950408889634 + std::log2(params.c0);
}

// Lower and upper bounds for c0 e^{delta q} at the given precision.
void threshold_bounds(const mpz_class& q, const DiophantineParams& params, mpfr_t lo, mpfr_t hi) {
  Mpfr delta(64);
  mpfr_set_d(delta.v, params.delta, MPFR_RNDN);
  mpfr_mul_z(lo, delta.v, q.get_mpz_t(), MPFR_RNDD);
  mpfr_mul_z(hi, delta.v, q.get_mpz_t(), MPFR_RNDU);
  mpfr_exp(lo, lo, MPFR_RNDD);
  mpfr_exp(hi, hi, MPFR_RNDU);
  mpfr_mul_d(lo, lo, params.c0, MPFR_RNDD);
  mpfr_mul_d(hi, hi, params.c0, MPFR_RNDU);
}

mpfr_prec_t initial_precision(double log2_threshold, const mpz_class& q) {
  double bits = std::max(log2_threshold, 0.0) + 64.0;
  auto qbits = static_cast<double>(mpz_sizeinbase(q.get_mpz_t(), 2)) + 64.0;
  return static_cast<mpfr_prec_t>(std::max(bits, qbits));
}

// floor(c0 e^{delta q}) computed exactly by refining precision until the
// directed bounds share a floor.
mpz_class threshold_floor(const mpz_class& q, const DiophantineParams& params, unsigned max_bits) {
  double est = threshold_log2(q, params);
  if (!(est <= static_cast<double>(max_bits))) {
    throw Error(ErrorKind::Budget, kModule,
                "primality search ceiling reached: c0*e^(delta*q_n) needs about " +
                    std::to_string(static_cast<long long>(est)) + " bits, ceiling is " +
                    std::to_string(max_bits));
  }
  for (mpfr_prec_t prec = initial_precision(est, q); prec <= (1 << 20); prec *= 2) {
    Mpfr lo(prec), hi(prec);
    threshold_bounds(q, params, lo.v, hi.v);
    mpz_class flo, fhi;
    mpfr_get_z(flo.get_mpz_t(), lo.v, MPFR_RNDD);
    mpfr_get_z(fhi.get_mpz_t(), hi.v, MPFR_RNDD);
    if (flo == fhi) return flo;
  }
  throw Error(ErrorKind::Precision, kModule, "could not isolate floor of growth threshold");
}

mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

mpq_class abs_q(const mpq_class& v) { return v < 0 ? mpq_class(-v) : v; }

// Distance from v to the nearest integer.
mpq_class dist_to_int(const mpq_class& v) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  mpq_class frac = v - mpq_class(fl);
  mpq_class other = 1 - frac;
  return frac < other ? frac : other;
}

}  // namespace

void DiophantineParams::validate() const {
  if (!(c0 > 0) || !std::isfinite(c0)) throw Error(ErrorKind::Validation, kModule, "c0 must be positive");
  if (!(delta > 0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::Validation, kModule, "delta must be positive");
  }
  if (!(d > 0) || !(d < delta)) throw Error(ErrorKind::Validation, kModule, "d must satisfy 0 < d < delta");
}

const mpz_class& ContinuedFraction::a(std::size_t n) const {
  if (n < 1 || n > quotients_.size()) throw Error(ErrorKind::Domain, kModule, "quotient index out of range");
  return quotients_[n - 1];
}

const mpz_class& ContinuedFraction::p(std::size_t n) const {
  if (n >= p_.size()) throw Error(ErrorKind::Domain, kModule, "numerator index out of range");
  return p_[n];
}

const mpz_class& ContinuedFraction::q(std::size_t n) const {
  if (n >= q_.size()) throw Error(ErrorKind::Domain, kModule, "denominator index out of range");
  return q_[n];
}

mpq_class ContinuedFraction::convergent(std::size_t n) const {
  mpq_class r(p(n), q(n));
  r.canonicalize();
  return r;
}

ContinuedFraction convergents(const std::vector<mpz_class>& quotients) {
  if (quotients.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "empty quotient sequence");
  ContinuedFraction cf;
  cf.quotients_ = quotients;
  cf.p_ = {0, 1};
  cf.q_ = {1, 1};
  for (std::size_t i = 0; i < quotients.size(); ++i) {
    if (quotients[i] < 1) {
      throw Error(ErrorKind::InvalidArgument, kModule,
                  "partial quotient a_" + std::to_string(i + 1) + " must be positive");
    }
    std::size_t n = i + 1;
    cf.p_.push_back(quotients[i] * cf.p_[n] + cf.p_[n - 1]);
    cf.q_.push_back(quotients[i] * cf.q_[n] + cf.q_[n - 1]);
  }
  std::size_t N = quotients.size();
  mpq_class x = cf.convergent(N);
  mpq_class y = cf.convergent(N + 1);
  cf.interval_ = x < y ? RationalInterval{x, y} : RationalInterval{y, x};
  mpq_class med(cf.p_[N + 1] + cf.p_[N], cf.q_[N + 1] + cf.q_[N]);
  med.canonicalize();
  cf.cylinder_ = y < med ? RationalInterval{y, med} : RationalInterval{med, y};
  return cf;
}

ContinuedFraction convergents(const std::vector<std::uint64_t>& quotients) {
  std::vector<mpz_class> z;
  z.reserve(quotients.size());
  for (auto v : quotients) z.emplace_back(std::to_string(v));
  return convergents(z);
}

std::vector<int> parse_bits(const std::string& text) {
  std::vector<int> bits;
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(c - '0');
    } else {
      throw Error(ErrorKind::InvalidArgument, kModule, std::string("bit string may only contain 0 and 1, got '") + c + "'");
    }
  }
  return bits;
}

Construction construct_alpha_in_D(const DiophantineParams& params, const std::vector<int>& bits,
                                  std::size_t levels, const SearchLimits& limits) {
  if (levels < 1) throw Error(ErrorKind::InvalidArgument, kModule, "levels must be at least 1");
  if (bits.size() < levels) {
    throw Error(ErrorKind::InvalidArgument, kModule, "bit string shorter than the requested levels");
  }
  if (!(params.c0 > 0) || !(params.delta > 0)) {
    throw Error(ErrorKind::Validation, kModule, "c0 and delta must be positive");
  }
  Construction out;
  std::vector<mpz_class> quotients;
  std::vector<mpz_class> q = {1, 1};
  for (std::size_t n = 1; n <= levels; ++n) {
    const mpz_class& qn = q[n];
    const mpz_class& qm = q[n - 1];
    mpz_class need = threshold_floor(qn, params, limits.max_threshold_bits) + 1;
    mpz_class a = ceil_div(need - qm, qn);
    if (a < 1) a = 1;
    int wanted = bits[n - 1] ? 2 : 1;
    int found = 0;
    ConstructionLevel level;
    level.n = n;
    for (;;) {
      if (level.candidates_tested >= limits.max_candidates) {
        throw Error(ErrorKind::Budget, kModule,
                    "candidate budget exhausted at level " + std::to_string(n));
      }
      ++level.candidates_tested;
      mpz_class cand = a * qn + qm;
      PrimalityResult pr = is_prime(cand);
      if (pr.prime && ++found == wanted) {
        level.a = a;
        level.q_next = cand;
        level.deterministic = pr.deterministic;
        break;
      }
      ++a;
    }
    quotients.push_back(level.a);
    q.push_back(level.q_next);
    out.trace.push_back(level);
  }
  out.cf = convergents(quotients);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Undetermined: return "undetermined";
    case Verdict::NotApplicable: return "n/a";
  }
  return "?";
}

mpz_class growth_threshold_floor(const mpz_class& q, const DiophantineParams& params, unsigned max_bits) {
  return threshold_floor(q, params, max_bits);
}

double growth_threshold_log2(const mpz_class& q, const DiophantineParams& params) {
  return threshold_log2(q, params);
}

int compare_growth(const mpz_class& q_next, const mpz_class& q_n, const DiophantineParams& params,
                   unsigned max_bits) {
  double est = threshold_log2(q_n, params);
  double have = static_cast<double>(mpz_sizeinbase(q_next.get_mpz_t(), 2));
  if (est > have + 8) return -1;
  if (est > 1e7) return have > est + 8 ? 1 : 0;
  for (mpfr_prec_t prec = initial_precision(est, q_n); prec <= static_cast<mpfr_prec_t>(max_bits) * 64;
       prec *= 2) {
    Mpfr lo(prec), hi(prec);
    threshold_bounds(q_n, params, lo.v, hi.v);
    if (mpfr_cmp_z(hi.v, q_next.get_mpz_t()) <= 0) return 1;
    if (mpfr_cmp_z(lo.v, q_next.get_mpz_t()) > 0) return -1;
  }
  return 0;
}

bool DiophantineReport::all_pass() const {
  if (!determinant_ok) return false;
  for (const auto& l : levels) {
    for (Verdict v : {l.prime, l.growth, l.bracket}) {
      if (v == Verdict::Fail || v == Verdict::Undetermined) return false;
    }
  }
  return true;
}

DiophantineReport verify_diophantine(const ContinuedFraction& cf, const DiophantineParams& params,
                                     std::size_t from_level) {
  DiophantineReport rep;
  std::size_t N = cf.levels();
  for (std::size_t n = 1; n <= N + 1; ++n) {
    mpz_class det = cf.p(n) * cf.q(n - 1) - cf.q(n) * cf.p(n - 1);
    if (det != 1 && det != -1) rep.determinant_ok = false;
    if (n >= 2 && gcd(cf.q(n), cf.q(n - 1)) != 1) rep.determinant_ok = false;
  }
  const RationalInterval& cyl = cf.cylinder();
  for (std::size_t n = from_level; n <= N; ++n) {
    DiophantineLevelCheck c;
    c.n = n;
    if (n >= 2) {
      PrimalityResult pr = is_prime(cf.q(n));
      c.prime = pr.prime ? Verdict::Pass : Verdict::Fail;
      c.prime_deterministic = pr.deterministic;
    }
    if (n >= 1) {
      int g = compare_growth(cf.q(n + 1), cf.q(n), params);
      c.growth = g > 0 ? Verdict::Pass : g < 0 ? Verdict::Fail : Verdict::Undetermined;
    }
    double lg = std::log(cf.q(n + 1).get_d()) - std::log(params.c0) - params.delta * cf.q(n).get_d();
    c.growth_ratio = std::exp(lg);

    mpq_class lower(1, 2 * cf.q(n + 1));
    mpq_class upper(1, cf.q(n + 1));
    lower.canonicalize();
    upper.canonicalize();
    int inside = 0;
    int outside = 0;
    for (const mpq_class& x : {cyl.lo, cyl.hi}) {
      mpq_class v = abs_q(cf.q(n) * x - cf.p(n));
      if (lower <= v && v <= upper) {
        ++inside;
      } else {
        ++outside;
      }
    }
    // |q_n x - p_n| is affine on the cylinder, so closed bounds at both
    // endpoints give strict bounds at every interior (irrational) point.
    c.bracket = outside == 0 ? Verdict::Pass : inside == 0 ? Verdict::Fail : Verdict::Undetermined;
    rep.levels.push_back(c);
  }
  return rep;
}

RationalInterval nearest_integer_distance(const mpz_class& k, const ContinuedFraction& cf) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, kModule, "k must be nonzero");
  const RationalInterval& cyl = cf.cylinder();
  mpz_class ak = abs(k);
  if (mpq_class(ak) * cyl.width() >= mpq_class(1, 4)) {
    throw Error(ErrorKind::Precision, kModule, "continued fraction too shallow for k = " + k.get_str());
  }
  mpq_class a = mpq_class(k) * cyl.lo;
  mpq_class b = mpq_class(k) * cyl.hi;
  if (b < a) std::swap(a, b);
  // An integer inside [a, b] would make ||k alpha|| indistinguishable from 0.
  mpz_class fa, fb;
  mpz_fdiv_q(fa.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  mpz_fdiv_q(fb.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
  if (fa != fb || mpq_class(fb) == b) {
    throw Error(ErrorKind::Precision, kModule, "k*alpha interval contains an integer for k = " + k.get_str());
  }
  mpq_class da = dist_to_int(a);
  mpq_class db = dist_to_int(b);
  mpq_class half = mpq_class(fa) + mpq_class(1, 2);
  RationalInterval r;
  r.lo = da < db ? da : db;
  r.hi = (a <= half && half <= b) ? mpq_class(1, 2) : (da < db ? db : da);
  return r;
}

RationalInterval nearest_integer_distance(std::int64_t k, const ContinuedFraction& cf) {
  return nearest_integer_distance(mpz_class(std::to_string(k)), cf);
}

nlohmann::json cf_to_json(const ContinuedFraction& cf, const std::optional<DiophantineParams>& params,
                          const std::string& bits) {
  nlohmann::json j;
  if (params) {
    j["params"] = {{"c0", params->c0}, {"delta", params->delta}, {"d", params->d}};
  }
  if (!bits.empty()) j["bits"] = bits;
  j["levels"] = cf.levels();
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& a : cf.quotients()) {
    if (a.fits_ulong_p()) {
      qs.push_back(static_cast<std::uint64_t>(a.get_ui()));
    } else {
      qs.push_back(a.get_str());
    }
  }
  j["quotients"] = qs;
  nlohmann::json ps = nlohmann::json::array();
  nlohmann::json qd = nlohmann::json::array();
  for (const auto& v : cf.numerators()) ps.push_back(v.get_str());
  for (const auto& v : cf.denominators()) qd.push_back(v.get_str());
  j["p"] = ps;
  j["q"] = qd;
  j["interval"] = {{"lo", cf.value_interval().lo.get_str()}, {"hi", cf.value_interval().hi.get_str()}};
  return j;
}

ContinuedFraction cf_from_json(const nlohmann::json& j) {
  if (!j.contains("quotients") || !j["quotients"].is_array()) {
    throw Error(ErrorKind::Parse, kModule, "cf document has no quotient array");
  }
  std::vector<mpz_class> qs;
  for (const auto& v : j["quotients"]) {
    if (v.is_number_unsigned()) {
      qs.emplace_back(std::to_string(v.get<std::uint64_t>()));
    } else if (v.is_string()) {
      mpz_class z;
      if (z.set_str(v.get<std::string>(), 10) != 0) {
        throw Error(ErrorKind::Parse, kModule, "malformed quotient '" + v.get<std::string>() + "'");
      }
      qs.push_back(z);
    } else {
      throw Error(ErrorKind::Parse, kModule, "quotients must be positive integers or decimal strings");
    }
  }
  ContinuedFraction cf = convergents(qs);
  if (j.contains("q")) {
    const auto& qd = j["q"];
    if (!qd.is_array() || qd.size() != cf.denominators().size()) {
      throw Error(ErrorKind::Validation, kModule, "stored denominators do not match quotients");
    }
    for (std::size_t i = 0; i < qd.size(); ++i) {
      if (qd[i].get<std::string>() != cf.q(i).get_str()) {
        throw Error(ErrorKind::Validation, kModule, "stored q_" + std::to_string(i) + " disagrees with recurrence");
      }
    }
  }
  return cf;
}

std::optional<DiophantineParams> params_from_json(const nlohmann::json& j) {
  if (!j.contains("params")) return std::nullopt;
  DiophantineParams p;
  const auto& o = j["params"];
  p.c0 = o.value("c0", p.c0);
  p.delta = o.value("delta", p.delta);
  p.d = o.value("d", p.d);
  return p;
}

}  // namespace primeorbit
