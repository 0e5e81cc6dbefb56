#include "primeorbit/equidistribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "primeorbit/character_sums.hpp"
#include "primeorbit/error.hpp"
#include "primeorbit/reparam.hpp"
#include "primeorbit/summation.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "equidistribution";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// int_{-inf}^t smooth_step(u, w) du
double step_antiderivative(double t, double w) {
  if (t <= -w) return 0.0;
  if (t >= w) return t;
  double pi = std::numbers::pi;
  return 0.5 * ((t + w) + (t * t - w * w) / (2 * w) - (w / (pi * pi)) * (std::cos(pi * t / w) + 1.0));
}

// int_0^h of the height factor of the box.
double box_height_integral(const TestFunction& b, double h) {
  double mid = 0.5 * (b.s0 + b.s1);
  auto lower = [&](double v) { return step_antiderivative(v - b.s0, b.w) - step_antiderivative(-b.s0, b.w); };
  if (h <= mid) return lower(std::max(h, 0.0));
  return lower(mid) + step_antiderivative(b.s1 - mid, b.w) - step_antiderivative(b.s1 - h, b.w);
}

double base_factor(const TestFunction& b, double x) {
  double mid = 0.5 * (b.x0 + b.x1);
  return x < mid ? smooth_step(x - b.x0, b.w) : smooth_step(b.x1 - x, b.w);
}

void check_box(const TestFunction& b) {
  bool ok = b.w > 0 && b.x0 - b.w >= 0 && b.x1 + b.w <= 1 && b.x1 - b.x0 >= 2 * b.w && b.s0 - b.w >= 0 &&
            b.s1 - b.s0 >= 2 * b.w;
  if (!ok) throw Error(ErrorKind::InvalidArgument, kModule, "smoothed box must sit inside [0, 1] x [0, inf)");
}

void require_normalized(const AnalyticRoof& f) {
  if (f.mean() != 1.0) throw Error(ErrorKind::Domain, kModule, "orbit averages need a normalized roof");
}

// Complex running sums, one per test function.
struct SumSet {
  std::vector<NeumaierSum> re, im;
  explicit SumSet(std::size_t n = 0) : re(n), im(n) {}
  void add(const std::vector<cplx>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      re[i].add(v[i].real());
      im[i].add(v[i].imag());
    }
  }
  cplx value(std::size_t i) const { return {re[i].value(), im[i].value()}; }
  Averages average(std::uint64_t count) const {
    Averages out(re.size());
    double c = static_cast<double>(count);
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = value(i) / c;
    return out;
  }
};

void evaluate(const std::vector<TestFunction>& g, const FlowPoint& p, std::vector<cplx>& out) {
  double x = p.base.to_double();
  out.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i](x, p.height);
}

template <class Times>
Averages sweep_average(const FlowPoint& p0, const AnalyticRoof& f, const ContinuedFraction& cf,
                       const std::vector<TestFunction>& g, Times&& times) {
  require_normalized(f);
  FlowCursor cur(f, p0, AlphaApprox::from_cf(cf), 0.0, 1e-12, BoundaryPolicy::Count, ~0ull);
  SumSet sums(g.size());
  std::vector<cplx> vals;
  std::uint64_t count = 0;
  times([&](std::uint64_t t) {
    evaluate(g, cur.advance_to(static_cast<double>(t)).point, vals);
    sums.add(vals);
    ++count;
  });
  if (count == 0) throw Error(ErrorKind::InvalidArgument, kModule, "empty time set");
  return sums.average(count);
}

}  // namespace

double smooth_step(double t, double w) {
  if (t <= -w) return 0.0;
  if (t >= w) return 1.0;
  return 0.5 * (1.0 + t / w + std::sin(std::numbers::pi * t / w) / std::numbers::pi);
}

cplx TestFunction::operator()(double x, double s) const {
  switch (kind) {
    case TestKind::One:
      return 1.0;
    case TestKind::Character:
      return std::polar(1.0, kTwoPi * frequency * x);
    case TestKind::Height:
      return s - offset;
    case TestKind::SmoothBox: {
      double bx = base_factor(*this, x);
      if (bx == 0.0) return 0.0;
      double mid = 0.5 * (s0 + s1);
      return bx * (s < mid ? smooth_step(s - s0, w) : smooth_step(s1 - s, w));
    }
  }
  return 0.0;
}

double smooth_box_integral(const TestFunction& box, const AnalyticRoof& f) {
  check_box(box);
  if (f.min_bound() >= box.s1 + box.w) return (box.x1 - box.x0) * (box.s1 - box.s0);
  // Breakpoints of the base factor; the integrand is C^2 between them.
  const double br[] = {box.x0 - box.w, box.x0 + box.w, box.x1 - box.w, box.x1 + box.w};
  auto integrate = [&](std::size_t nodes) {
    std::vector<double> xs, ws;
    gauss_legendre(nodes, xs, ws);
    NeumaierSum total;
    for (int panel = 0; panel < 3; ++panel) {
      double a = br[panel], b = br[panel + 1];
      for (std::size_t i = 0; i < nodes; ++i) {
        double x = a + (b - a) * xs[i];
        total.add((b - a) * ws[i] * base_factor(box, x) * box_height_integral(box, f(x)));
      }
    }
    return total.value();
  };
  double prev = integrate(32);
  for (std::size_t n = 64; n <= 4096; n *= 2) {
    double cur = integrate(n);
    if (std::abs(cur - prev) < 1e-13) return cur;
    prev = cur;
  }
  throw Error(ErrorKind::Quadrature, kModule, "box target did not converge");
}

std::vector<TestFunction> default_test_set(const AnalyticRoof& f) {
  double a0 = f.mean();
  std::vector<TestFunction> g;
  TestFunction one;
  one.name = "one";
  one.target = 1.0;
  g.push_back(one);
  for (int k : {1, 2}) {
    TestFunction c;
    c.name = k == 1 ? "chi1" : "chi2";
    c.kind = TestKind::Character;
    c.frequency = k;
    // int e^{2 pi i k x} f(x) dx = a_{-k}
    c.target = f.coefficient(-k) / a0;
    g.push_back(c);
  }
  TestFunction h;
  h.name = "height";
  h.kind = TestKind::Height;
  // int int_0^{f(x)} s ds dx = (1/2) sum_k |a_k|^2
  NeumaierSum sq;
  for (long k = -static_cast<long>(f.kmax()); k <= static_cast<long>(f.kmax()); ++k) sq.add(std::norm(f.coefficient(k)));
  h.offset = 0.5 * sq.value() / a0;
  h.target = 0.0;
  g.push_back(h);
  TestFunction b;
  b.name = "box";
  b.kind = TestKind::SmoothBox;
  b.x0 = 0.2;
  b.x1 = 0.5;
  b.s0 = 0.1;
  b.s1 = 0.4;
  b.w = 0.05;
  b.target = smooth_box_integral(b, f) / a0;
  g.push_back(b);
  return g;
}

Averages prime_orbit_average(const FlowPoint& p0, const AnalyticRoof& f, const ContinuedFraction& cf,
                             const PrimeTable& table, std::uint64_t horizon, const std::vector<TestFunction>& g) {
  if (horizon > table.limit()) throw Error(ErrorKind::Domain, kModule, "horizon beyond the prime table");
  return sweep_average(p0, f, cf, g, [&](auto&& visit) {
    for (std::uint32_t p : table.primes()) {
      if (p > horizon) break;
      visit(p);
    }
  });
}

Averages residue_class_average(const FlowPoint& p0, const AnalyticRoof& f, const ContinuedFraction& cf,
                               std::size_t level, const std::vector<TestFunction>& g) {
  if (level > cf.levels() || !cf.q(level).fits_ulong_p()) {
    throw Error(ErrorKind::Budget, kModule, "q_n out of range");
  }
  std::uint64_t q = cf.q(level).get_ui();
  if (q < 2) throw Error(ErrorKind::InvalidArgument, kModule, "residue classes need q_n >= 2");
  return sweep_average(p0, f, cf, g, [&](auto&& visit) {
    for (std::uint64_t a = 1; a < q; ++a) visit(a);
  });
}

Averages integer_orbit_average(const FlowPoint& p0, const AnalyticRoof& f, const ContinuedFraction& cf,
                               std::uint64_t M, const std::vector<TestFunction>& g) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, kModule, "M must be at least 1");
  return sweep_average(p0, f, cf, g, [&](auto&& visit) {
    for (std::uint64_t m = 0; m < M; ++m) visit(m);
  });
}

void add_to_cells(CellCounts& cells, double x, double s, double m_f) {
  if (!(s >= 0.0 && s < m_f)) return;
  int i = std::min(kDiscrepancyCells - 1, static_cast<int>(x * kDiscrepancyCells));
  int j = std::min(kDiscrepancyCells - 1, static_cast<int>(s / m_f * kDiscrepancyCells));
  ++cells[i][j];
}

double discrepancy_from_cells(const CellCounts& cells, std::uint64_t total, double m_f) {
  if (total == 0) throw Error(ErrorKind::InvalidArgument, kModule, "discrepancy of an empty point set");
  constexpr int N = kDiscrepancyCells;
  std::array<std::array<std::uint64_t, N + 1>, N + 1> pre{};
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) pre[i + 1][j + 1] = cells[i][j] + pre[i][j + 1] + pre[i + 1][j] - pre[i][j];
  }
  double worst = 0.0;
  double n = static_cast<double>(total);
  for (int u1 = 0; u1 < N; ++u1) {
    for (int u2 = u1 + 1; u2 <= N; ++u2) {
      for (int v1 = 0; v1 < N; ++v1) {
        for (int v2 = v1 + 1; v2 <= N; ++v2) {
          std::uint64_t c = pre[u2][v2] - pre[u1][v2] - pre[u2][v1] + pre[u1][v1];
          double vol = (static_cast<double>(u2 - u1) / N) * (static_cast<double>(v2 - v1) / N * m_f);
          worst = std::max(worst, std::abs(static_cast<double>(c) / n - vol));
        }
      }
    }
  }
  return worst;
}

double box_discrepancy(const std::vector<FlowPoint>& points, const AnalyticRoof& f) {
  require_normalized(f);
  CellCounts cells{};
  double m_f = f.min_bound();
  for (const auto& p : points) add_to_cells(cells, p.base.to_double(), p.height, m_f);
  return discrepancy_from_cells(cells, points.size(), m_f);
}

namespace {

struct LevelPlan {
  std::size_t level = 0;
  std::uint64_t q = 0;
  std::uint64_t k = 0;
  std::uint64_t horizon = 0;
  bool capped = false;
  std::string error;
};

struct LevelAcc {
  SumSet integer, residue, prime;
  std::vector<SumSet> classes;
  std::uint64_t primes = 0;
  CellCounts cells{};
  Averages integer_avg;
};

std::vector<LevelPlan> plan_levels(const ExperimentConfig& c, const ContinuedFraction& cf) {
  std::vector<LevelPlan> plans;
  for (std::size_t n = c.level_lo; n <= c.level_hi; ++n) {
    LevelPlan p;
    p.level = n;
    if (n > cf.levels()) {
      p.error = "level beyond the continued fraction";
    } else if (!cf.q(n).fits_ulong_p() || cf.q(n).get_ui() > c.max_horizon) {
      p.error = "q_n exceeds the horizon cap";
    } else {
      p.q = cf.q(n).get_ui();
      if (p.q < 2) p.error = "q_n < 2";
      p.k = horizon_multiplier(cf, n, c.d, c.max_horizon);
      unsigned __int128 h = static_cast<unsigned __int128>(p.k) * p.q;
      p.capped = h > c.max_horizon;
      p.horizon = p.capped ? c.max_horizon : static_cast<std::uint64_t>(h);
    }
    plans.push_back(p);
  }
  return plans;
}

void run_start(const FlowPoint& p0, const AnalyticRoof& f, const AlphaApprox& alpha, const ExperimentConfig& c,
               const std::vector<LevelPlan>& plans, const PrimeTable& table, std::vector<StartRecord>& out,
               std::uint64_t& ambiguous) {
  const std::size_t ng = c.tests.size();
  double m_f = f.min_bound();
  std::uint64_t hmax = 0;
  std::vector<LevelAcc> acc(plans.size());
  for (std::size_t l = 0; l < plans.size(); ++l) {
    if (!plans[l].error.empty()) continue;
    hmax = std::max(hmax, plans[l].horizon);
    acc[l].residue = SumSet(ng);
    acc[l].prime = SumSet(ng);
    acc[l].classes.assign(plans[l].q, SumSet(ng));
  }
  FlowCursor cur(f, p0, alpha, 0.0, c.tol, BoundaryPolicy::Count, ~0ull);
  SumSet integer(ng);
  std::vector<cplx> vals;
  const auto& primes = table.primes();
  std::size_t pi = 0;
  for (std::uint64_t m = 0; m <= hmax; ++m) {
    for (std::size_t l = 0; l < plans.size(); ++l) {
      if (plans[l].error.empty() && plans[l].horizon == m) acc[l].integer_avg = integer.average(m);
    }
    FlowResult r = cur.advance_to(static_cast<double>(m));
    evaluate(c.tests, r.point, vals);
    integer.add(vals);
    bool is_prime = pi < primes.size() && primes[pi] == m;
    if (is_prime) ++pi;
    double x = 0.0;
    if (is_prime) x = r.point.base.to_double();
    for (std::size_t l = 0; l < plans.size(); ++l) {
      const auto& pl = plans[l];
      if (!pl.error.empty()) continue;
      if (m >= 1 && m < pl.q) acc[l].residue.add(vals);
      if (is_prime && m <= pl.horizon) {
        acc[l].prime.add(vals);
        acc[l].classes[m % pl.q].add(vals);
        ++acc[l].primes;
        add_to_cells(acc[l].cells, x, r.point.height, m_f);
      }
    }
  }
  ambiguous += cur.ambiguous();
  for (std::size_t l = 0; l < plans.size(); ++l) {
    if (!plans[l].error.empty()) continue;
    StartRecord rec;
    rec.x = p0.base.to_double();
    rec.s = p0.height;
    rec.integer_avg = acc[l].integer_avg;
    rec.residue_avg = acc[l].residue.average(plans[l].q - 1);
    rec.prime_avg = acc[l].prime.average(acc[l].primes);
    rec.discrepancy = discrepancy_from_cells(acc[l].cells, acc[l].primes, m_f);
    for (std::size_t i = 0; i < ng; ++i) {
      NeumaierSum re, im;
      for (const auto& cls : acc[l].classes) {
        re.add(cls.re[i].value());
        im.add(cls.im[i].value());
      }
      rec.decomposition_residual.push_back(std::abs(cplx(re.value(), im.value()) - acc[l].prime.value(i)));
    }
    out[l] = std::move(rec);
  }
}

}  // namespace

std::uint64_t experiment_max_horizon(const ExperimentConfig& config, const ContinuedFraction& cf) {
  std::uint64_t h = 0;
  for (const auto& p : plan_levels(config, cf)) {
    if (p.error.empty()) h = std::max(h, p.horizon);
  }
  return h;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const AnalyticRoof& f, const ContinuedFraction& cf,
                                const PrimeTable& table) {
  require_normalized(f);
  if (config.level_lo > config.level_hi) throw Error(ErrorKind::InvalidArgument, kModule, "empty level range");
  if (config.starts.empty() || config.tests.empty()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "need start points and test functions");
  }
  if (!(config.d > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "d must be positive");
  auto plans = plan_levels(config, cf);
  std::size_t runnable = std::count_if(plans.begin(), plans.end(), [](auto& p) { return p.error.empty(); });
  if (runnable < 2) throw Error(ErrorKind::Budget, kModule, "fewer than two levels fit the budgets");
  if (experiment_max_horizon(config, cf) > table.limit()) {
    throw Error(ErrorKind::Domain, kModule, "prime table does not reach the largest horizon");
  }

  AlphaApprox alpha = AlphaApprox::from_cf(cf);
  const std::size_t ns = config.starts.size();
  std::vector<std::vector<StartRecord>> per_start(ns, std::vector<StartRecord>(plans.size()));
  std::vector<std::uint64_t> amb(ns, 0);
  unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(ns)));
  auto job = [&](unsigned w) {
    for (std::size_t i = w; i < ns; i += workers) {
      run_start(config.starts[i], f, alpha, config, plans, table, per_start[i], amb[i]);
    }
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }

  ExperimentResult res;
  res.m_f = f.min_bound();
  for (auto a : amb) res.ambiguous += a;
  for (std::size_t l = 0; l < plans.size(); ++l) {
    const auto& pl = plans[l];
    ExperimentReport rep;
    rep.level = pl.level;
    rep.error = pl.error;
    if (pl.error.empty()) {
      rep.q_n = pl.q;
      rep.k_n = pl.k;
      rep.horizon = pl.horizon;
      rep.capped = pl.capped;
      rep.prime_count = table.pi(pl.horizon);
      rep.class_counts = table.residue_counts(pl.horizon, pl.q);
      rep.class_zero_primes = rep.class_counts[0];
      std::uint64_t total = 0;
      for (auto c : rep.class_counts) total += c;
      if (total != rep.prime_count) throw Error(ErrorKind::Validation, kModule, "residue class counts do not add up");
      for (std::size_t i = 0; i < ns; ++i) rep.starts.push_back(std::move(per_start[i][l]));
      for (std::size_t gi = 0; gi < config.tests.size(); ++gi) {
        TestSummary s;
        s.name = config.tests[gi].name;
        s.target = config.tests[gi].target;
        for (const auto& r : rep.starts) {
          s.prime_residue = std::max(s.prime_residue, std::abs(r.prime_avg[gi] - r.residue_avg[gi]));
          s.residue_target = std::max(s.residue_target, std::abs(r.residue_avg[gi] - s.target));
          s.prime_target = std::max(s.prime_target, std::abs(r.prime_avg[gi] - s.target));
          s.integer_target = std::max(s.integer_target, std::abs(r.integer_avg[gi] - s.target));
        }
        rep.worst.push_back(s);
      }
      for (const auto& r : rep.starts) {
        rep.worst_discrepancy = std::max(rep.worst_discrepancy, r.discrepancy);
        for (double d : r.decomposition_residual) {
          rep.worst_decomposition_residual = std::max(rep.worst_decomposition_residual, d);
        }
      }
    }
    res.levels.push_back(std::move(rep));
  }
  return res;
}

TrendSummary trend_summary(const ExperimentResult& result) {
  TrendSummary t;
  std::vector<const ExperimentReport*> ok;
  for (const auto& l : result.levels) {
    if (l.error.empty()) ok.push_back(&l);
  }
  for (const auto* l : ok) {
    for (std::size_t i = 0; i < l->worst.size(); ++i) {
      if (l->worst[i].name != "one") continue;
      const auto& w = l->worst[i];
      if (w.prime_residue != 0 || w.residue_target != 0 || w.prime_target != 0 || w.integer_target != 0) {
        t.constant_gaps_zero = false;
      }
    }
  }
  for (std::size_t j = 0; j + 1 < ok.size(); ++j) {
    const auto& a = *ok[j];
    const auto& b = *ok[j + 1];
    if (b.level != a.level + 1) continue;
    bool shrink = true;
    for (std::size_t i = 0; i < a.worst.size(); ++i) {
      if (a.worst[i].name == "one") continue;
      if (!(b.worst[i].prime_residue < a.worst[i].prime_residue && b.worst[i].prime_target < a.worst[i].prime_target)) {
        shrink = false;
      }
    }
    if (shrink) t.improving_pairs.emplace_back(a.level, b.level);
  }
  if (ok.size() >= 2) {
    t.last_below_first = true;
    for (std::size_t i = 0; i < ok.front()->worst.size(); ++i) {
      if (ok.front()->worst[i].name == "one") continue;
      if (!(ok.back()->worst[i].prime_target < ok.front()->worst[i].prime_target)) t.last_below_first = false;
    }
  }
  t.pass = t.constant_gaps_zero && !t.improving_pairs.empty();
  return t;
}

namespace {

nlohmann::json cplx_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json averages_json(const Averages& a) {
  auto j = nlohmann::json::array();
  for (auto z : a) j.push_back(cplx_json(z));
  return j;
}

}  // namespace

nlohmann::json experiment_to_json(const ExperimentResult& result, const ExperimentConfig& config) {
  using nlohmann::json;
  json j;
  json tests = json::array();
  for (const auto& g : config.tests) tests.push_back({{"name", g.name}, {"target", cplx_json(g.target)}});
  json starts = json::array();
  for (const auto& p : config.starts) starts.push_back({p.base.to_double(), p.height});
  j["environment"] = {{"d", config.d},
                      {"levels", {config.level_lo, config.level_hi}},
                      {"max_horizon", config.max_horizon},
                      {"tol", config.tol},
                      {"tests", tests},
                      {"starts", starts},
                      {"discrepancy_lattice", kDiscrepancyCells},
                      {"roof_min", result.m_f},
                      {"conventions",
                       {{"horizon", "min(floor(e^{d q_n}) q_n, max_horizon)"},
                        {"prime_avg", "primes p <= horizon, divided by pi(horizon)"},
                        {"residue_avg", "a = 1..q_n-1, divided by q_n-1; class 0 reported as remainder"},
                        {"integer_avg", "m = 0..horizon-1"},
                        {"boundary", "counted, not resolved"}}}};
  j["ambiguous_boundary_events"] = result.ambiguous;
  json levels = json::array();
  for (const auto& l : result.levels) {
    json e;
    e["level"] = l.level;
    if (!l.error.empty()) {
      e["error"] = l.error;
      levels.push_back(e);
      continue;
    }
    e["q_n"] = l.q_n;
    e["K_n"] = l.k_n;
    e["horizon"] = l.horizon;
    e["capped"] = l.capped;
    e["prime_count"] = l.prime_count;
    e["class_zero_primes"] = l.class_zero_primes;
    e["worst_discrepancy"] = l.worst_discrepancy;
    e["worst_decomposition_residual"] = l.worst_decomposition_residual;
    json worst = json::array();
    for (const auto& w : l.worst) {
      worst.push_back({{"name", w.name},
                       {"target", cplx_json(w.target)},
                       {"prime_residue", w.prime_residue},
                       {"residue_target", w.residue_target},
                       {"prime_target", w.prime_target},
                       {"integer_target", w.integer_target}});
    }
    e["worst"] = worst;
    json per = json::array();
    for (const auto& r : l.starts) {
      per.push_back({{"x", r.x},
                     {"s", r.s},
                     {"prime_avg", averages_json(r.prime_avg)},
                     {"residue_avg", averages_json(r.residue_avg)},
                     {"integer_avg", averages_json(r.integer_avg)},
                     {"discrepancy", r.discrepancy}});
    }
    e["starts"] = per;
    levels.push_back(e);
  }
  j["levels"] = levels;
  auto t = trend_summary(result);
  json pairs = json::array();
  for (auto [a, b] : t.improving_pairs) pairs.push_back({a, b});
  j["trend"] = {{"improving_pairs", pairs}, {"constant_gaps_zero", t.constant_gaps_zero},
                {"last_below_first", t.last_below_first},
                {"pass", t.pass}};
  return j;
}

}  // namespace primeorbit
