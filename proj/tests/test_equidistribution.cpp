#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "primeorbit/equidistribution.hpp"
#include "primeorbit/error.hpp"

using namespace primeorbit;

namespace {

ContinuedFraction reference_cf() {
  DiophantineParams params{1.0, 0.5, 0.3};
  return construct_alpha_in_D(params, std::vector<int>(6, 0), 6).cf;
}

const TestFunction& by_name(const std::vector<TestFunction>& g, const std::string& name) {
  for (const auto& t : g) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("missing test function " + name);
}

// Midpoint rule on a fine tensor grid, no closed forms.
cplx brute_target(const TestFunction& g, const AnalyticRoof& f, int nx, int ns) {
  long double re = 0, im = 0;
  for (int i = 0; i < nx; ++i) {
    double x = (i + 0.5) / nx;
    double h = f(x);
    for (int j = 0; j < ns; ++j) {
      double s = (j + 0.5) / ns * h;
      cplx v = g(x, s);
      re += v.real() * h / ns;
      im += v.imag() * h / ns;
    }
  }
  return {static_cast<double>(re / nx), static_cast<double>(im / nx)};
}

}  // namespace

TEST_CASE("smooth step") {
  CHECK(smooth_step(-0.06, 0.05) == 0.0);
  CHECK(smooth_step(0.06, 0.05) == 1.0);
  CHECK(smooth_step(0.0, 0.05) == doctest::Approx(0.5));
  for (double t : {0.01, 0.02, 0.037}) CHECK(smooth_step(t, 0.05) + smooth_step(-t, 0.05) == doctest::Approx(1.0));
}

TEST_CASE("default targets match direct quadrature") {
  auto f = default_roof();
  auto g = default_test_set(f);
  CHECK(g.size() == 5);
  CHECK(by_name(g, "one").target == cplx(1.0));
  CHECK(by_name(g, "box").target.real() == doctest::Approx(0.09).epsilon(1e-15));
  for (const auto& t : g) {
    cplx q = brute_target(t, f, 2000, 400);
    CHECK(std::abs(q - t.target) < 2e-5);
  }
}

TEST_CASE("box target by quadrature when the box meets the roof") {
  auto f = normalize_roof(geometric_roof(1.0, 0.6, 0.8, 0.2, 24));
  REQUIRE(f.min_bound() < 0.45);
  auto g = default_test_set(f);
  TestFunction box = by_name(g, "box");
  box.s0 = 0.3;
  box.s1 = 0.9;
  double t = smooth_box_integral(box, f);
  CHECK(t < 0.3 * 0.6 - 1e-3);
  cplx q = brute_target(box, f, 4000, 2000);
  CHECK(std::abs(q - t) < 1e-5);
  TestFunction bad = box;
  bad.x0 = 0.01;
  CHECK_THROWS_AS(smooth_box_integral(bad, f), Error);
}

TEST_CASE("orbit averages, trivial cases") {
  auto cf = reference_cf();
  auto f = default_roof();
  auto g = default_test_set(f);
  auto table = sieve(1000);
  auto starts = default_start_grid(f);
  AlphaApprox a = AlphaApprox::from_cf(cf);
  for (const auto& p : {starts[0], starts[7], starts[14]}) {
    auto pa = prime_orbit_average(p, f, cf, table, 1000, g);
    auto ra = residue_class_average(p, f, cf, 6, g);
    auto ia = integer_orbit_average(p, f, cf, 500, g);
    CHECK(pa[0] == cplx(1.0));
    CHECK(ra[0] == cplx(1.0));
    CHECK(ia[0] == cplx(1.0));

    auto two = prime_orbit_average(p, f, cf, table, 2, g);
    auto t2 = flow_time_t(p, 2.0, f, a, 1e-12).point;
    auto one = residue_class_average(p, f, cf, 2, g);
    auto t1 = flow_time_t(p, 1.0, f, a, 1e-12).point;
    auto first = integer_orbit_average(p, f, cf, 1, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(two[i] - g[i](t2.base.to_double(), t2.height)) < 1e-12);
      CHECK(std::abs(one[i] - g[i](t1.base.to_double(), t1.height)) < 1e-12);
      CHECK(std::abs(first[i] - g[i](p.base.to_double(), p.height)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(prime_orbit_average(starts[0], f, cf, table, 1001, g), Error);
  CHECK_THROWS_AS(integer_orbit_average(starts[0], f, cf, 0, g), Error);
}

TEST_CASE("prime average matches independent flow evaluations") {
  auto cf = reference_cf();
  auto f = default_roof();
  auto g = default_test_set(f);
  auto table = sieve(3000);
  AlphaApprox a = AlphaApprox::from_cf(cf);
  FlowPoint p = default_start_grid(f)[4];
  auto pa = prime_orbit_average(p, f, cf, table, 3000, g);
  std::vector<long double> re(g.size()), im(g.size());
  for (auto q : table.primes()) {
    auto pt = flow_time_t(p, static_cast<double>(q), f, a, 1e-12).point;
    for (std::size_t i = 0; i < g.size(); ++i) {
      cplx v = g[i](pt.base.to_double(), pt.height);
      re[i] += v.real();
      im[i] += v.imag();
    }
  }
  double n = static_cast<double>(table.primes().size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(pa[i] - cplx(static_cast<double>(re[i]) / n, static_cast<double>(im[i]) / n)) < 1e-11);
  }
  auto ra = residue_class_average(p, f, cf, 6, g);
  std::vector<long double> rr(g.size());
  for (int k = 1; k < 733; ++k) {
    auto pt = flow_time_t(p, k, f, a, 1e-12).point;
    for (std::size_t i = 0; i < g.size(); ++i) rr[i] += g[i](pt.base.to_double(), pt.height).real();
  }
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(ra[i].real() - static_cast<double>(rr[i] / 732)) < 1e-11);
}

TEST_CASE("constant roof reduces to the rotation at prime times") {
  auto cf = reference_cf();
  auto one = constant_roof(1.0);
  std::vector<TestFunction> g = default_test_set(one);
  auto table = sieve(1000000);
  FlowPoint p{Turn::from_double(0.1), 0.25};
  auto pa = prime_orbit_average(p, one, cf, table, 1000000, g);
  // alpha - p_6/q_6 is below 1e-160, so p alpha mod 1 is (p p_6 mod q_6) / q_6 to far beyond double.
  const unsigned long P = cf.p(6).get_ui(), Q = cf.q(6).get_ui();
  long double re = 0, im = 0;
  for (auto q : table.primes()) {
    long double ph = 0.1L + static_cast<long double>((static_cast<unsigned long>(q) % Q) * P % Q) / Q;
    re += std::cos(2 * std::numbers::pi_v<long double> * ph);
    im += std::sin(2 * std::numbers::pi_v<long double> * ph);
  }
  long double n = table.primes().size();
  CHECK(std::abs(pa[1] - cplx(static_cast<double>(re / n), static_cast<double>(im / n))) < 1e-9);
  CHECK(pa[3].real() == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("box discrepancy examples") {
  auto f = default_roof();
  double m_f = f.min_bound();
  std::vector<FlowPoint> single{{Turn::from_double(0.3), 0.1}};
  double cell = m_f / (16.0 * 16.0);
  CHECK(box_discrepancy(single, f) == doctest::Approx(1.0 - cell));

  // nu-quantile lattice: n x n base points, heights uniform under the roof.
  std::vector<FlowPoint> lattice;
  const int n = 256;
  for (int i = 0; i < n; ++i) {
    double x = (i + 0.5) / n;
    double h = f(x);
    int m = static_cast<int>(std::lround(n * h));
    for (int j = 0; j < m; ++j) lattice.push_back({Turn::from_double(x), (j + 0.5) / m * h});
  }
  CHECK(box_discrepancy(lattice, f) <= 1.0 / 16);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FlowPoint> sample;
  double fmax = f.max_bound();
  while (sample.size() < 10000) {
    double x = u(rng), s = u(rng) * fmax;
    if (s < f(x)) sample.push_back({Turn::from_double(x), s});
  }
  double d = box_discrepancy(sample, f);
  CHECK(d > 1e-3);
  CHECK(d < 0.04);
}

TEST_CASE("experiment bookkeeping") {
  auto cf = reference_cf();
  auto f = default_roof();
  ExperimentConfig c;
  c.level_lo = 2;
  c.level_hi = 6;
  c.max_horizon = 5000;
  c.tests = default_test_set(f);
  auto all = default_start_grid(f);
  c.starts = {all[1], all[8], all[12]};
  auto table = sieve(experiment_max_horizon(c, cf));
  auto res = run_experiment(c, f, cf, table);
  REQUIRE(res.levels.size() == 5);
  const std::uint64_t horizons[] = {2, 6, 20, 637, 5000};
  for (std::size_t l = 0; l < 5; ++l) {
    const auto& rep = res.levels[l];
    CHECK(rep.error.empty());
    CHECK(rep.horizon == horizons[l]);
    CHECK(rep.horizon >= rep.q_n);
    CHECK(rep.prime_count == table.pi(rep.horizon));
    CHECK(rep.class_zero_primes == (rep.q_n <= rep.horizon ? 1u : 0u));
    CHECK(rep.worst_decomposition_residual < 1e-12);
    CHECK(rep.worst[0].prime_residue == 0.0);
    CHECK(rep.worst[0].prime_target == 0.0);
    CHECK(rep.worst[0].integer_target == 0.0);
    for (std::size_t s = 0; s < c.starts.size(); ++s) {
      auto pa = prime_orbit_average(c.starts[s], f, cf, table, rep.horizon, c.tests);
      auto ra = residue_class_average(c.starts[s], f, cf, rep.level, c.tests);
      auto ia = integer_orbit_average(c.starts[s], f, cf, rep.horizon, c.tests);
      for (std::size_t i = 0; i < c.tests.size(); ++i) {
        CHECK(std::abs(pa[i] - rep.starts[s].prime_avg[i]) < 1e-12);
        CHECK(std::abs(ra[i] - rep.starts[s].residue_avg[i]) < 1e-12);
        CHECK(std::abs(ia[i] - rep.starts[s].integer_avg[i]) < 1e-12);
      }
    }
  }
  CHECK(res.levels[4].capped);
  CHECK_FALSE(res.levels[3].capped);
  CHECK(trend_summary(res).constant_gaps_zero);

  auto j = experiment_to_json(res, c);
  CHECK(j["levels"].size() == 5);
  CHECK(j["levels"][3]["K_n"] == 49);

  ExperimentConfig small = c;
  small.max_horizon = 2;
  small.level_hi = 3;
  CHECK_THROWS_AS(run_experiment(small, f, cf, table), Error);
}
