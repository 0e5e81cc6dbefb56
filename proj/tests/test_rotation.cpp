#include <doctest.h>

#include <cmath>
#include <random>

#include "primeorbit/error.hpp"
#include "primeorbit/rotation.hpp"

using namespace primeorbit;

namespace {

ContinuedFraction reference_cf() {
  DiophantineParams params{1.0, 0.5, 0.3};
  return construct_alpha_in_D(params, std::vector<int>(6, 0), 6).cf;
}

// Long double oracle: direct evaluation of the harmonic sum at x + j alpha.
long double roof_ld(const AnalyticRoof& f, long double x) {
  long double v = f.mean();
  for (long k = 1; k <= static_cast<long>(f.kmax()); ++k) {
    auto a = f.coefficient(k);
    long double ang = 2.0L * 3.14159265358979323846264338327950288L * k * x;
    v += 2.0L * (a.real() * std::cos(ang) - a.imag() * std::sin(ang));
  }
  return v;
}

}  // namespace

TEST_CASE("rotate_n basics") {
  auto cf = reference_cf();
  CirclePoint x(mpq_class(1, 3));
  auto r0 = rotate_n(x, cf, 0, 1e-6);
  CHECK(r0.point.value() == x.value());
  CHECK(r0.budget.bound == 0);

  auto gold_like = convergents(std::vector<std::uint64_t>{1, 1, 1, 1});
  // p_3/q_3 = 2/3
  auto r = rotate_n_at_level(x, gold_like, 3, 3);
  CHECK(r.point.value() == mpq_class(1, 3));

  for (std::size_t N = 1; N <= 5; ++N) {
    std::int64_t n = cf.q(N).get_si();
    auto p = rotate_n_at_level(CirclePoint(0), cf, n, N + 1);
    mpq_class v = p.point.value();
    mpq_class d = v < mpq_class(1, 2) ? v : mpq_class(1 - v);
    CHECK(d <= mpq_class(1, cf.q(N + 1)));
    if (N + 2 <= cf.levels()) {
      auto deeper = rotate_n_at_level(CirclePoint(0), cf, n, N + 2);
      mpq_class w = deeper.point.value();
      CHECK((w < mpq_class(1, 2) ? w : mpq_class(1 - w)) < mpq_class(1, cf.q(N + 1)));
    }
  }
  auto shallow = convergents(std::vector<std::uint64_t>{1, 1});
  CHECK_THROWS_AS(rotate_n(x, shallow, 1000000, 1e-9), Error);
}

TEST_CASE("rotate_n group action and budget soundness") {
  auto cf = reference_cf();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::int64_t m = static_cast<std::int64_t>(rng() % 10000);
    std::int64_t n = static_cast<std::int64_t>(rng() % 10000);
    CirclePoint x(mpq_class(static_cast<long>(rng() % 1000), 1000));
    auto a = rotate_n_at_level(rotate_n_at_level(x, cf, m, 4).point, cf, n, 4);
    auto b = rotate_n_at_level(x, cf, m + n, 4);
    CHECK(a.point.value() == b.point.value());
    auto lo = rotate_n_at_level(x, cf, n, 4);
    auto hi = rotate_n_at_level(x, cf, n, 6);
    mpq_class diff = frac(lo.point.value() - hi.point.value());
    if (diff > mpq_class(1, 2)) diff = 1 - diff;
    CHECK(diff <= lo.budget.bound + hi.budget.bound);
  }
  auto r = rotate_n(CirclePoint(0), cf, 5000, 1e-3);
  CHECK(r.budget.bound < mpq_class(1, 1000));
}

TEST_CASE("birkhoff sums") {
  auto cf = reference_cf();
  auto one = constant_roof(1.0);
  CHECK(birkhoff_sum(one, CirclePoint(mpq_class(2, 7)), cf, 7, 1e-9).value == 7.0);
  CHECK(birkhoff_sum(default_roof(), CirclePoint(0), cf, 0, 1e-9).value == 0.0);

  auto golden = convergents(std::vector<std::uint64_t>(40, 1));
  auto f = AnalyticRoof({1.0, 0.05}, DecayConstants{0.05, 0.0});
  long double phi = (std::sqrt(5.0L) - 1) / 2;
  long double ref = 0;
  for (int j = 0; j < 3; ++j) ref += 1 + 0.1L * std::cos(2 * 3.14159265358979323846264338327950288L * j * phi);
  auto b = birkhoff_sum(f, CirclePoint(0), golden, 3, 1e-9);
  CHECK(std::abs(b.value - static_cast<double>(ref)) < 1e-12);

  auto g = default_roof();
  AlphaApprox a = AlphaApprox::from_cf(cf);
  long double alpha = static_cast<long double>(cf.midpoint().get_d());
  for (std::uint64_t n : {1u, 13u, 733u, 5000u}) {
    auto s = birkhoff_sum(g, Turn::from_double(0.3), 0, a, n, 1e-6);
    long double r = 0;
    for (std::uint64_t j = 0; j < n; ++j) {
      long double y = 0.3L + j * alpha;
      r += roof_ld(g, y - std::floor(y));
    }
    CHECK(std::abs(s.value - static_cast<double>(r)) < 1e-9);
    CHECK(s.error < 1e-8);
  }
  CHECK_THROWS_AS(birkhoff_sum(g, CirclePoint(0), convergents(std::vector<std::uint64_t>{1, 1}), 100000, 1e-9),
                  Error);
}

TEST_CASE("cocycle identity") {
  auto cf = reference_cf();
  auto f = default_roof();
  std::uint64_t q3 = cf.q(3).get_ui();
  for (int i = 0; i < 100; i += 7) {
    CirclePoint x(mpq_class(i, 100));
    for (auto [m, n] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{0, 50}, {50, 0}, {q3, q3}, {999, 1000}}) {
      auto r = cocycle_check(f, x, cf, m, n);
      CHECK(r.residual <= 10 * r.tolerance);
      CHECK(r.residual < 1e-10);
    }
  }
}

TEST_CASE("roof normalization and positivity") {
  auto f = geometric_roof(2.0, 0.4, 1.0, 0.3, 8);
  auto n = normalize_roof(f);
  CHECK(n.mean() == 1.0);
  CHECK(n.coefficient(3) == f.coefficient(3) / 2.0);
  auto nn = normalize_roof(n);
  CHECK(nn.coefficient(5) == n.coefficient(5));
  CHECK(n.min_bound() > 0);
  CHECK_THROWS_AS(AnalyticRoof({0.5, std::complex<double>(0.3, 0.0)}, DecayConstants{1.0, 0.0}), Error);
  CHECK_THROWS_AS(AnalyticRoof({1.0, 0.1, 0.1}, DecayConstants{0.1, 1.0}), Error);
  auto d = default_roof();
  CHECK(d.min_bound() == doctest::Approx(0.651).epsilon(1e-3));
  for (int i = 0; i < 1000; ++i) {
    double v = d(i / 1000.0);
    CHECK(v >= d.min_bound());
    CHECK(v <= d.max_bound());
  }
  auto j = roof_to_json(d);
  auto back = roof_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.coefficient(7) == d.coefficient(7));
  CHECK(back.coefficient(-7) == std::conj(d.coefficient(7)));
}
