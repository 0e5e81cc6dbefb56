#include <doctest.h>

#include <cmath>

#include "primeorbit/character_sums.hpp"
#include "primeorbit/error.hpp"

using namespace primeorbit;

namespace {

ContinuedFraction reference_cf() {
  DiophantineParams params{1.0, 0.5, 0.3};
  return construct_alpha_in_D(params, std::vector<int>(6, 0), 6).cf;
}

// Term-by-term oracle in long double from the exact midpoint of the cylinder.
std::complex<long double> direct_ld(long k, long double x, long double alpha, std::uint64_t n) {
  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::complex<long double> s = 0;
  for (std::uint64_t j = 0; j < n; ++j) {
    long double y = k * (x + j * alpha);
    y -= std::floor(y);
    s += std::complex<long double>(std::cos(two_pi * y), std::sin(two_pi * y));
  }
  return s;
}

}  // namespace

TEST_CASE("closed form trivial cases") {
  auto cf = reference_cf();
  CirclePoint x(mpq_class(3, 10));
  CHECK(char_sum_closed_form(0, x, cf, 17) == std::complex<double>(17.0, 0.0));
  auto one = char_sum_closed_form(5, x, cf, 1);
  CHECK(std::abs(one - std::polar(1.0, 2 * M_PI * 5 * 0.3)) < 1e-14);
}

TEST_CASE("closed form agrees with direct summation") {
  auto cf = reference_cf();
  auto grid = uniform_grid(32);
  long double alpha = static_cast<long double>(cf.midpoint().get_d());
  for (std::size_t level = 2; level <= 6; ++level) {
    std::uint64_t qn = cf.q(level).get_ui();
    for (long k = -20; k <= 20; ++k) {
      for (std::size_t i = 0; i < grid.size(); i += 3) {
        auto c = char_sum_closed_form(k, grid[i], cf, qn);
        auto d = char_sum_direct(k, grid[i], cf, qn);
        CHECK(std::abs(c - d) < 1e-9);
        auto o = direct_ld(k, static_cast<long double>(grid[i].to_double()), alpha, qn);
        CHECK(std::abs(std::complex<long double>(d.real(), d.imag()) - o) < 1e-9L);
      }
    }
  }
}

TEST_CASE("character sum bound over the grid") {
  auto cf = reference_cf();
  auto grid = uniform_grid(16);
  for (std::size_t level = 2; level <= 5; ++level) {
    for (long k = -60; k <= 60; ++k) {
      if (k == 0) continue;
      auto row = lemma4_bound_check(k, grid, cf, level);
      CHECK(row.pass);
      CHECK(row.triangle_pass);
    }
    // k = q_n: first branch wins.
    auto qk = cf.q(level).get_si();
    auto row = lemma4_bound_check(qk, grid, cf, level);
    CHECK(row.bound == row.q_n);
  }
  CHECK_THROWS_AS(lemma4_bound_check(0, grid, cf, 3), Error);
}

TEST_CASE("deviation and exponential fit") {
  auto cf = reference_cf();
  auto grid = uniform_grid(64);
  auto flat = constant_roof(1.0);
  CHECK(deviation_qn(flat, grid, cf, 4).sup == 0.0);

  // Single harmonic: the deviation is 2 Re(a_1 S_{q_n}(chi_1)).
  auto one = AnalyticRoof({1.0, std::complex<double>(0.1, 0.05)}, DecayConstants{0.2, 0.0});
  for (std::size_t level = 2; level <= 5; ++level) {
    std::uint64_t qn = cf.q(level).get_ui();
    auto dev = deviation_qn(one, grid, cf, level);
    double best = 0;
    for (const auto& x : grid) {
      auto s = char_sum_closed_form(1, x, cf, qn);
      best = std::max(best, std::abs(2 * (std::complex<double>(0.1, 0.05) * s).real()));
    }
    CHECK(dev.sup == doctest::Approx(best).epsilon(1e-10));
  }

  auto f = default_roof();
  std::vector<double> q, d;
  for (std::size_t level = 2; level <= 6; ++level) {
    auto r = deviation_qn(f, grid, cf, level);
    q.push_back(r.q_n);
    d.push_back(r.sup);
    MESSAGE("level " << level << " q " << r.q_n << " dev " << r.sup << " err " << r.error);
  }
  CHECK(d[3] < 0.9 * d[2]);
  auto fit = fit_exponential_bound(q, d);
  CHECK(fit.c_prime > 0);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(d[i] <= fit.C_prime * std::exp(-fit.c_prime * q[i]));

  auto two = fit_exponential_bound({13, 733}, {1e-2, 1e-4});
  CHECK(two.c_prime > 0);
  CHECK(1e-2 <= two.C_prime * std::exp(-two.c_prime * 13));
  CHECK_THROWS_AS(fit_exponential_bound({5, 13}, {0.1, 0.1}), Error);
  CHECK_THROWS_AS(fit_exponential_bound({5}, {0.1}), Error);
}

TEST_CASE("uniform sup chain") {
  auto cf = reference_cf();
  auto grid = uniform_grid(64);
  auto f = default_roof();
  for (std::size_t level = 3; level <= 5; ++level) {
    auto kcap = horizon_multiplier(cf, level, 0.3, 1000);
    auto r = uniform_sup_check(f, grid, cf, level, kcap);
    MESSAGE("level " << level << " kcap " << kcap << " sup " << r.sup << " chain " << r.chain_bound
                     << " grid-chain " << r.grid_chain_bound);
    CHECK(r.pass);
  }
  CHECK(horizon_multiplier(cf, 3, 0.3, 1000) == 2);
  CHECK(horizon_multiplier(cf, 4, 0.3, 1000) == 4);
  CHECK(horizon_multiplier(cf, 5, 0.3, 1000) == 49);
  CHECK(horizon_multiplier(cf, 6, 0.3, 1000) == 1000);

  auto zero = uniform_sup_check(f, grid, cf, 4, 0);
  CHECK(zero.sup == 0.0);
  AlphaApprox a = AlphaApprox::from_cf(cf);
  std::uint64_t q4 = cf.q(4).get_ui();
  for (std::size_t i = 0; i < grid.size(); i += 5) {
    auto chain = chained_deviations(f, grid[i], cf, 4, 2);
    auto one = birkhoff_deviation(f, grid[i].turn(), 0, a, q4).value;
    auto direct = birkhoff_deviation(f, grid[i].turn(), 0, a, 2 * q4).value;
    CHECK(chain[0] == doctest::Approx(one).epsilon(1e-14));
    CHECK(std::abs(chain[1] - direct) < 1e-10);
  }
  CHECK_THROWS_AS(uniform_sup_check(f, grid, cf, 5, 1000, 100), Error);
}
