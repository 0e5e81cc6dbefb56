#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "primeorbit/kernels.hpp"
#include "primeorbit/turn.hpp"

using namespace primeorbit;

namespace {

std::vector<double> random_turns(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> t(n);
  for (auto& v : t) v = u(rng);
  return t;
}

}  // namespace

TEST_CASE("scalar sincos matches libm") {
  auto t = random_turns(1001, -3.0, 3.0, 1);
  std::vector<double> s(t.size()), c(t.size());
  scalar_kernels().sincos_turns(t.data(), s.data(), c.data(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    long double a = 2.0L * 3.14159265358979323846264338327950288L * t[i];
    CHECK(std::abs(s[i] - static_cast<double>(std::sin(a))) < 4e-15);
    CHECK(std::abs(c[i] - static_cast<double>(std::cos(a))) < 4e-15);
  }
  double q[] = {0.0, 0.25, 0.5, 0.75, -0.25};
  double qs[5], qc[5];
  scalar_kernels().sincos_turns(q, qs, qc, 5);
  CHECK(qs[0] == 0.0);
  CHECK(qc[0] == 1.0);
  CHECK(qs[1] == 1.0);
  CHECK(qc[2] == -1.0);
  CHECK(qs[3] == -1.0);
  CHECK(qs[4] == -1.0);
}

TEST_CASE("vector kernels agree with scalar reference") {
  const KernelSet* v = avx2_kernels();
  if (!v) return;
  const KernelSet& s = scalar_kernels();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    auto t = random_turns(n, -2.0, 2.0, 7 + static_cast<unsigned>(n));
    std::vector<double> s1(n), c1(n), s2(n), c2(n);
    s.sincos_turns(t.data(), s1.data(), c1.data(), n);
    v->sincos_turns(t.data(), s2.data(), c2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(s1[i] - s2[i]) < 1e-15);
      CHECK(std::abs(c1[i] - c2[i]) < 1e-15);
    }
    double r1, i1, r2, i2;
    s.character_sum(t.data(), n, &r1, &i1);
    v->character_sum(t.data(), n, &r2, &i2);
    CHECK(std::abs(r1 - r2) < 1e-14 * (1 + static_cast<double>(n)));
    CHECK(std::abs(i1 - i2) < 1e-14 * (1 + static_cast<double>(n)));

    std::vector<double> re(32), im(32);
    for (std::size_t k = 0; k < 32; ++k) {
      re[k] = 0.3 * std::exp(-1.0 * (k + 1)) * std::cos(0.7 * (k + 1));
      im[k] = 0.3 * std::exp(-1.0 * (k + 1)) * std::sin(0.7 * (k + 1));
    }
    auto x = random_turns(n, 0.0, 1.0, 99 + static_cast<unsigned>(n));
    std::vector<double> o1(n), o2(n);
    s.roof_oscillation(re.data(), im.data(), 32, x.data(), o1.data(), n);
    v->roof_oscillation(re.data(), im.data(), 32, x.data(), o2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-14);
  }
}

TEST_CASE("roof oscillation matches direct harmonic sum") {
  std::vector<double> re = {0.1, -0.05, 0.02}, im = {0.03, 0.0, -0.01};
  auto x = random_turns(50, 0.0, 1.0, 3);
  std::vector<double> out(x.size());
  active_kernels().roof_oscillation(re.data(), im.data(), 3, x.data(), out.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double ref = 0;
    for (int k = 1; k <= 3; ++k) {
      ref += 2 * (re[k - 1] * std::cos(2 * M_PI * k * x[i]) - im[k - 1] * std::sin(2 * M_PI * k * x[i]));
    }
    CHECK(std::abs(out[i] - ref) < 1e-14);
  }
}

TEST_CASE("turn arithmetic") {
  Turn a = Turn::from_rational(mpq_class(1, 3));
  CHECK(std::abs(a.to_double() - 1.0 / 3) < 1e-16);
  CHECK((a + a + a).raw() + 1 <= 2);
  Turn h = Turn::from_double(0.5);
  CHECK(h.times(2).raw() == 0);
  CHECK(h.times(-3) == h);
  CHECK(Turn::from_double(-0.25).to_double() == 0.75);
  CHECK(circle_distance(Turn::from_double(0.95), Turn::from_double(0.05)) == doctest::Approx(0.1).epsilon(1e-15));
  mpq_class q(5, 8);
  CHECK(Turn::from_rational(q).to_rational() == q);
  CHECK(Turn::from_rational(mpq_class(-3, 8)).to_rational() == q);
  CHECK(from_u128(to_u128(mpz_class("340282366920938463463374607431768211455"))) ==
        mpz_class("340282366920938463463374607431768211455"));
}
