#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "primeorbit/error.hpp"
#include "primeorbit/reparam.hpp"

using namespace primeorbit;

namespace {

const Turn kAlpha = Turn::from_double(0.6152796725784447);

}  // namespace

TEST_CASE("gauss legendre integrates polynomials") {
  std::vector<double> x, w;
  gauss_legendre(64, x, w);
  double s0 = 0, s5 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s5 += w[i] * std::pow(x[i], 5);
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s5 == doctest::Approx(1.0 / 6).epsilon(1e-14));
}

TEST_CASE("constant speeds") {
  ReparamOptions o;
  o.normalize = false;
  o.harmonics = 8;
  auto one = roof_from_reparam(Torus2Function(1.0, {}), kAlpha, o);
  CHECK(one.roof.mean() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.roof.is_constant());
  auto two = roof_from_reparam(Torus2Function(2.0, {}), kAlpha, o);
  CHECK(two.roof.mean() == doctest::Approx(0.5).epsilon(1e-14));
  o.normalize = true;
  auto normed = roof_from_reparam(Torus2Function(2.0, {}), kAlpha, o);
  CHECK(normed.roof.mean() == 1.0);
  CHECK(normed.scale == doctest::Approx(0.5));
}

TEST_CASE("height-only speed has a closed form") {
  ReparamOptions o;
  o.normalize = false;
  o.harmonics = 8;
  Torus2Function r(1.0, {{0, 1, {0.05, 0.0}}});
  auto res = roof_from_reparam(r, kAlpha, o);
  CHECK(res.roof.mean() == doctest::Approx(1.0 / std::sqrt(0.99)).epsilon(1e-12));
  for (int i = 0; i < 20; ++i) CHECK(std::abs(res.roof(i / 20.0) - 1.0 / std::sqrt(0.99)) < 1e-10);
}

TEST_CASE("mixed speed matches adaptive quadrature oracle") {
  Torus2Function r(1.0, {{1, 0, {0.1, 0.02}}, {1, 1, {0.05, -0.03}}, {2, -1, {0.02, 0.0}}});
  ReparamOptions o;
  o.normalize = false;
  o.harmonics = 32;
  auto res = roof_from_reparam(r, kAlpha, o);
  double a = kAlpha.to_double();
  for (int i = 0; i < 17; ++i) {
    double x = i / 17.0;
    double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double y) { return 1.0 / r(x + a * y, y); }, 0.0, 1.0, 15, 1e-14);
    CHECK(std::abs(res.roof(x) - ref) < 1e-8);
  }
  CHECK(res.roof.min_bound() > 0);
  CHECK(res.roof.decay().c > 0);
}

TEST_CASE("reparametrization errors") {
  CHECK_THROWS_AS(Torus2Function(1.0, {{1, 0, {0.6, 0.0}}}), Error);
  ReparamOptions o;
  o.quadrature_nodes = 16;
  CHECK_THROWS_AS(roof_from_reparam(Torus2Function(1.0, {}), kAlpha, o), Error);
  ReparamOptions tight;
  tight.tol = 0.0;
  tight.max_nodes = 256;
  Torus2Function rough(1.0, {{7, 3, {0.45, 0.0}}});
  CHECK_THROWS_AS(roof_from_reparam(rough, kAlpha, tight), Error);
}
