#include "primeorbit/turn.hpp"

#include <cmath>

#include "primeorbit/error.hpp"

namespace primeorbit {

u128 to_u128(const mpz_class& v) {
  if (sgn(v) < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 128) {
    throw Error(ErrorKind::Domain, "turn", "value does not fit in 128 bits");
  }
  mpz_class lo = v & mpz_class("18446744073709551615");
  mpz_class hi = v >> 64;
  return (u128(mpz_get_ui(hi.get_mpz_t())) << 64) | u128(mpz_get_ui(lo.get_mpz_t()));
}

mpz_class from_u128(u128 v) {
  mpz_class hi = static_cast<unsigned long>(v >> 64);
  mpz_class lo = static_cast<unsigned long>(v & ~std::uint64_t{0});
  return (hi << 64) + lo;
}

Turn Turn::from_rational(const mpq_class& x) {
  const mpz_class& num = x.get_num();
  const mpz_class& den = x.get_den();
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  // round(r / den * 2^128) = floor((r * 2^129 + den) / (2 den))
  mpz_class scaled = (r << 129) + den;
  mpz_class twice_den = den << 1;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), twice_den.get_mpz_t());
  mpz_class mask = (mpz_class(1) << 128) - 1;
  q &= mask;
  return from_raw(to_u128(q));
}

Turn Turn::from_double(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::Domain, "turn", "non-finite circle coordinate");
  }
  double frac = x - std::floor(x);
  double hi_part = std::floor(std::ldexp(frac, 64));
  double lo_part = std::ldexp(std::ldexp(frac, 64) - hi_part, 64);
  u128 hi = static_cast<std::uint64_t>(hi_part);
  u128 lo = static_cast<std::uint64_t>(lo_part);
  return from_raw((hi << 64) + lo);
}

mpq_class Turn::to_rational() const {
  mpq_class q(from_u128(raw_), mpz_class(1) << 128);
  q.canonicalize();
  return q;
}

double circle_distance(Turn a, Turn b) {
  u128 d = (a - b).raw();
  u128 e = u128(0) - d;
  u128 m = d < e ? d : e;
  auto hi = static_cast<std::uint64_t>(m >> 64);
  auto lo = static_cast<std::uint64_t>(m);
  return std::ldexp(static_cast<double>(hi), -64) + std::ldexp(static_cast<double>(lo), -128);
}

}  // namespace primeorbit
