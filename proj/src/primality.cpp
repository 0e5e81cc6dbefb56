#include "primeorbit/primality.hpp"

#include <array>

namespace primeorbit {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool witness_passes(u64 n, u64 a, u64 d, int s) {
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int r = 1; r < s; ++r) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

constexpr std::array<unsigned, 64> kSmallPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (!witness_passes(n, a, d, s)) return false;
  }
  return true;
}

PrimalityResult is_prime(const mpz_class& n) {
  if (sgn(n) <= 0) return {false, true};
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
    u64 v = mpz_get_ui(n.get_mpz_t());
    if (sizeof(unsigned long) < 8) {
      mpz_class hi = n >> 32;
      v = (u64(mpz_get_ui(hi.get_mpz_t())) << 32) | (mpz_get_ui(n.get_mpz_t()) & 0xffffffffu);
    }
    return {is_prime_u64(v), true};
  }
  for (unsigned p : kSmallPrimes) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return {false, true};
  }
  mpz_class nm1 = n - 1;
  mpz_class d = nm1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  d >>= s;
  mpz_class x;
  for (unsigned a : kSmallPrimes) {
    mpz_class base = a;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) continue;
    bool ok = false;
    for (unsigned long r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == nm1) {
        ok = true;
        break;
      }
    }
    if (!ok) return {false, true};
  }
  return {true, false};
}

}  // namespace primeorbit
