#pragma once

#include <cstdint>

#include <gmpxx.h>

namespace primeorbit {

struct PrimalityResult {
  bool prime = false;
  // False when the answer came from random-free but non-exhaustive witness
  // rounds (inputs at or above 2^64).
  bool deterministic = true;
};

// Deterministic Miller-Rabin for 64-bit inputs (witnesses 2..37).
bool is_prime_u64(std::uint64_t n);

// Deterministic below 2^64; above that, trial division plus 64 Miller-Rabin
// rounds with the first 64 primes as witnesses.
PrimalityResult is_prime(const mpz_class& n);

}  // namespace primeorbit
