#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace primeorbit {

struct SieveOptions {
  std::uint64_t ceiling = 1000000000;
  std::size_t segment = 1 << 20;
  unsigned workers = 1;
};

class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes);
  PrimeTable(const PrimeTable& other) : limit_(other.limit_), primes_(other.primes_) {}
  PrimeTable& operator=(const PrimeTable& other);

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  // Number of primes <= x.
  std::uint64_t pi(std::uint64_t x) const;
  // Number of primes <= x congruent to a mod q. Counts for a whole modulus are
  // filled on first use and then only read.
  std::uint64_t pi(std::uint64_t x, std::uint64_t q, std::uint64_t a) const;
  std::vector<std::uint64_t> residue_counts(std::uint64_t x, std::uint64_t q) const;

 private:
  void check_range(std::uint64_t x) const;

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::uint64_t>> residue_cache_;
};

PrimeTable sieve(std::uint64_t limit, const SieveOptions& opts = {});

// Li(x) = int_2^x dt / log t, relative error below 1e-10.
double li_x(double x);

struct SwRatio {
  double ratio = 0.0;
  std::uint64_t count = 0;
  double li = 0.0;
  bool q_prime = true;
  bool coprime = true;
  // q < (log x)^2
  bool in_range = true;
  bool valid() const { return q_prime && coprime && in_range; }
};

// pi(x; q, a) (q - 1) / Li(x).
SwRatio sw_ratio(const PrimeTable& table, std::uint64_t x, std::uint64_t q, std::uint64_t a);

// Little-endian 64-bit gaps, the first relative to 0.
void write_primes(const std::string& path, const PrimeTable& table);
PrimeTable read_primes(const std::string& path, std::uint64_t limit);

}  // namespace primeorbit
