#include "primeorbit/primes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "primeorbit/error.hpp"
#include "primeorbit/primality.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "prime_tools";

std::vector<std::uint32_t> small_primes(std::uint64_t n) {
  std::vector<char> comp(n + 1, 0);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = 1;
  }
  return out;
}

// Primes in [lo, hi) using base primes up to sqrt(hi).
void sieve_range(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint32_t>& base, std::size_t segment,
                 std::vector<std::uint32_t>& out) {
  std::vector<char> flags(segment);
  for (std::uint64_t s = lo; s < hi; s += segment) {
    std::uint64_t e = std::min<std::uint64_t>(s + segment, hi);
    std::fill(flags.begin(), flags.begin() + static_cast<std::ptrdiff_t>(e - s), 1);
    for (std::uint32_t p : base) {
      std::uint64_t pp = static_cast<std::uint64_t>(p) * p;
      if (pp >= e) break;
      std::uint64_t start = std::max(pp, (s + p - 1) / p * p);
      for (std::uint64_t j = start; j < e; j += p) flags[j - s] = 0;
    }
    for (std::uint64_t i = std::max<std::uint64_t>(s, 2); i < e; ++i) {
      if (flags[i - s]) out.push_back(static_cast<std::uint32_t>(i));
    }
  }
}

}  // namespace

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes)
    : limit_(limit), primes_(std::move(primes)) {}

PrimeTable& PrimeTable::operator=(const PrimeTable& other) {
  if (this != &other) {
    limit_ = other.limit_;
    primes_ = other.primes_;
    std::lock_guard<std::mutex> lock(cache_mutex_);
    residue_cache_.clear();
  }
  return *this;
}

void PrimeTable::check_range(std::uint64_t x) const {
  if (x > limit_) {
    throw Error(ErrorKind::Domain, kModule,
                "x = " + std::to_string(x) + " beyond sieve limit " + std::to_string(limit_));
  }
}

std::uint64_t PrimeTable::pi(std::uint64_t x) const {
  check_range(x);
  return static_cast<std::uint64_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

std::vector<std::uint64_t> PrimeTable::residue_counts(std::uint64_t x, std::uint64_t q) const {
  check_range(x);
  if (q == 0) throw Error(ErrorKind::InvalidArgument, kModule, "modulus must be positive");
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto key = std::make_pair(x, q);
  auto it = residue_cache_.find(key);
  if (it != residue_cache_.end()) return it->second;
  std::vector<std::uint64_t> counts(q, 0);
  for (std::uint32_t p : primes_) {
    if (p > x) break;
    ++counts[p % q];
  }
  residue_cache_.emplace(key, counts);
  return counts;
}

std::uint64_t PrimeTable::pi(std::uint64_t x, std::uint64_t q, std::uint64_t a) const {
  if (q == 0 || a >= q) throw Error(ErrorKind::InvalidArgument, kModule, "need 0 <= a < q");
  return residue_counts(x, q)[a];
}

PrimeTable sieve(std::uint64_t limit, const SieveOptions& opts) {
  if (limit < 2) throw Error(ErrorKind::InvalidArgument, kModule, "sieve limit must be at least 2");
  std::uint64_t ceiling = std::min<std::uint64_t>(opts.ceiling, 0xffffffffull);
  if (limit > ceiling) {
    throw Error(ErrorKind::Budget, kModule,
                "sieve limit " + std::to_string(limit) + " above ceiling " + std::to_string(ceiling));
  }
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
  while (root * root > limit) --root;
  while ((root + 1) * (root + 1) <= limit) ++root;
  auto base = small_primes(root);
  unsigned workers = std::max(1u, opts.workers);
  std::uint64_t span = limit + 1;
  std::vector<std::vector<std::uint32_t>> parts(workers);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t lo = span * w / workers;
    std::uint64_t hi = span * (w + 1) / workers;
    auto job = [&, lo, hi, w] { sieve_range(lo, hi, base, opts.segment, parts[w]); };
    if (workers == 1) {
      job();
    } else {
      threads.emplace_back(job);
    }
  }
  for (auto& t : threads) t.join();
  std::vector<std::uint32_t> primes;
  for (auto& p : parts) primes.insert(primes.end(), p.begin(), p.end());
  return PrimeTable(limit, std::move(primes));
}

double li_x(double x) {
  if (!(x >= 2.0)) throw Error(ErrorKind::Domain, kModule, "Li(x) needs x >= 2");
  if (x == 2.0) return 0.0;
  // Substituting t = e^u removes the steep 1/log t region near 2.
  auto g = [](double u) { return std::exp(u) / u; };
  double a = std::log(2.0), b = std::log(x);
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, 30, 1e-13, &err);
  if (!(err <= 1e-10 * std::abs(v))) {
    throw Error(ErrorKind::Quadrature, kModule, "Li(x) quadrature did not reach 1e-10 relative error");
  }
  return v;
}

SwRatio sw_ratio(const PrimeTable& table, std::uint64_t x, std::uint64_t q, std::uint64_t a) {
  if (x < 2) throw Error(ErrorKind::Domain, kModule, "x must be at least 2");
  if (q < 2 || a >= q) throw Error(ErrorKind::InvalidArgument, kModule, "need q >= 2 and 0 <= a < q");
  SwRatio r;
  r.count = table.pi(x, q, a);
  r.li = li_x(static_cast<double>(x));
  r.ratio = static_cast<double>(r.count) * static_cast<double>(q - 1) / r.li;
  r.q_prime = is_prime_u64(q);
  r.coprime = std::gcd(q, a) == 1;
  double lx = std::log(static_cast<double>(x));
  r.in_range = static_cast<double>(q) < lx * lx;
  return r;
}

void write_primes(const std::string& path, const PrimeTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, kModule, "cannot open " + path + " for writing");
  std::uint64_t prev = 0;
  for (std::uint32_t p : table.primes()) {
    std::uint64_t d = p - prev;
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(d >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
    prev = p;
  }
  if (!out) throw Error(ErrorKind::Io, kModule, "write to " + path + " failed");
}

PrimeTable read_primes(const std::string& path, std::uint64_t limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, kModule, "cannot open " + path);
  std::vector<std::uint32_t> primes;
  std::uint64_t prev = 0;
  unsigned char b[8];
  while (in.read(reinterpret_cast<char*>(b), 8)) {
    std::uint64_t d = 0;
    for (int i = 0; i < 8; ++i) d |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    prev += d;
    if (d == 0 || prev > limit) throw Error(ErrorKind::Parse, kModule, "prime file inconsistent with limit");
    primes.push_back(static_cast<std::uint32_t>(prev));
  }
  if (in.gcount() != 0) throw Error(ErrorKind::Parse, kModule, "prime file length is not a multiple of 8");
  return PrimeTable(limit, std::move(primes));
}

}  // namespace primeorbit
