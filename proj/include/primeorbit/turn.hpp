#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace primeorbit {

using u128 = unsigned __int128;

// A point of the circle R/Z stored as a 128-bit binary fraction. Addition and
// integer multiples wrap modulo 2^128, which is exactly reduction modulo 1, so
// orbit arithmetic on dyadic rationals is exact.
class Turn {
 public:
  constexpr Turn() = default;

  static constexpr Turn from_raw(u128 raw) {
    Turn t;
    t.raw_ = raw;
    return t;
  }
  // Nearest 2^-128 multiple to frac(x); error at most 2^-129.
  static Turn from_rational(const mpq_class& x);
  // Exact for every finite double (frac(x) has at most 53 significant bits).
  static Turn from_double(double x);

  constexpr u128 raw() const { return raw_; }

  // Truncates to 53 bits, so the result is in [0, 1) with error below 2^-53.
  double to_double() const {
    // Truncates to 53 significant bits, so the result stays below 1.
    auto hi = static_cast<std::uint64_t>(raw_ >> 64);
    int shift = std::max(0, 11 - std::countl_zero(hi));
    auto scale = std::bit_cast<double>(static_cast<std::uint64_t>(1023 + shift - 64) << 52);
    return static_cast<double>(hi >> shift) * scale;
  }
  mpq_class to_rational() const;

  constexpr Turn operator+(Turn o) const { return from_raw(raw_ + o.raw_); }
  constexpr Turn operator-(Turn o) const { return from_raw(raw_ - o.raw_); }
  constexpr Turn operator-() const { return from_raw(u128(0) - raw_); }
  constexpr Turn& operator+=(Turn o) {
    raw_ += o.raw_;
    return *this;
  }
  // k * x mod 1, exact.
  constexpr Turn times(std::int64_t k) const {
    u128 mag = k < 0 ? u128(0) - u128(static_cast<std::uint64_t>(-(k + 1)) + 1)
                     : u128(static_cast<std::uint64_t>(k));
    return from_raw(raw_ * mag);
  }
  constexpr Turn times_unsigned(u128 k) const { return from_raw(raw_ * k); }

  friend constexpr bool operator==(Turn a, Turn b) { return a.raw_ == b.raw_; }

 private:
  u128 raw_ = 0;
};

// Distance to the nearest point of the integer lattice of (a - b), in [0, 1/2].
double circle_distance(Turn a, Turn b);

inline constexpr double kTurnRoundingError = 0x1p-129;
inline constexpr double kTurnToDoubleError = 0x1p-53;

// Converts between mpz and u128 (the value must be below 2^128).
u128 to_u128(const mpz_class& v);
mpz_class from_u128(u128 v);

}  // namespace primeorbit
