#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace primeorbit {

enum class ErrorKind {
  InvalidArgument,
  Precision,
  Budget,
  Domain,
  AmbiguousBoundary,
  FitFailure,
  Positivity,
  Quadrature,
  Parse,
  Validation,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every error carries the module that raised it so the run manifest can
// attribute failures without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string detail_;
};

// Raised when a flow time lands within tolerance of a roof crossing, so the
// number of completed base steps cannot be decided.
class AmbiguousBoundaryError : public Error {
 public:
  AmbiguousBoundaryError(std::uint64_t steps, double distance, double tolerance);

  // The step count the computation would have returned.
  std::uint64_t steps() const noexcept { return steps_; }
  double distance() const noexcept { return distance_; }

 private:
  std::uint64_t steps_;
  double distance_;
};

}  // namespace primeorbit
