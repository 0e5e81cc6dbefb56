#include "primeorbit/error.hpp"

#include <sstream>

namespace primeorbit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Precision: return "precision";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::AmbiguousBoundary: return "ambiguous-boundary";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::Positivity: return "positivity";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {
std::string compose(ErrorKind kind, const std::string& module, const std::string& message) {
  std::string out = "[" + module + "] ";
  out += to_string(kind);
  out += ": ";
  out += message;
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(compose(kind, module, message)),
      kind_(kind),
      module_(std::move(module)),
      detail_(message) {}

static std::string ambiguous_message(std::uint64_t steps, double distance, double tolerance) {
  std::ostringstream os;
  os << "flow time lies " << distance << " from the roof crossing after " << steps
     << " steps (tolerance " << tolerance << ")";
  return os.str();
}

AmbiguousBoundaryError::AmbiguousBoundaryError(std::uint64_t steps, double distance,
                                               double tolerance)
    : Error(ErrorKind::AmbiguousBoundary, "special_flow",
            ambiguous_message(steps, distance, tolerance)),
      steps_(steps),
      distance_(distance) {}

}  // namespace primeorbit
