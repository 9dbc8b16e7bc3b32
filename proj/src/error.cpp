#include "fierisk/error.hpp"

namespace fierisk {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::SingularSeries: return "singular-series";
    case ErrorKind::NonInvertible: return "non-invertible";
    case ErrorKind::DegeneratePortfolio: return "degenerate-portfolio";
    case ErrorKind::Load: return "load";
    case ErrorKind::Fit: return "fit";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string_view module, std::string_view message)
    : std::runtime_error(std::string(module) + ": " + std::string(message)),
      kind_(kind),
      module_(module) {}

}  // namespace fierisk
