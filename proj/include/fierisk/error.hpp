#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fierisk {

enum class ErrorKind {
  InvalidArgument,
  Domain,
  SingularSeries,
  NonInvertible,
  DegeneratePortfolio,
  Load,
  Fit,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library error. The message is prefixed with the module that raised it,
/// e.g. "fracdiff: d must lie in (-0.5, 0.5)".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view module, std::string_view message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace fierisk
