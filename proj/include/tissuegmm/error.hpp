#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tissuegmm {

/// Failure classes surfaced by the library. Each maps to a stable token used
/// in CLI diagnostics and to a process exit code.
enum class ErrorKind {
  FormatError,
  ValidationError,
  EmptyInput,
  NotFound,
  VersionMismatch,
  ConfigError,
  UsageError,
  MissingToolLandmarks,
  MissingLabels,
  InsufficientPoints,
  InsufficientClusters,
  TooFewPoints,
  EmptyCluster,
  EmptyClusterError,
  DomainError,
  LengthMismatch,
  DegenerateConfiguration,
  UnwrapError,
  NumericalCollapse,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// 2 for input/usage problems, 3 for numerical failures.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace tissuegmm
