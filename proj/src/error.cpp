#include "tissuegmm/error.hpp"

namespace tissuegmm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::MissingToolLandmarks: return "MissingToolLandmarks";
    case ErrorKind::MissingLabels: return "MissingLabels";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::InsufficientClusters: return "InsufficientClusters";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::EmptyClusterError: return "EmptyClusterError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::UnwrapError: return "UnwrapError";
    case ErrorKind::NumericalCollapse: return "NumericalCollapse";
  }
  return "Error";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateConfiguration:
    case ErrorKind::UnwrapError:
    case ErrorKind::NumericalCollapse:
    case ErrorKind::EmptyClusterError:
      return 3;
    default:
      return 2;
  }
}

}  // namespace tissuegmm
