#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "tissuegmm/mixture.hpp"

namespace tissuegmm {

inline constexpr int kModelFormatVersion = 1;

/// On-disk form of a trained mixture. Serialized as JSON text whose keys are
/// exactly: format_version, dimension, component_count, priors, means,
/// covariances, time_normalization {frame_count}, frame_provenance.
struct ModelFile {
  int format_version = kModelFormatVersion;
  int dimension = 4;
  MixtureModel model;
  int frame_count = 0;  // T used for time normalization
  std::map<std::string, std::string> provenance;

  /// Throws ValidationError if the mixture violates its invariants.
  void validate() const;
};

void write_model(std::ostream& out, const ModelFile& model);
void write_model(const std::filesystem::path& path, const ModelFile& model);

/// Throws FormatError for malformed or unknown keys, VersionMismatch for an
/// unsupported format_version, ValidationError for invariant violations and
/// NotFound when the file cannot be opened.
ModelFile read_model(std::istream& in);
ModelFile read_model(const std::filesystem::path& path);

}  // namespace tissuegmm
