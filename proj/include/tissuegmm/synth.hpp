#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tissuegmm/datapoint.hpp"
#include "tissuegmm/tracks_io.hpp"

namespace tissuegmm {

enum class ToolPath { Line, Arc, CutStroke };

std::string_view to_string(ToolPath path) noexcept;
std::optional<ToolPath> parse_tool_path(std::string_view text) noexcept;

struct SceneConfig {
  int frame_count = 156;
  int cluster_count = 4;
  int points_per_cluster = 6;
  double drift_amplitude = 30.0;     // px
  double rotation_amplitude = 0.25;  // rad
  double noise_sigma = 1.0;          // px, tissue landmarks only
  ToolPath tool_path = ToolPath::CutStroke;
  std::uint64_t seed = 0;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

struct Scene {
  TrackSet tracks;
  /// Tool pose in the tissue frame, exact by construction.
  std::vector<Datapoint> ground_truth;
};

/// Tissue clusters laid out symmetrically about their own principal axis,
/// moved by a smooth rigid motion with per-point jitter; the tool follows
/// `tool_path` in the moving tissue frame. Cluster labels are always set.
Scene generate_scene(const SceneConfig& config);

/// Applies `transform` to every landmark position.
TrackSet transform_tracks(const TrackSet& tracks, const Transform2& transform);

}  // namespace tissuegmm
