#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tissuegmm/geometry2d.hpp"

namespace tissuegmm {

enum class LandmarkRole { ToolCenter, ToolTip, Tissue };

std::string_view to_string(LandmarkRole role) noexcept;
std::optional<LandmarkRole> parse_role(std::string_view text) noexcept;

struct LandmarkSample {
  int frame = 1;  // 1-based
  std::string track_id;
  LandmarkRole role = LandmarkRole::Tissue;
  std::optional<std::string> cluster_label;  // tissue only
  Vec2 position = Vec2::Zero();
  bool visible = true;

  bool operator==(const LandmarkSample&) const = default;
};

struct TrackValidation {
  /// Smallest cluster count the downstream clustering will ask for; every
  /// frame needs at least 2 * min_clusters visible tissue samples.
  int min_clusters = 1;
};

/// All landmark samples of a sequence, grouped by frame and ordered by
/// (frame, track_id) within the set. Immutable once built.
class TrackSet {
 public:
  /// Validates and takes ownership of `samples`. Throws ValidationError if a
  /// frame in 1..T lacks visible tool landmarks or tissue samples, a track id
  /// changes role, a (frame, track_id) pair repeats, or a tool sample carries
  /// a cluster label. Throws EmptyInput for an empty list.
  static TrackSet from_samples(std::vector<LandmarkSample> samples,
                               const TrackValidation& validation = {});

  int frame_count() const noexcept { return static_cast<int>(frame_offsets_.size()) - 1; }

  /// Samples of a 1-based frame, including invisible ones.
  std::span<const LandmarkSample> frame(int index) const;

  const std::vector<LandmarkSample>& samples() const noexcept { return samples_; }

  /// True if every tissue sample carries a cluster label.
  bool fully_labeled() const noexcept;

  bool operator==(const TrackSet& other) const { return samples_ == other.samples_; }

 private:
  std::vector<LandmarkSample> samples_;
  std::vector<size_t> frame_offsets_;  // size T + 1
};

/// Reads the track CSV (`frame,track_id,role,cluster_label,x,y,visible`).
/// Lines starting with '#' and blank lines are ignored.
TrackSet parse_tracks(std::istream& in, const TrackValidation& validation = {});
TrackSet parse_tracks(const std::filesystem::path& path, const TrackValidation& validation = {});

/// Writes the track CSV with rows sorted by frame then track_id.
void write_tracks(std::ostream& out, const TrackSet& tracks);
void write_tracks(const std::filesystem::path& path, const TrackSet& tracks);

/// Tool pose of one frame: centroid of the visible tool_center samples and
/// the heading of the centre-to-tip centroid vector.
/// Throws MissingToolLandmarks if either role has no visible sample.
Pose2 tool_pose(std::span<const LandmarkSample> frame);

}  // namespace tissuegmm
