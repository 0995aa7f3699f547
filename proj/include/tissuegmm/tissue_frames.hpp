#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tissuegmm/datapoint.hpp"
#include "tissuegmm/geometry2d.hpp"
#include "tissuegmm/tracks_io.hpp"

namespace tissuegmm {

/// Covariance floor (pixels^2) applied to rank-deficient tissue clusters.
inline constexpr double kDefaultClusterEpsilon = 1e-6;

struct ClusterSpec {
  enum class Mode { Labeled, KMeans };

  Mode mode = Mode::Labeled;
  int k = 2;  // k-means only
  std::uint64_t seed = 0;
  double epsilon = kDefaultClusterEpsilon;

  void validate() const;
};

struct ClusterStat {
  Vec2 mean = Vec2::Zero();
  Mat2 covariance = Mat2::Zero();
  int member_count = 0;
};

struct ReferenceFrame {
  Transform2 transform;
  int timestamp = 0;  // frame index
  std::vector<ClusterStat> cluster_stats;
  bool isotropic = false;
};

/// Groups the visible tissue samples of one frame.
///
/// Labeled mode partitions by cluster_label, clusters in lexicographic label
/// order. K-means mode runs seeded k-means++ / Lloyd and orders clusters by
/// ascending mean x, then mean y.
std::vector<std::vector<Vec2>> domain_cluster(std::span<const LandmarkSample> tissue,
                                              const ClusterSpec& spec);

/// Mean and population covariance of a cluster; epsilon * I is added when
/// the smallest eigenvalue is below epsilon. Throws EmptyCluster.
ClusterStat cluster_gaussian(std::span<const Vec2> cluster,
                             double epsilon = kDefaultClusterEpsilon);

/// Origin at the average cluster mean, first axis along the principal
/// direction of the cluster means, sign kept continuous with `prev`.
ReferenceFrame build_reference_frame(std::vector<ClusterStat> stats,
                                     const ReferenceFrame* prev = nullptr);

/// Everything derived for one frame of the sequence.
struct FrameRecord {
  ReferenceFrame frame;
  Pose2 tool;
  Datapoint datapoint;
};

/// Runs the per-frame pipeline: cluster, Gaussians, reference frame (chained
/// across frames for sign continuity), tool pose, frame-relative pose. The
/// relative angle is unwrapped along the sequence and time is normalized as
/// (frame - 1) / (T - 1). Throws UnwrapError when consecutive relative angles
/// differ by pi or more.
std::vector<FrameRecord> assemble_frames(const TrackSet& tracks, const ClusterSpec& spec);

std::vector<Datapoint> assemble_datapoints(const TrackSet& tracks, const ClusterSpec& spec);

/// Normalized time of a 1-based frame index in a sequence of T frames.
double normalized_time(int frame, int frame_count) noexcept;

}  // namespace tissuegmm
