#include "tissuegmm/tissue_frames.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "tissuegmm/error.hpp"
#include "tissuegmm/kmeans.hpp"

namespace tissuegmm {

void ClusterSpec::validate() const {
  if (k < 1) fail(ErrorKind::ConfigError, "cluster.k must be >= 1");
  if (!(epsilon > 0.0)) fail(ErrorKind::ConfigError, "reg.epsilon must be > 0");
}

std::vector<std::vector<Vec2>> domain_cluster(std::span<const LandmarkSample> tissue,
                                              const ClusterSpec& spec) {
  spec.validate();
  std::vector<const LandmarkSample*> visible;
  for (const auto& s : tissue) {
    if (s.visible && s.role == LandmarkRole::Tissue) visible.push_back(&s);
  }

  if (spec.mode == ClusterSpec::Mode::Labeled) {
    std::map<std::string, std::vector<Vec2>> groups;
    for (const auto* s : visible) {
      if (!s->cluster_label) {
        fail(ErrorKind::MissingLabels, "tissue track '" + s->track_id + "' in frame " +
                                           std::to_string(s->frame) + " has no cluster label");
      }
      groups[*s->cluster_label].push_back(s->position);
    }
    std::vector<std::vector<Vec2>> clusters;
    clusters.reserve(groups.size());
    for (auto& [label, pts] : groups) clusters.push_back(std::move(pts));
    return clusters;
  }

  if (static_cast<int>(visible.size()) < spec.k) {
    fail(ErrorKind::TooFewPoints, std::to_string(visible.size()) +
                                      " tissue points for k=" + std::to_string(spec.k));
  }
  Eigen::MatrixXd points(static_cast<Eigen::Index>(visible.size()), 2);
  for (size_t i = 0; i < visible.size(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) = visible[i]->position.transpose();
  }
  std::mt19937_64 rng(spec.seed);
  const KMeansResult km = kmeans(points, spec.k, rng);

  std::vector<std::vector<Vec2>> clusters(static_cast<size_t>(spec.k));
  for (size_t i = 0; i < visible.size(); ++i) {
    clusters[static_cast<size_t>(km.labels[i])].push_back(visible[i]->position);
  }
  std::vector<std::pair<Vec2, size_t>> order;
  for (size_t c = 0; c < clusters.size(); ++c) {
    Vec2 mean = Vec2::Zero();
    for (const auto& p : clusters[c]) mean += p;
    order.emplace_back(mean / static_cast<double>(clusters[c].size()), c);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first.x() != b.first.x()) return a.first.x() < b.first.x();
    return a.first.y() < b.first.y();
  });
  std::vector<std::vector<Vec2>> sorted;
  sorted.reserve(clusters.size());
  for (const auto& [mean, index] : order) sorted.push_back(std::move(clusters[index]));
  return sorted;
}

ClusterStat cluster_gaussian(std::span<const Vec2> cluster, double epsilon) {
  if (cluster.empty()) fail(ErrorKind::EmptyCluster, "cannot fit a Gaussian to an empty cluster");
  ClusterStat stat;
  stat.member_count = static_cast<int>(cluster.size());
  for (const auto& p : cluster) stat.mean += p;
  stat.mean /= static_cast<double>(cluster.size());
  for (const auto& p : cluster) {
    const Vec2 d = p - stat.mean;
    stat.covariance += d * d.transpose();
  }
  stat.covariance /= static_cast<double>(cluster.size());
  const Eigen::SelfAdjointEigenSolver<Mat2> solver(stat.covariance, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < epsilon) stat.covariance += epsilon * Mat2::Identity();
  return stat;
}

ReferenceFrame build_reference_frame(std::vector<ClusterStat> stats, const ReferenceFrame* prev) {
  if (stats.size() < 2) {
    fail(ErrorKind::InsufficientClusters, "reference frame needs at least two clusters, got " +
                                              std::to_string(stats.size()));
  }
  std::vector<Vec2> means;
  means.reserve(stats.size());
  Vec2 origin = Vec2::Zero();
  for (const auto& s : stats) {
    means.push_back(s.mean);
    origin += s.mean;
  }
  origin /= static_cast<double>(stats.size());

  std::optional<Vec2> prev_axis;
  if (prev) prev_axis = prev->transform.rotation().first_axis();
  const PcaAxis axis = pca_axis(means, prev_axis);

  ReferenceFrame frame;
  frame.transform = Transform2(axis.rotation, origin);
  frame.cluster_stats = std::move(stats);
  frame.isotropic = axis.isotropic;
  return frame;
}

double normalized_time(int frame, int frame_count) noexcept {
  return static_cast<double>(frame - 1) / static_cast<double>(frame_count - 1);
}

std::vector<FrameRecord> assemble_frames(const TrackSet& tracks, const ClusterSpec& spec) {
  const int T = tracks.frame_count();
  if (T < 2) fail(ErrorKind::ValidationError, "need at least two frames");

  std::vector<FrameRecord> records;
  records.reserve(static_cast<size_t>(T));
  double prev_raw = 0.0;
  for (int f = 1; f <= T; ++f) {
    const auto samples = tracks.frame(f);
    std::vector<ClusterStat> stats;
    for (const auto& cluster : domain_cluster(samples, spec)) {
      stats.push_back(cluster_gaussian(cluster, spec.epsilon));
    }
    FrameRecord rec;
    rec.frame = build_reference_frame(std::move(stats), records.empty() ? nullptr : &records.back().frame);
    rec.frame.timestamp = f;
    rec.tool = tool_pose(samples);

    const double raw = relative_angle(rec.frame.transform.rotation(), rec.tool.orientation);
    rec.datapoint.time = normalized_time(f, T);
    rec.datapoint.rel_position = apply_inverse(rec.frame.transform, rec.tool.position);
    if (records.empty()) {
      rec.datapoint.rel_angle = raw;
    } else {
      const double step = shortest_angle_diff(prev_raw, raw);
      if (std::abs(step) >= std::numbers::pi) {
        fail(ErrorKind::UnwrapError, "relative tool angle jumps by pi between frames " +
                                         std::to_string(f - 1) + " and " + std::to_string(f));
      }
      rec.datapoint.rel_angle = records.back().datapoint.rel_angle + step;
    }
    prev_raw = raw;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<Datapoint> assemble_datapoints(const TrackSet& tracks, const ClusterSpec& spec) {
  std::vector<Datapoint> out;
  for (auto& rec : assemble_frames(tracks, spec)) out.push_back(rec.datapoint);
  return out;
}

}  // namespace tissuegmm
