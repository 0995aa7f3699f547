#include "tissuegmm/tissue_frames.hpp"

#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tissuegmm/error.hpp"
#include "tissuegmm/synth.hpp"

namespace tissuegmm {
namespace {

using testing::kPi;

LandmarkSample tissue(const std::string& id, Vec2 p, std::optional<std::string> label = {}) {
  return {1, id, LandmarkRole::Tissue, std::move(label), p, true};
}

// Brute-force 2-means: enumerate every 2-colouring, keep the minimum
// within-cluster sum of squares.
std::vector<int> best_two_partition(const std::vector<Vec2>& pts) {
  const int n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_labels;
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    Vec2 mean[2] = {Vec2::Zero(), Vec2::Zero()};
    int count[2] = {0, 0};
    for (int i = 0; i < n; ++i) {
      const int c = (mask >> i) & 1;
      mean[c] += pts[i];
      ++count[c];
    }
    mean[0] /= count[0];
    mean[1] /= count[1];
    double wcss = 0.0;
    for (int i = 0; i < n; ++i) wcss += (pts[i] - mean[(mask >> i) & 1]).squaredNorm();
    if (wcss < best) {
      best = wcss;
      best_labels.assign(static_cast<size_t>(n), 0);
      for (int i = 0; i < n; ++i) best_labels[i] = (mask >> i) & 1;
    }
  }
  return best_labels;
}

TEST(DomainCluster, LabeledPartitionIsLexicographic) {
  const std::vector<LandmarkSample> pts = {tissue("a", {5, 5}, "B"), tissue("b", {0, 0}, "A"),
                                           tissue("c", {6, 6}, "B"), tissue("d", {1, 1}, "A")};
  const auto clusters = domain_cluster(pts, ClusterSpec{});
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0], (std::vector<Vec2>{{0, 0}, {1, 1}}));
  EXPECT_EQ(clusters[1], (std::vector<Vec2>{{5, 5}, {6, 6}}));
}

TEST(DomainCluster, LabeledModeNeedsLabels) {
  const std::vector<LandmarkSample> pts = {tissue("a", {5, 5}, "B"), tissue("b", {0, 0})};
  try {
    domain_cluster(pts, ClusterSpec{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingLabels);
  }
}

TEST(DomainCluster, KMeansMatchesExhaustiveOptimum) {
  const std::vector<Vec2> raw = {{0, 0}, {0, 1}, {10, 0}, {10, 1}};
  std::vector<LandmarkSample> pts;
  for (size_t i = 0; i < raw.size(); ++i) pts.push_back(tissue("p" + std::to_string(i), raw[i]));
  const std::vector<int> oracle = best_two_partition(raw);
  EXPECT_EQ(oracle[0], oracle[1]);
  EXPECT_EQ(oracle[2], oracle[3]);
  EXPECT_NE(oracle[0], oracle[2]);

  ClusterSpec spec;
  spec.mode = ClusterSpec::Mode::KMeans;
  spec.k = 2;
  spec.seed = 11;
  const auto clusters = domain_cluster(pts, spec);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0], (std::vector<Vec2>{{0, 0}, {0, 1}}));
  EXPECT_EQ(clusters[1], (std::vector<Vec2>{{10, 0}, {10, 1}}));
}

TEST(DomainCluster, KMeansRandomClustersMatchBruteForce) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> raw;
    std::vector<LandmarkSample> pts;
    for (int i = 0; i < 10; ++i) {
      const Vec2 p = (i < 5 ? Vec2(0, 0) : Vec2(8, 3)) + Vec2(n(rng), n(rng));
      raw.push_back(p);
      pts.push_back(tissue("p" + std::to_string(i), p));
    }
    const std::vector<int> oracle = best_two_partition(raw);
    ClusterSpec spec;
    spec.mode = ClusterSpec::Mode::KMeans;
    spec.k = 2;
    spec.seed = static_cast<std::uint64_t>(trial);
    const auto clusters = domain_cluster(pts, spec);
    // Rebuild labels from the clustering and compare partitions.
    for (size_t i = 0; i < raw.size(); ++i) {
      for (size_t j = 0; j < raw.size(); ++j) {
        const bool same_oracle = oracle[i] == oracle[j];
        bool same_impl = false;
        for (const auto& c : clusters) {
          const bool has_i = std::find(c.begin(), c.end(), raw[i]) != c.end();
          const bool has_j = std::find(c.begin(), c.end(), raw[j]) != c.end();
          same_impl |= has_i && has_j;
        }
        EXPECT_EQ(same_oracle, same_impl);
      }
    }
  }
}

TEST(DomainCluster, KMeansTooFewPoints) {
  const std::vector<LandmarkSample> pts = {tissue("a", {0, 0}), tissue("b", {1, 0}),
                                           tissue("c", {2, 0})};
  ClusterSpec spec;
  spec.mode = ClusterSpec::Mode::KMeans;
  spec.k = 5;
  try {
    domain_cluster(pts, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewPoints);
  }
}

TEST(DomainCluster, KMeansIsDeterministic) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 5.0);
  std::vector<LandmarkSample> pts;
  for (int i = 0; i < 30; ++i) pts.push_back(tissue("p" + std::to_string(i), {n(rng), n(rng)}));
  ClusterSpec spec;
  spec.mode = ClusterSpec::Mode::KMeans;
  spec.k = 3;
  spec.seed = 42;
  EXPECT_EQ(domain_cluster(pts, spec), domain_cluster(pts, spec));
}

TEST(ClusterGaussian, RankDeficientIsFloored) {
  const std::vector<Vec2> pts = {{1, 1}, {3, 3}};
  // Oracle: direct outer-product sum.
  Mat2 expected = Mat2::Zero();
  for (const auto& p : pts) expected += (p - Vec2(2, 2)) * (p - Vec2(2, 2)).transpose();
  expected /= 2.0;
  expected += kDefaultClusterEpsilon * Mat2::Identity();
  const ClusterStat s = cluster_gaussian(pts);
  EXPECT_EQ(s.mean, Vec2(2, 2));
  EXPECT_TRUE(s.covariance.isApprox(expected, 1e-12));
  EXPECT_EQ(s.member_count, 2);
}

TEST(ClusterGaussian, SinglePoint) {
  const std::vector<Vec2> pts = {{5, 5}};
  const ClusterStat s = cluster_gaussian(pts);
  EXPECT_EQ(s.mean, Vec2(5, 5));
  EXPECT_EQ(s.covariance, kDefaultClusterEpsilon * Mat2::Identity());
}

TEST(ClusterGaussian, FullRankIsUntouched) {
  const std::vector<Vec2> pts = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  const ClusterStat s = cluster_gaussian(pts);
  EXPECT_EQ(s.mean, Vec2(1, 1));
  EXPECT_EQ(s.covariance, Mat2::Identity());
}

TEST(ClusterGaussian, Empty) {
  try {
    cluster_gaussian(std::vector<Vec2>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCluster);
  }
}

std::vector<ClusterStat> stats_at(std::initializer_list<Vec2> means) {
  std::vector<ClusterStat> out;
  for (const auto& m : means) out.push_back({m, Mat2::Identity(), 1});
  return out;
}

TEST(ReferenceFrame, TwoPointPca) {
  const ReferenceFrame f = build_reference_frame(stats_at({{0, 0}, {4, 0}}));
  EXPECT_EQ(f.transform.translation(), Vec2(2, 0));
  EXPECT_NEAR(f.transform.rotation().angle(), 0.0, 1e-12);
}

TEST(ReferenceFrame, ContinuityFlip) {
  ReferenceFrame prev;
  prev.transform = Transform2(Rotation2(kPi), Vec2::Zero());
  const ReferenceFrame f = build_reference_frame(stats_at({{0, 0}, {4, 0}}), &prev);
  EXPECT_NEAR(std::abs(f.transform.rotation().angle()), kPi, 1e-12);
}

TEST(ReferenceFrame, InsufficientClusters) {
  try {
    build_reference_frame(stats_at({{1, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientClusters);
  }
}

// Two clusters on the x axis plus a tool; optionally moved rigidly.
TrackSet two_frame_scene(const Transform2& motion, double tool_angle_offset) {
  std::vector<LandmarkSample> s;
  for (int f = 1; f <= 2; ++f) {
    const double spread = f == 1 ? 1.0 : 1.5;
    const auto add = [&](const std::string& id, Vec2 p, LandmarkRole role,
                         std::optional<std::string> label) {
      s.push_back({f, id, role, std::move(label), motion.apply(p), true});
    };
    add("a0", {-20.0 * spread, 1}, LandmarkRole::Tissue, "A");
    add("a1", {-20.0 * spread, -1}, LandmarkRole::Tissue, "A");
    add("b0", {20.0 * spread, 1}, LandmarkRole::Tissue, "B");
    add("b1", {20.0 * spread, -1}, LandmarkRole::Tissue, "B");
    const Vec2 dir(std::cos(tool_angle_offset), std::sin(tool_angle_offset));
    add("tc", {0, 0}, LandmarkRole::ToolCenter, std::nullopt);
    add("tt", 10.0 * dir, LandmarkRole::ToolTip, std::nullopt);
  }
  return TrackSet::from_samples(std::move(s));
}

TEST(AssembleDatapoints, ToolAtReferenceOrigin) {
  const auto data = assemble_datapoints(two_frame_scene(Transform2::identity(), 0.0), ClusterSpec{});
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0].time, 0.0);
  EXPECT_EQ(data[1].time, 1.0);
  for (const auto& d : data) {
    EXPECT_NEAR(d.rel_position.norm(), 0.0, 1e-12);
    EXPECT_NEAR(d.rel_angle, 0.0, 1e-12);
  }
}

void expect_same(const std::vector<Datapoint>& a, const std::vector<Datapoint>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].time, b[i].time);
    EXPECT_NEAR((a[i].rel_position - b[i].rel_position).norm(), 0.0, tol) << i;
    EXPECT_NEAR(a[i].rel_angle, b[i].rel_angle, tol) << i;
  }
}

TEST(AssembleDatapoints, GlobalTranslationCancels) {
  const auto base = assemble_datapoints(two_frame_scene(Transform2::identity(), 0.4), ClusterSpec{});
  const auto moved = assemble_datapoints(
      two_frame_scene(Transform2(Rotation2(0.0), Vec2(50, -30)), 0.4), ClusterSpec{});
  expect_same(base, moved, 1e-9);
}

TEST(AssembleDatapoints, GlobalRotationCancels) {
  const auto base = assemble_datapoints(two_frame_scene(Transform2::identity(), 0.4), ClusterSpec{});
  const auto rotated = assemble_datapoints(
      two_frame_scene(Transform2(Rotation2(testing::deg(30)), Vec2::Zero()), 0.4), ClusterSpec{});
  expect_same(base, rotated, 1e-9);
}

TEST(AssembleDatapoints, KMeansModeMatchesLabels) {
  SceneConfig cfg;
  cfg.frame_count = 20;
  cfg.noise_sigma = 0.0;
  const Scene scene = generate_scene(cfg);
  ClusterSpec kmeans;
  kmeans.mode = ClusterSpec::Mode::KMeans;
  kmeans.k = cfg.cluster_count;
  kmeans.seed = 3;
  expect_same(assemble_datapoints(scene.tracks, ClusterSpec{}),
              assemble_datapoints(scene.tracks, kmeans), 1e-9);
}

TEST(AssembleDatapoints, TimesAndUnwrapInvariants) {
  SceneConfig cfg;
  cfg.frame_count = 60;
  cfg.tool_path = ToolPath::Arc;
  const auto frames = assemble_frames(generate_scene(cfg).tracks, ClusterSpec{});
  EXPECT_EQ(frames.front().datapoint.time, 0.0);
  EXPECT_EQ(frames.back().datapoint.time, 1.0);
  for (size_t i = 1; i < frames.size(); ++i) {
    EXPECT_LT(frames[i - 1].datapoint.time, frames[i].datapoint.time);
    EXPECT_LT(std::abs(frames[i].datapoint.rel_angle - frames[i - 1].datapoint.rel_angle), kPi);
    EXPECT_GE(frames[i].frame.transform.rotation().first_axis().dot(
                  frames[i - 1].frame.transform.rotation().first_axis()),
              0.0);
  }
}

TEST(AssembleDatapoints, UnwrapsThroughPi) {
  // Tool spins slowly through +-pi relative to a fixed tissue frame.
  std::vector<LandmarkSample> s;
  const int T = 40;
  for (int f = 1; f <= T; ++f) {
    const double a = 2.8 + 0.02 * (f - 1);
    s.push_back({f, "a", LandmarkRole::Tissue, "A", {-10, 0}, true});
    s.push_back({f, "b", LandmarkRole::Tissue, "B", {10, 0}, true});
    s.push_back({f, "tc", LandmarkRole::ToolCenter, std::nullopt, {0, 0}, true});
    s.push_back({f, "tt", LandmarkRole::ToolTip, std::nullopt, {std::cos(a), std::sin(a)}, true});
  }
  const auto data = assemble_datapoints(TrackSet::from_samples(std::move(s)), ClusterSpec{});
  for (int f = 0; f < T; ++f) EXPECT_NEAR(data[f].rel_angle, 2.8 + 0.02 * f, 1e-12);
}

TEST(AssembleDatapoints, HalfTurnJumpIsAmbiguous) {
  std::vector<LandmarkSample> s;
  for (int f = 1; f <= 2; ++f) {
    const double a = f == 1 ? 0.0 : kPi;
    s.push_back({f, "a", LandmarkRole::Tissue, "A", {-10, 0}, true});
    s.push_back({f, "b", LandmarkRole::Tissue, "B", {10, 0}, true});
    s.push_back({f, "tc", LandmarkRole::ToolCenter, std::nullopt, {0, 0}, true});
    s.push_back({f, "tt", LandmarkRole::ToolTip, std::nullopt, {std::cos(a), std::sin(a)}, true});
  }
  try {
    assemble_datapoints(TrackSet::from_samples(std::move(s)), ClusterSpec{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnwrapError);
  }
}

}  // namespace
}  // namespace tissuegmm
