#include "tissuegmm/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "tissuegmm/error.hpp"
#include "tissuegmm/tissue_frames.hpp"

namespace tissuegmm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClusterSpacing = 60.0;  // px along the tissue axis
constexpr double kClusterBend = 10.0;     // px of symmetric bow across the axis
constexpr double kClusterRadius = 6.0;    // px member spread
constexpr double kToolLength = 40.0;      // px centre-to-tip
constexpr double kBaseAngle = 0.15;       // rad, tissue axis at rest
const Vec2 kImageCenter(320.0, 256.0);

struct LocalPose {
  Vec2 position;
  double angle;
};

LocalPose tool_in_tissue(ToolPath path, double s) {
  switch (path) {
    case ToolPath::Line:
      return {Vec2(-60.0 + 120.0 * s, 35.0), 0.25};
    case ToolPath::Arc: {
      const double a = 5.0 * kPi / 6.0 - 2.0 * kPi / 3.0 * s;
      return {Vec2(0.0, -20.0) + 70.0 * Vec2(std::cos(a), std::sin(a)), a - kPi / 2.0};
    }
    case ToolPath::CutStroke:
      return {Vec2(-70.0 + 140.0 * s, 30.0 + 18.0 * std::sin(2.0 * kPi * s) - 12.0 * s * s),
              -1.1 + 0.45 * std::sin(1.5 * kPi * s)};
  }
  return {Vec2::Zero(), 0.0};
}

// Rigid placement of the tissue frame in the image at normalized time s.
Transform2 tissue_motion(const SceneConfig& c, double s) {
  const double angle = kBaseAngle + c.rotation_amplitude * std::sin(kPi * s);
  const Vec2 drift = c.drift_amplitude * Vec2(0.8 * std::sin(kPi * s), 0.6 * std::sin(2.0 * kPi * s));
  return Transform2(Rotation2(angle), kImageCenter + drift);
}

std::string padded(int value) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", value);
  return buf;
}

}  // namespace

std::string_view to_string(ToolPath path) noexcept {
  switch (path) {
    case ToolPath::Line: return "line";
    case ToolPath::Arc: return "arc";
    case ToolPath::CutStroke: return "cut_stroke";
  }
  return "line";
}

std::optional<ToolPath> parse_tool_path(std::string_view text) noexcept {
  if (text == "line") return ToolPath::Line;
  if (text == "arc") return ToolPath::Arc;
  if (text == "cut_stroke") return ToolPath::CutStroke;
  return std::nullopt;
}

void SceneConfig::validate() const {
  if (frame_count < 2) fail(ErrorKind::ConfigError, "synth.frame_count must be >= 2");
  if (cluster_count < 2) fail(ErrorKind::ConfigError, "synth.cluster_count must be >= 2");
  if (points_per_cluster < 1) fail(ErrorKind::ConfigError, "synth.points_per_cluster must be >= 1");
  if (!(drift_amplitude >= 0.0) || !(rotation_amplitude >= 0.0) || !(noise_sigma >= 0.0)) {
    fail(ErrorKind::ConfigError, "synth amplitudes must be >= 0");
  }
  if (rotation_amplitude + kBaseAngle >= kPi / 2.0) {
    fail(ErrorKind::ConfigError, "synth.rotation_amplitude must stay below 1.4 rad");
  }
}

Scene generate_scene(const SceneConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int k = config.cluster_count;
  const int m = config.points_per_cluster;

  // Centres are symmetric in x with an even bow in y, so their mean is the
  // origin and their principal axis is exactly +x.
  std::vector<Vec2> centers;
  double mean_x2 = 0.0;
  for (int i = 0; i < k; ++i) {
    const double x = kClusterSpacing * (i - (k - 1) / 2.0);
    centers.emplace_back(x, 0.0);
    mean_x2 += x * x / k;
  }
  for (auto& c : centers) {
    c.y() = kClusterBend * (c.x() * c.x() - mean_x2) / (kClusterSpacing * kClusterSpacing * k);
  }

  // Member offsets with zero mean per cluster.
  std::vector<std::vector<Vec2>> members(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    Vec2 mean = Vec2::Zero();
    for (int j = 0; j < m; ++j) {
      const Vec2 o = kClusterRadius * Vec2(normal(rng), normal(rng));
      members[static_cast<size_t>(i)].push_back(o);
      mean += o;
    }
    mean /= m;
    for (auto& o : members[static_cast<size_t>(i)]) o = centers[static_cast<size_t>(i)] + (o - mean);
  }

  std::vector<LandmarkSample> samples;
  std::vector<Datapoint> truth;
  for (int f = 1; f <= config.frame_count; ++f) {
    const double s = normalized_time(f, config.frame_count);
    const Transform2 motion = tissue_motion(config, s);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m; ++j) {
        Vec2 p = motion.apply(members[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        if (config.noise_sigma > 0.0) {
          p += config.noise_sigma * Vec2(normal(rng), normal(rng));
        }
        samples.push_back({f, "t" + padded(i) + "_" + padded(j), LandmarkRole::Tissue,
                           "c" + padded(i), p, true});
      }
    }
    const LocalPose tool = tool_in_tissue(config.tool_path, s);
    const Vec2 tip = tool.position + kToolLength * Vec2(std::cos(tool.angle), std::sin(tool.angle));
    samples.push_back({f, "tool_center", LandmarkRole::ToolCenter, std::nullopt,
                       motion.apply(tool.position), true});
    samples.push_back({f, "tool_tip", LandmarkRole::ToolTip, std::nullopt, motion.apply(tip), true});
    truth.push_back({s, tool.position, tool.angle});
  }

  TrackValidation validation;
  validation.min_clusters = 1;
  return Scene{TrackSet::from_samples(std::move(samples), validation), std::move(truth)};
}

TrackSet transform_tracks(const TrackSet& tracks, const Transform2& transform) {
  std::vector<LandmarkSample> samples = tracks.samples();
  for (auto& s : samples) s.position = transform.apply(s.position);
  return TrackSet::from_samples(std::move(samples));
}

}  // namespace tissuegmm
