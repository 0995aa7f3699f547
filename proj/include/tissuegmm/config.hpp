#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "tissuegmm/mixture.hpp"
#include "tissuegmm/synth.hpp"
#include "tissuegmm/tissue_frames.hpp"

namespace tissuegmm {

struct ComponentRange {
  int min = 10;
  int max = 30;

  bool single() const noexcept { return min == max; }
};

/// Parses "N" or "min..max". Throws ConfigError.
ComponentRange parse_component_range(const std::string& text);

struct PipelineConfig {
  ClusterSpec cluster;
  TrainConfig gmm;
  ComponentRange components;
  std::optional<int> split_train;
  std::optional<int> split_test;
  SceneConfig synth;
  std::optional<std::filesystem::path> tracks;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> out;
};

/// Loads a JSON config. Keys may be nested objects ({"gmm": {"N": 12}}) or
/// dotted ("gmm.N"). Recognised keys: cluster.{mode,k,seed}, reg.epsilon,
/// gmm.{N,max_iters,tol,floor,seed,restarts}, split.{train,test},
/// synth.{frame_count,cluster_count,points_per_cluster,drift_amplitude,
/// rotation_amplitude,noise_sigma,tool_path,seed}, io.{tracks,model,out}.
/// Unknown keys throw ConfigError; a missing file throws NotFound.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text);

}  // namespace tissuegmm
