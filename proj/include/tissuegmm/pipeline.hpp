#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tissuegmm/config.hpp"
#include "tissuegmm/evaluation.hpp"
#include "tissuegmm/model_file.hpp"
#include "tissuegmm/regression.hpp"

namespace tissuegmm {

/// "a,b,c" or "grid:N" (N evenly spaced times over [0, 1]), sorted ascending.
std::vector<double> parse_times(const std::string& text);

/// "TRAIN/TEST".
SplitSpec parse_split(const std::string& text);

struct TrainSummary {
  ModelFile model;
  SelectionResult selection;
  double train_pos_px = 0.0;
  double train_angle_deg = 0.0;
  int train_frames = 0;
};

/// Writes the synthetic track CSV to `out`.
void run_synth(const PipelineConfig& config, const std::filesystem::path& out);

/// Trains on the head of the sequence (all frames unless a split is
/// configured), writes the model to `model_out` and a plain-text log to
/// `log_out`.
TrainSummary run_train(const PipelineConfig& config, const std::filesystem::path& tracks,
                       const std::filesystem::path& model_out,
                       const std::filesystem::path& log_out);

/// One predicted tool pose in image coordinates.
struct ImagePrediction {
  double time = 0.0;
  int frame = 1;  // frame whose tissue reference was used
  Vec2 position = Vec2::Zero();
  double angle = 0.0;  // radians, wrapped
  Mat2 covariance = Mat2::Zero();
  bool extrapolated = false;
};

/// Maps frame-relative predictions back to the image through the reference
/// frame of the nearest frame (clamped to the sequence).
std::vector<ImagePrediction> predict_in_image(const ModelFile& model, const TrackSet& tracks,
                                              const ClusterSpec& cluster,
                                              const std::vector<double>& times);

void run_predict(const PipelineConfig& config, const std::filesystem::path& model,
                 const std::filesystem::path& tracks, const std::vector<double>& times,
                 const std::filesystem::path& out);

/// Writes the error-curve CSV to `out` and the JSON summary next to it
/// (see summary_path).
EvalReport run_eval(const PipelineConfig& config, const std::filesystem::path& model,
                    const std::filesystem::path& tracks, const SplitSpec& split,
                    const std::filesystem::path& out);

std::filesystem::path summary_path(const std::filesystem::path& report);
std::filesystem::path log_path(const std::filesystem::path& model);

}  // namespace tissuegmm
