#include "tissuegmm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "text_util.hpp"
#include "tissuegmm/error.hpp"
#include "tissuegmm/synth.hpp"
#include "tissuegmm/tissue_frames.hpp"

namespace tissuegmm {
namespace {

using detail::format_double;

TrackValidation validation_for(const ClusterSpec& spec) {
  TrackValidation v;
  v.min_clusters = spec.mode == ClusterSpec::Mode::KMeans ? spec.k : 1;
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::NotFound, "cannot write " + path.string());
  return out;
}

std::string cluster_mode_name(const ClusterSpec& spec) {
  return spec.mode == ClusterSpec::Mode::Labeled ? "labeled" : "kmeans";
}

}  // namespace

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> times;
  if (text.rfind("grid:", 0) == 0) {
    const auto n = detail::parse_int(std::string_view(text).substr(5));
    if (!n || *n < 1) fail(ErrorKind::UsageError, "grid size must be a positive integer");
    if (*n == 1) return {0.0};
    for (long long i = 0; i < *n; ++i) times.push_back(static_cast<double>(i) / static_cast<double>(*n - 1));
    return times;
  }
  for (auto part : detail::split(text, ',')) {
    const auto v = detail::parse_double(part);
    if (!v || !std::isfinite(*v)) {
      fail(ErrorKind::UsageError, "bad time value '" + std::string(part) + "'");
    }
    times.push_back(*v);
  }
  std::sort(times.begin(), times.end());
  return times;
}

SplitSpec parse_split(const std::string& text) {
  const auto parts = detail::split(text, '/');
  if (parts.size() != 2) fail(ErrorKind::UsageError, "split must look like TRAIN/TEST");
  const auto train = detail::parse_int(parts[0]);
  const auto test = detail::parse_int(parts[1]);
  if (!train || !test) fail(ErrorKind::UsageError, "split counts must be integers");
  return SplitSpec(static_cast<int>(*train), static_cast<int>(*test));
}

std::filesystem::path summary_path(const std::filesystem::path& report) {
  std::filesystem::path p = report;
  return p.replace_extension(".summary.json");
}

std::filesystem::path log_path(const std::filesystem::path& model) {
  std::filesystem::path p = model;
  return p.replace_extension(".log");
}

void run_synth(const PipelineConfig& config, const std::filesystem::path& out) {
  const Scene scene = generate_scene(config.synth);
  write_tracks(out, scene.tracks);
}

TrainSummary run_train(const PipelineConfig& config, const std::filesystem::path& tracks_path,
                       const std::filesystem::path& model_out,
                       const std::filesystem::path& log_out) {
  const TrackSet tracks = parse_tracks(tracks_path, validation_for(config.cluster));
  const std::vector<Datapoint> all = assemble_datapoints(tracks, config.cluster);

  std::vector<Datapoint> train = all;
  if (config.split_train || config.split_test) {
    if (!config.split_train || !config.split_test) {
      fail(ErrorKind::ConfigError, "split.train and split.test must be given together");
    }
    train = split(all, SplitSpec(*config.split_train, *config.split_test)).first;
  }

  TrainSummary summary;
  summary.train_frames = static_cast<int>(train.size());
  summary.selection =
      select_components(train, config.components.min, config.components.max, config.gmm);
  const MixtureModel& model = summary.selection.best.model;

  double pos = 0.0;
  double ang = 0.0;
  for (const auto& d : train) {
    pos += position_error(gmr(model, d.time).position_mean, d.rel_position);
    ang += angle_error(predict_orientation(model, d.time), d.rel_angle);
  }
  summary.train_pos_px = pos / static_cast<double>(train.size());
  summary.train_angle_deg = ang / static_cast<double>(train.size());

  ModelFile& file = summary.model;
  file.model = model;
  file.frame_count = tracks.frame_count();
  file.provenance = {
      {"tracks", tracks_path.filename().string()},
      {"train_frames", std::to_string(train.size())},
      {"cluster.mode", cluster_mode_name(config.cluster)},
      {"cluster.k", std::to_string(config.cluster.k)},
      {"cluster.seed", std::to_string(config.cluster.seed)},
      {"reg.epsilon", format_double(config.cluster.epsilon)},
      {"gmm.seed", std::to_string(config.gmm.seed)},
      {"gmm.restarts", std::to_string(config.gmm.restarts)},
      {"gmm.floor", format_double(config.gmm.floor)},
      {"gmm.N", std::to_string(config.components.min) + ".." + std::to_string(config.components.max)},
      {"selected_N", std::to_string(summary.selection.components)},
  };
  {
    auto out = open_out(model_out);
    write_model(out, file);
  }

  auto log = open_out(log_out);
  const TrainDiagnostics& diag = summary.selection.best.diagnostics;
  log << "# tissuegmm train log\n"
      << "tracks=" << tracks_path.filename().string() << '\n'
      << "frames=" << tracks.frame_count() << '\n'
      << "train_frames=" << train.size() << '\n'
      << "cluster.mode=" << cluster_mode_name(config.cluster) << '\n'
      << "cluster.seed=" << config.cluster.seed << '\n'
      << "gmm.seed=" << config.gmm.seed << '\n'
      << "gmm.restarts=" << config.gmm.restarts << '\n';
  for (const auto& row : summary.selection.table) {
    log << "bic N=" << row.components << " loglik=" << format_double(row.loglik)
        << " bic=" << format_double(row.bic) << '\n';
  }
  log << "selected_N=" << summary.selection.components << '\n'
      << "best_restart=" << diag.best_restart << '\n'
      << "converged=" << (diag.converged ? 1 : 0) << '\n'
      << "floor_activations=" << diag.floor_activations << '\n';
  for (size_t i = 0; i < diag.loglik_trace.size(); ++i) {
    log << "iter " << i << " loglik=" << format_double(diag.loglik_trace[i]) << '\n';
  }
  log << "train_pos_px=" << format_double(summary.train_pos_px) << '\n'
      << "train_angle_deg=" << format_double(summary.train_angle_deg) << '\n';
  return summary;
}

std::vector<ImagePrediction> predict_in_image(const ModelFile& model, const TrackSet& tracks,
                                              const ClusterSpec& cluster,
                                              const std::vector<double>& times) {
  const std::vector<FrameRecord> frames = assemble_frames(tracks, cluster);
  const int T = tracks.frame_count();
  std::vector<ImagePrediction> out;
  for (const PosePrediction& p : predict_trajectory(model.model, times)) {
    const long nearest = std::lround(p.time * (T - 1)) + 1;
    const int f = static_cast<int>(std::clamp<long>(nearest, 1, T));
    const Transform2& ref = frames[static_cast<size_t>(f - 1)].frame.transform;
    const Mat2 r = ref.rotation().matrix();
    ImagePrediction ip;
    ip.time = p.time;
    ip.frame = f;
    ip.position = ref.apply(p.position_mean);
    ip.angle = wrap_angle(ref.rotation().angle() + p.angle);
    Mat2 cov = r * p.position_covariance * r.transpose();
    ip.covariance = 0.5 * (cov + cov.transpose());
    ip.extrapolated = p.extrapolated;
    out.push_back(ip);
  }
  return out;
}

void run_predict(const PipelineConfig& config, const std::filesystem::path& model_path,
                 const std::filesystem::path& tracks_path, const std::vector<double>& times,
                 const std::filesystem::path& out_path) {
  const ModelFile model = read_model(model_path);
  const TrackSet tracks = parse_tracks(tracks_path, validation_for(config.cluster));
  const auto predictions = predict_in_image(model, tracks, config.cluster, times);

  auto out = open_out(out_path);
  out << "time,x,y,angle_deg,cov_xx,cov_xy,cov_yy,extrapolated\n";
  for (const auto& p : predictions) {
    out << format_double(p.time) << ',' << format_double(p.position.x()) << ','
        << format_double(p.position.y()) << ',' << format_double(p.angle * 180.0 / std::numbers::pi)
        << ',' << format_double(p.covariance(0, 0)) << ',' << format_double(p.covariance(0, 1))
        << ',' << format_double(p.covariance(1, 1)) << ',' << (p.extrapolated ? 1 : 0) << '\n';
  }
}

EvalReport run_eval(const PipelineConfig& config, const std::filesystem::path& model_path,
                    const std::filesystem::path& tracks_path, const SplitSpec& spec,
                    const std::filesystem::path& out_path) {
  const ModelFile model = read_model(model_path);
  const TrackSet tracks = parse_tracks(tracks_path, validation_for(config.cluster));
  if (spec.total() != tracks.frame_count()) {
    fail(ErrorKind::LengthMismatch, "split " + std::to_string(spec.train_count()) + "/" +
                                        std::to_string(spec.test_count()) + " does not cover " +
                                        std::to_string(tracks.frame_count()) + " frames");
  }
  const std::vector<Datapoint> data = assemble_datapoints(tracks, config.cluster);
  const EvalReport report = evaluate(model.model, data, spec);
  {
    auto out = open_out(out_path);
    write_report_csv(out, report);
  }
  auto summary = open_out(summary_path(out_path));
  write_report_summary(summary, report);
  return report;
}

}  // namespace tissuegmm
