#include "tissuegmm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <json.hpp>

#include "text_util.hpp"
#include "tissuegmm/error.hpp"
#include "tissuegmm/geometry2d.hpp"
#include "tissuegmm/regression.hpp"

namespace tissuegmm {

SplitSpec::SplitSpec(int train_count, int test_count) : train_(train_count), test_(test_count) {
  if (train_count < 1 || test_count < 1) {
    fail(ErrorKind::ValidationError, "train and test splits must each hold at least one frame");
  }
}

std::pair<std::vector<Datapoint>, std::vector<Datapoint>> split(std::span<const Datapoint> data,
                                                                const SplitSpec& spec) {
  if (static_cast<size_t>(spec.total()) != data.size()) {
    fail(ErrorKind::LengthMismatch, "split " + std::to_string(spec.train_count()) + "/" +
                                        std::to_string(spec.test_count()) + " does not cover " +
                                        std::to_string(data.size()) + " frames");
  }
  const auto cut = static_cast<size_t>(spec.train_count());
  return {std::vector<Datapoint>(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(cut)),
          std::vector<Datapoint>(data.begin() + static_cast<std::ptrdiff_t>(cut), data.end())};
}

double position_error(const Vec2& pred, const Vec2& truth) noexcept {
  return (pred - truth).norm();
}

double angle_error(double pred, double truth) noexcept {
  return std::abs(shortest_angle_diff(truth, pred)) * 180.0 / std::numbers::pi;
}

std::string_view to_string(SplitTag tag) noexcept {
  return tag == SplitTag::Train ? "train" : "test";
}

EvalReport evaluate(const MixtureModel& model, std::span<const Datapoint> data,
                    const SplitSpec& spec) {
  if (static_cast<size_t>(spec.total()) != data.size()) {
    fail(ErrorKind::LengthMismatch, "split does not match dataset length");
  }
  EvalReport report;
  report.per_frame.reserve(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    const Datapoint& d = data[i];
    const PosePrediction pred = gmr(model, d.time);
    FrameError row;
    row.time = d.time;
    row.position_error_px = position_error(pred.position_mean, d.rel_position);
    row.angle_error_deg = angle_error(predict_orientation(model, d.time), d.rel_angle);
    row.split = i < static_cast<size_t>(spec.train_count()) ? SplitTag::Train : SplitTag::Test;
    report.per_frame.push_back(row);
  }
  std::stable_sort(report.per_frame.begin(), report.per_frame.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });

  double pos[2] = {0.0, 0.0};
  double ang[2] = {0.0, 0.0};
  int count[2] = {0, 0};
  for (const auto& row : report.per_frame) {
    const int s = row.split == SplitTag::Train ? 0 : 1;
    pos[s] += row.position_error_px;
    ang[s] += row.angle_error_deg;
    ++count[s];
  }
  report.mean_train_pos_px = pos[0] / count[0];
  report.mean_test_pos_px = pos[1] / count[1];
  report.mean_train_angle_deg = ang[0] / count[0];
  report.mean_test_angle_deg = ang[1] / count[1];
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "time,split,position_error_px,angle_error_deg\n";
  for (const auto& row : report.per_frame) {
    out << detail::format_double(row.time) << ',' << to_string(row.split) << ','
        << detail::format_double(row.position_error_px) << ','
        << detail::format_double(row.angle_error_deg) << '\n';
  }
  out << "# mean_train_pos_px=" << detail::format_double(report.mean_train_pos_px) << '\n'
      << "# mean_test_pos_px=" << detail::format_double(report.mean_test_pos_px) << '\n'
      << "# mean_train_angle_deg=" << detail::format_double(report.mean_train_angle_deg) << '\n'
      << "# mean_test_angle_deg=" << detail::format_double(report.mean_test_angle_deg) << '\n';
}

void write_report_summary(std::ostream& out, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["mean_train_pos_px"] = report.mean_train_pos_px;
  j["mean_test_pos_px"] = report.mean_test_pos_px;
  j["mean_train_angle_deg"] = report.mean_train_angle_deg;
  j["mean_test_angle_deg"] = report.mean_test_angle_deg;
  out << j.dump(2) << '\n';
}

}  // namespace tissuegmm
