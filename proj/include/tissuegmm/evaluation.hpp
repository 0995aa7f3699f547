#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tissuegmm/datapoint.hpp"
#include "tissuegmm/mixture.hpp"

namespace tissuegmm {

/// Contiguous temporal holdout: the first `train_count` frames train, the
/// remaining `test_count` frames test.
class SplitSpec {
 public:
  /// Throws ValidationError unless both counts are >= 1.
  SplitSpec(int train_count, int test_count);

  int train_count() const noexcept { return train_; }
  int test_count() const noexcept { return test_; }
  int total() const noexcept { return train_ + test_; }

 private:
  int train_;
  int test_;
};

/// Throws LengthMismatch unless train + test equals the dataset length.
std::pair<std::vector<Datapoint>, std::vector<Datapoint>> split(std::span<const Datapoint> data,
                                                                const SplitSpec& spec);

double position_error(const Vec2& pred, const Vec2& truth) noexcept;

/// Absolute shortest circular difference, in degrees within [0, 180].
double angle_error(double pred, double truth) noexcept;

enum class SplitTag { Train, Test };

std::string_view to_string(SplitTag tag) noexcept;

struct FrameError {
  double time = 0.0;
  double position_error_px = 0.0;
  double angle_error_deg = 0.0;
  SplitTag split = SplitTag::Train;
};

struct EvalReport {
  std::vector<FrameError> per_frame;  // ascending time
  double mean_train_pos_px = 0.0;
  double mean_test_pos_px = 0.0;
  double mean_train_angle_deg = 0.0;
  double mean_test_angle_deg = 0.0;
};

/// Predicts at every datapoint time and scores against the datapoint.
EvalReport evaluate(const MixtureModel& model, std::span<const Datapoint> data,
                    const SplitSpec& spec);

/// Error-curve CSV `time,split,position_error_px,angle_error_deg` followed by
/// '#'-prefixed summary lines.
void write_report_csv(std::ostream& out, const EvalReport& report);

/// Machine-readable JSON summary holding the four means.
void write_report_summary(std::ostream& out, const EvalReport& report);

}  // namespace tissuegmm
