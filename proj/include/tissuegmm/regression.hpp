#pragma once

#include <span>
#include <vector>

#include "tissuegmm/geometry2d.hpp"
#include "tissuegmm/mixture.hpp"

namespace tissuegmm {

struct PosePrediction {
  double time = 0.0;
  Vec2 position_mean = Vec2::Zero();        // frame-relative pixels
  Mat2 position_covariance = Mat2::Zero();  // pixels^2
  double angle = 0.0;                       // radians, frame-relative, unwrapped
  std::vector<double> responsibilities;
  bool extrapolated = false;  // time outside [0, 1]
};

/// Per-component time responsibilities h_i(t), normalized to sum to one.
std::vector<double> time_responsibilities(const MixtureModel& model, double t);

/// Conditional mean of output dimension `dim` given time, for component k.
double conditional_mean(const MixtureModel& model, int k, int dim, double t);

/// Gaussian mixture regression of the position block on time. Fills the
/// position fields and responsibilities; `angle` is left at zero.
PosePrediction gmr(const MixtureModel& model, double t);

/// Blends the conditional angles of the two most responsible components
/// along the shortest arc, weighted by their relative responsibility.
double predict_orientation(const MixtureModel& model, double t);

/// gmr + predict_orientation at each time. `times` must be ascending.
std::vector<PosePrediction> predict_trajectory(const MixtureModel& model,
                                               std::span<const double> times);

}  // namespace tissuegmm
