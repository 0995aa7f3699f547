#pragma once

#include "tissuegmm/geometry2d.hpp"

namespace tissuegmm {

/// One training sample [t, x_rel, y_rel, theta_rel] of the tool pose in the
/// tissue reference frame.
struct Datapoint {
  double time = 0.0;                  // normalized, in [0, 1]
  Vec2 rel_position = Vec2::Zero();   // pixels
  double rel_angle = 0.0;             // radians, unwrapped along the sequence
};

}  // namespace tissuegmm
