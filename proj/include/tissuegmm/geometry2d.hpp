#pragma once

#include <cmath>
#include <optional>
#include <span>

#include <Eigen/Core>

namespace tissuegmm {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians) noexcept;

/// Signed shortest rotation taking `from` onto `to`, in (-pi, pi].
double shortest_angle_diff(double from, double to) noexcept;

/// Planar rotation stored as a single angle in (-pi, pi].
class Rotation2 {
 public:
  Rotation2() = default;
  explicit Rotation2(double radians) : angle_(wrap_angle(radians)) {}

  /// Rotation whose first axis points along `axis` (need not be unit length).
  static Rotation2 from_axis(const Vec2& axis);

  double angle() const noexcept { return angle_; }
  Mat2 matrix() const;
  Vec2 first_axis() const { return {std::cos(angle_), std::sin(angle_)}; }
  Vec2 second_axis() const { return {-std::sin(angle_), std::cos(angle_)}; }

  Rotation2 inverse() const { return Rotation2(-angle_); }
  Rotation2 operator*(const Rotation2& other) const {
    return Rotation2(angle_ + other.angle_);
  }
  Vec2 operator*(const Vec2& v) const { return matrix() * v; }

 private:
  double angle_ = 0.0;
};

/// Rigid planar transform x -> R x + c.
class Transform2 {
 public:
  Transform2() : translation_(Vec2::Zero()) {}
  Transform2(Rotation2 rotation, Vec2 translation)
      : rotation_(rotation), translation_(std::move(translation)) {}

  static Transform2 identity() { return {}; }

  const Rotation2& rotation() const noexcept { return rotation_; }
  const Vec2& translation() const noexcept { return translation_; }

  Vec2 apply(const Vec2& p) const { return rotation_ * p + translation_; }
  Vec2 apply_inverse(const Vec2& p) const;
  Transform2 inverse() const;
  Transform2 operator*(const Transform2& other) const;

  /// 3x3 homogeneous form; the bottom row is exactly [0 0 1].
  Mat3 homogeneous() const;

 private:
  Rotation2 rotation_;
  Vec2 translation_;
};

struct Pose2 {
  Vec2 position = Vec2::Zero();
  Rotation2 orientation;
};

/// Principal axis of a planar point set.
struct PcaAxis {
  Rotation2 rotation;
  /// Covariance eigenvalues coincide; the axis was chosen by convention.
  bool isotropic = false;
};

/// Rotation whose first column is the dominant eigenvector of the points'
/// population covariance. The sign of the axis follows `prev_axis` when
/// given (non-negative dot product), otherwise non-negative x, then
/// non-negative y. Isotropic spreads fall back to `prev_axis` or (1, 0).
///
/// Throws InsufficientPoints for fewer than two points and
/// DegenerateConfiguration when all points coincide.
PcaAxis pca_axis(std::span<const Vec2> points,
                 const std::optional<Vec2>& prev_axis = std::nullopt);

inline Rotation2 pca_rotation(std::span<const Vec2> points,
                              const std::optional<Vec2>& prev_axis = std::nullopt) {
  return pca_axis(points, prev_axis).rotation;
}

/// R^T (p - c) for the transform's rotation R and translation c.
inline Vec2 apply_inverse(const Transform2& transform, const Vec2& p) {
  return transform.apply_inverse(p);
}

/// Orientation of `q` expressed relative to `ref`, wrapped to (-pi, pi].
double relative_angle(const Rotation2& ref, const Rotation2& q) noexcept;

/// a + s * shortest_angle_diff(a, b), without wrapping. Keeps the result on
/// the same branch as `a`, which matters for unwrapped angle signals.
double interpolate_angle(double a, double b, double s) noexcept;

/// Planar shortest-arc interpolation; result wrapped to (-pi, pi].
/// Throws DomainError unless 0 <= s <= 1.
double slerp_angle(double a, double b, double s);

}  // namespace tissuegmm
