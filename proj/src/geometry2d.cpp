#include "tissuegmm/geometry2d.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tissuegmm/error.hpp"

namespace tissuegmm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative eigenvalue gap below which the spread counts as isotropic.
constexpr double kIsotropyTolerance = 1e-12;

// Sign convention without history: x >= 0, ties broken by y >= 0.
Vec2 canonical_sign(const Vec2& axis) {
  constexpr double kZero = 1e-12;
  if (std::abs(axis.x()) > kZero) return axis.x() > 0.0 ? axis : Vec2(-axis);
  return axis.y() >= 0.0 ? axis : Vec2(-axis);
}

}  // namespace

double wrap_angle(double radians) noexcept {
  double r = std::remainder(radians, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

double shortest_angle_diff(double from, double to) noexcept {
  return wrap_angle(to - from);
}

Rotation2 Rotation2::from_axis(const Vec2& axis) {
  return Rotation2(std::atan2(axis.y(), axis.x()));
}

Mat2 Rotation2::matrix() const {
  const double c = std::cos(angle_);
  const double s = std::sin(angle_);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

Vec2 Transform2::apply_inverse(const Vec2& p) const {
  return rotation_.matrix().transpose() * (p - translation_);
}

Transform2 Transform2::inverse() const {
  const Rotation2 inv = rotation_.inverse();
  return {inv, -(inv * translation_)};
}

Transform2 Transform2::operator*(const Transform2& other) const {
  return {rotation_ * other.rotation_, apply(other.translation_)};
}

Mat3 Transform2::homogeneous() const {
  Mat3 h = Mat3::Identity();
  h.topLeftCorner<2, 2>() = rotation_.matrix();
  h.topRightCorner<2, 1>() = translation_;
  h.row(2) << 0.0, 0.0, 1.0;
  return h;
}

PcaAxis pca_axis(std::span<const Vec2> points, const std::optional<Vec2>& prev_axis) {
  if (points.size() < 2) {
    fail(ErrorKind::InsufficientPoints, "PCA needs at least two points");
  }
  Vec2 mean = Vec2::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Mat2 cov = Mat2::Zero();
  for (const auto& p : points) {
    const Vec2 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  if (cov.trace() <= 1e-24) {
    fail(ErrorKind::DegenerateConfiguration, "PCA points are all identical");
  }

  const Eigen::SelfAdjointEigenSolver<Mat2> solver(cov);
  const Eigen::Vector2d evals = solver.eigenvalues();  // ascending
  PcaAxis result;

  Vec2 axis;
  if (evals(1) - evals(0) <= kIsotropyTolerance * std::max(evals(1), 1e-300)) {
    result.isotropic = true;
    axis = prev_axis && prev_axis->norm() > 0.0 ? prev_axis->normalized() : Vec2(1.0, 0.0);
  } else {
    axis = solver.eigenvectors().col(1).normalized();
  }

  if (prev_axis) {
    if (axis.dot(*prev_axis) < 0.0) axis = -axis;
  } else {
    axis = canonical_sign(axis);
  }
  result.rotation = Rotation2::from_axis(axis);
  return result;
}

double relative_angle(const Rotation2& ref, const Rotation2& q) noexcept {
  return wrap_angle(q.angle() - ref.angle());
}

double interpolate_angle(double a, double b, double s) noexcept {
  return a + s * shortest_angle_diff(a, b);
}

double slerp_angle(double a, double b, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    fail(ErrorKind::DomainError, "interpolation parameter must lie in [0, 1]");
  }
  return wrap_angle(interpolate_angle(a, b, s));
}

}  // namespace tissuegmm
