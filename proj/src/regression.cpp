#include "tissuegmm/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tissuegmm/error.hpp"

namespace tissuegmm {
namespace {

constexpr double kDominant = 1.0 - 1e-6;

}  // namespace

std::vector<double> time_responsibilities(const MixtureModel& model, double t) {
  const int n = model.size();
  std::vector<double> logw(static_cast<size_t>(n));
  double mx = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const auto kk = static_cast<size_t>(k);
    const double var = model.covariances[kk](kTime, kTime);
    const double d = t - model.means[kk](kTime);
    logw[kk] = std::log(model.priors[kk]) - 0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
    mx = std::max(mx, logw[kk]);
  }
  double sum = 0.0;
  for (double& w : logw) {
    w = std::exp(w - mx);
    sum += w;
  }
  for (double& w : logw) w /= sum;
  return logw;
}

double conditional_mean(const MixtureModel& model, int k, int dim, double t) {
  const auto kk = static_cast<size_t>(k);
  const Mat4& c = model.covariances[kk];
  const Vec4& m = model.means[kk];
  return m(dim) + c(dim, kTime) / c(kTime, kTime) * (t - m(kTime));
}

PosePrediction gmr(const MixtureModel& model, double t) {
  PosePrediction out;
  out.time = t;
  out.extrapolated = !(t >= 0.0 && t <= 1.0);
  out.responsibilities = time_responsibilities(model, t);

  Vec2 mean = Vec2::Zero();
  Mat2 second = Mat2::Zero();
  for (int k = 0; k < model.size(); ++k) {
    const auto kk = static_cast<size_t>(k);
    const double h = out.responsibilities[kk];
    const Mat4& c = model.covariances[kk];
    const Vec4& mu = model.means[kk];
    const double stt = c(kTime, kTime);
    const Vec2 sxt = c.block<2, 1>(kRelX, kTime);
    const Vec2 mk = mu.segment<2>(kRelX) + sxt / stt * (t - mu(kTime));
    const Mat2 cond = c.block<2, 2>(kRelX, kRelX) - sxt * sxt.transpose() / stt;
    mean += h * mk;
    second += h * (cond + mk * mk.transpose());
  }
  out.position_mean = mean;
  Mat2 cov = second - mean * mean.transpose();
  out.position_covariance = 0.5 * (cov + cov.transpose());
  return out;
}

double predict_orientation(const MixtureModel& model, double t) {
  const std::vector<double> h = time_responsibilities(model, t);
  if (model.size() == 1) return conditional_mean(model, 0, kRelAngle, t);

  int first = 0;
  int second = -1;
  for (int k = 1; k < model.size(); ++k) {
    if (h[static_cast<size_t>(k)] > h[static_cast<size_t>(first)]) first = k;
  }
  for (int k = 0; k < model.size(); ++k) {
    if (k == first) continue;
    if (second < 0 || h[static_cast<size_t>(k)] > h[static_cast<size_t>(second)]) second = k;
  }
  if (h[static_cast<size_t>(first)] > kDominant) {
    return conditional_mean(model, first, kRelAngle, t);
  }
  // Order the pair along time so the blend runs from earlier to later.
  int a = first;
  int b = second;
  if (model.means[static_cast<size_t>(b)](kTime) < model.means[static_cast<size_t>(a)](kTime)) {
    std::swap(a, b);
  }
  const double ha = h[static_cast<size_t>(a)];
  const double hb = h[static_cast<size_t>(b)];
  const double s = hb / (ha + hb);
  return interpolate_angle(conditional_mean(model, a, kRelAngle, t),
                           conditional_mean(model, b, kRelAngle, t), s);
}

std::vector<PosePrediction> predict_trajectory(const MixtureModel& model,
                                               std::span<const double> times) {
  if (!std::is_sorted(times.begin(), times.end())) {
    fail(ErrorKind::ValidationError, "prediction times must be ascending");
  }
  std::vector<PosePrediction> out;
  out.reserve(times.size());
  for (double t : times) {
    PosePrediction p = gmr(model, t);
    p.angle = predict_orientation(model, t);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace tissuegmm
