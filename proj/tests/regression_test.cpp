#include "tissuegmm/regression.hpp"

#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "gmr_oracle.hpp"
#include "test_support.hpp"

namespace tissuegmm {
namespace {

using testing::integrated_conditional_mean;
using testing::kPi;
using testing::random_model;

MixtureModel single(const Vec4& mean, const Mat4& cov) { return {{1.0}, {mean}, {cov}}; }

// Two components at t = 0.25 / 0.75, positions (0,0) / (10,0).
MixtureModel symmetric_pair(double angle_a = 0.0, double angle_b = 0.0) {
  const Mat4 cov = Vec4(0.02, 1.0, 1.0, 0.01).asDiagonal();
  return {{0.5, 0.5}, {Vec4(0.25, 0, 0, angle_a), Vec4(0.75, 10, 0, angle_b)}, {cov, cov}};
}

TEST(Gmr, ZeroCrossCovarianceIsConstant) {
  const MixtureModel m = single(Vec4(0.5, 10, 20, 0), Mat4::Identity());
  for (double t : {0.0, 0.3, 1.0, 2.5}) {
    const PosePrediction p = gmr(m, t);
    EXPECT_NEAR((p.position_mean - Vec2(10, 20)).norm(), 0.0, 1e-12);
  }
}

TEST(Gmr, LinearGaussianConditional) {
  Mat4 cov = Mat4::Identity();
  cov(0, 0) = 0.25;
  cov(0, 1) = cov(1, 0) = 0.5;
  cov(1, 1) = 2.0;
  const MixtureModel m = single(Vec4(0.5, 3.0, 0, 0), cov);
  // Closed form: 3 + (0.5 / 0.25) * (0.75 - 0.5).
  EXPECT_NEAR(gmr(m, 0.75).position_mean.x(), 3.5, 1e-12);
}

TEST(Gmr, SymmetricPairMidpoint) {
  const PosePrediction p = gmr(symmetric_pair(), 0.5);
  EXPECT_NEAR(p.position_mean.x(), 5.0, 1e-12);
  EXPECT_NEAR(p.position_mean.y(), 0.0, 1e-12);
  EXPECT_NEAR(p.responsibilities[0], 0.5, 1e-12);
}

TEST(Gmr, SingleComponentMatchesClosedFormConditional) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MixtureModel m = random_model(32, 1);
  const Mat4& s = m.covariances[0];
  const Vec4& mu = m.means[0];
  for (int i = 0; i < 100; ++i) {
    const double t = 0.5 + u(rng);
    // Schur complement route with a generic solve.
    const Eigen::Matrix<double, 2, 1> cross = s.block<2, 1>(1, 0);
    const Eigen::Matrix<double, 1, 1> stt = s.block<1, 1>(0, 0);
    const Vec2 mean = mu.segment<2>(1) + cross * stt.inverse() * Eigen::Matrix<double, 1, 1>(t - mu(0));
    const Mat2 cov = s.block<2, 2>(1, 1) - cross * stt.inverse() * cross.transpose();
    const PosePrediction p = gmr(m, t);
    EXPECT_LE((p.position_mean - mean).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((p.position_covariance - cov).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Gmr, MatchesDenseNumericalIntegration) {
  const MixtureModel m = random_model(33, 3);
  for (int i = 0; i < 20; ++i) {
    const double t = i / 19.0;
    const PosePrediction p = gmr(m, t);
    EXPECT_NEAR(p.position_mean.x(), integrated_conditional_mean(m, t, 1), 1e-3) << t;
    EXPECT_NEAR(p.position_mean.y(), integrated_conditional_mean(m, t, 2), 1e-3) << t;
  }
}

TEST(Gmr, ResponsibilitiesNormalizedAndCovariancePsd) {
  const MixtureModel m = random_model(34, 5);
  for (double t = -0.5; t <= 1.5; t += 0.01) {
    const PosePrediction p = gmr(m, t);
    EXPECT_NEAR(std::accumulate(p.responsibilities.begin(), p.responsibilities.end(), 0.0), 1.0, 1e-9);
    EXPECT_NEAR(p.position_covariance(0, 1), p.position_covariance(1, 0), 1e-12);
    EXPECT_GE(p.position_covariance.determinant(), -1e-9);
    EXPECT_GE(p.position_covariance.trace(), 0.0);
    EXPECT_EQ(p.extrapolated, t < 0.0 || t > 1.0);
  }
}

TEST(Gmr, FarExtrapolationStaysFinite) {
  const MixtureModel m = random_model(35, 4);
  for (double t : {-50.0, 80.0}) {
    const PosePrediction p = gmr(m, t);
    EXPECT_TRUE(p.position_mean.allFinite());
    EXPECT_TRUE(p.extrapolated);
  }
}

TEST(PredictOrientation, SingleComponent) {
  EXPECT_NEAR(predict_orientation(single(Vec4(0.5, 0, 0, 0.3), Mat4::Identity()), 0.1), 0.3, 1e-15);
}

TEST(PredictOrientation, EqualWeightsGiveArcMidpoint) {
  const MixtureModel m = symmetric_pair(0.0, kPi / 2);
  const Vec2 bisector = Vec2(1, 0) + Vec2(0, 1);
  EXPECT_NEAR(predict_orientation(m, 0.5), std::atan2(bisector.y(), bisector.x()), 1e-12);
}

TEST(PredictOrientation, EqualAnglesForAnyWeights) {
  const MixtureModel m = symmetric_pair(1.2, 1.2);
  for (double t = 0.0; t <= 1.0; t += 0.05) EXPECT_NEAR(predict_orientation(m, t), 1.2, 1e-12);
}

TEST(PredictOrientation, DominantComponentShortCircuits) {
  // At t = -0.1 the far component's weight is 1 / (1 + e^15), below the cutoff.
  const MixtureModel m = symmetric_pair(0.0, 1.0);
  EXPECT_EQ(predict_orientation(m, -0.1), 0.0);
}

TEST(PredictTrajectory, EmptyTimes) {
  EXPECT_TRUE(predict_trajectory(symmetric_pair(), std::vector<double>{}).empty());
}

TEST(PredictTrajectory, SymmetricPairIsMonotone) {
  const std::vector<double> times = {0.0, 0.5, 1.0};
  const auto out = predict_trajectory(symmetric_pair(), times);
  ASSERT_EQ(out.size(), 3u);
  // Time-marginal weight of the far component at t = 0 and t = 1.
  const double far = 1.0 / (1.0 + std::exp(12.5));
  EXPECT_NEAR(out[0].position_mean.x(), 10.0 * far, 1e-12);
  EXPECT_NEAR(out[1].position_mean.x(), 5.0, 1e-12);
  EXPECT_NEAR(out[2].position_mean.x(), 10.0 * (1.0 - far), 1e-12);
  EXPECT_LT(out[0].position_mean.x(), out[1].position_mean.x());
  EXPECT_LT(out[1].position_mean.x(), out[2].position_mean.x());
}

TEST(PredictTrajectory, OverfitModelReproducesTrainingData) {
  std::vector<Datapoint> data;
  for (int i = 0; i < 12; ++i) {
    const double t = i / 11.0;
    data.push_back({t, Vec2(100 * t, 20 * std::sin(3 * t)), 0.5 * t});
  }
  TrainConfig cfg;
  cfg.components = 12;
  const TrainResult r = em_train(data, cfg);
  std::vector<double> times;
  for (const auto& d : data) times.push_back(d.time);
  const auto out = predict_trajectory(r.model, times);
  for (size_t i = 0; i < data.size(); ++i) {
    EXPECT_LE((out[i].position_mean - data[i].rel_position).norm(), 1e-3) << i;
    EXPECT_NEAR(out[i].angle, data[i].rel_angle, 1e-3) << i;
  }
}

TEST(PredictTrajectory, PositionIsContinuous) {
  std::vector<Datapoint> data;
  for (int i = 0; i < 80; ++i) {
    const double t = i / 79.0;
    data.push_back({t, Vec2(60 * t, 15 * std::sin(6 * t)), std::cos(2 * t)});
  }
  TrainConfig cfg;
  cfg.components = 6;
  const TrainResult r = em_train(data, cfg);
  for (double t = 0.0; t < 1.0; t += 0.01) {
    const Vec2 a = gmr(r.model, t).position_mean;
    const Vec2 b = gmr(r.model, t + 1e-6).position_mean;
    EXPECT_LE((a - b).norm(), 1e-3) << t;
  }
}

}  // namespace
}  // namespace tissuegmm
