#pragma once

// Known-parameter mixtures and samplers used as oracles for EM and GMR.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tissuegmm/mixture.hpp"

namespace tissuegmm::testing {

struct KnownMixture {
  std::vector<double> priors;
  std::vector<Vec4> means;
  std::vector<Mat4> covariances;
  double sigma = 1.0;  // largest per-axis standard deviation

  MixtureModel as_model() const { return {priors, means, covariances}; }
};

/// Three 4-D components, per-axis std <= 1, means >= 10 sigma apart.
inline KnownMixture three_separated_components() {
  KnownMixture m;
  m.priors = {0.2, 0.3, 0.5};
  m.means = {Vec4(0, 0, 0, 0), Vec4(12, -4, 6, 2), Vec4(-3, 14, -8, 11)};
  Mat4 a = Mat4::Identity();
  Mat4 b = Mat4::Identity();
  b(0, 1) = b(1, 0) = 0.4;
  b(2, 3) = b(3, 2) = -0.3;
  Mat4 c = 0.64 * Mat4::Identity();
  c(0, 2) = c(2, 0) = 0.2;
  m.covariances = {a, b, c};
  m.sigma = 1.0;
  return m;
}

/// Exact-count sample whose per-component sample mean and population
/// covariance equal the generator's parameters. Removes finite-sample noise
/// so recovery tolerances measure the estimator alone.
inline Eigen::MatrixXd moment_matched_sample(const KnownMixture& m, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd rows(n, 4);
  int row = 0;
  for (size_t k = 0; k < m.priors.size(); ++k) {
    const int count = k + 1 == m.priors.size() ? n - row
                                                 : static_cast<int>(std::lround(m.priors[k] * n));
    Eigen::MatrixXd z(count, 4);
    for (int i = 0; i < count; ++i)
      for (int d = 0; d < 4; ++d) z(i, d) = normal(rng);
    const Eigen::RowVectorXd mu = z.colwise().mean();
    z.rowwise() -= mu;
    const Mat4 s = (z.transpose() * z) / count;
    // Whiten to identity sample covariance, then colour with the target.
    const Mat4 whiten = Eigen::LLT<Mat4>(s).matrixL().solve(Mat4::Identity());
    const Mat4 colour = Eigen::LLT<Mat4>(m.covariances[k]).matrixL();
    for (int i = 0; i < count; ++i) {
      const Vec4 w = whiten * z.row(i).transpose();
      rows.row(row++) = (m.means[k] + colour * w).transpose();
    }
  }
  return rows;
}

/// For each true component, the index of the fitted component minimizing the
/// total mean distance over all permutations.
inline std::vector<int> match_components(const KnownMixture& truth, const MixtureModel& fit) {
  std::vector<int> perm(static_cast<size_t>(fit.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best;
  double best_cost = 1e300;
  do {
    double cost = 0.0;
    for (size_t k = 0; k < truth.means.size(); ++k) {
      cost += (fit.means[static_cast<size_t>(perm[k])] - truth.means[k]).norm();
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.resize(truth.means.size());
  return best;
}

}  // namespace tissuegmm::testing
