#include "tissuegmm/kmeans.hpp"

#include <limits>
#include <optional>
#include <string>

#include "tissuegmm/error.hpp"

namespace tissuegmm {
namespace {

int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - p).squaredNorm();
    if (d < best_d) {  // strict: ties go to the lower index
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

// One Lloyd run; nullopt if a cluster emptied out.
std::optional<KMeansResult> lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids,
                                  int max_iters) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centroids.rows();
  KMeansResult result;
  result.labels.assign(static_cast<size_t>(n), -1);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = nearest_centroid(centroids, points.row(i));
      if (c != result.labels[static_cast<size_t>(i)]) {
        result.labels[static_cast<size_t>(i)] = c;
        changed = true;
      }
    }
    result.iterations = iter + 1;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = result.labels[static_cast<size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<size_t>(c)];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) return std::nullopt;
      centroids.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
    }
    if (!changed) {
      result.converged = true;
      break;
    }
  }
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

std::vector<int> kmeanspp_seeds(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  std::vector<int> seeds;
  seeds.reserve(static_cast<size_t>(k));
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  seeds.push_back(static_cast<int>(pick(rng)));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i) = (points.row(i) - points.row(seeds[0])).squaredNorm();
  }
  while (static_cast<int>(seeds.size()) < k) {
    const double total = d2.sum();
    Eigen::Index chosen = n - 1;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    seeds.push_back(static_cast<int>(chosen));
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (points.row(i) - points.row(chosen)).squaredNorm());
    }
  }
  return seeds;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng, int max_iters) {
  if (k < 1) fail(ErrorKind::ValidationError, "k-means needs k >= 1");
  if (points.rows() < k) {
    fail(ErrorKind::TooFewPoints, "k-means with k=" + std::to_string(k) + " on " +
                                      std::to_string(points.rows()) + " points");
  }
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::vector<int> seeds = kmeanspp_seeds(points, k, rng);
    Eigen::MatrixXd centroids(k, points.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = points.row(seeds[static_cast<size_t>(c)]);
    if (auto result = lloyd(points, std::move(centroids), max_iters)) return *std::move(result);
  }
  fail(ErrorKind::EmptyClusterError, "k-means produced an empty cluster after re-seeding");
}

}  // namespace tissuegmm
