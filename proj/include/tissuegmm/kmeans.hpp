#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace tissuegmm {

struct KMeansResult {
  std::vector<int> labels;    // one per input row
  Eigen::MatrixXd centroids;  // k x d
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm on the rows of `points` with k-means++ seeding drawn
/// from `rng`. Stops when assignments stop changing or after `max_iters`
/// sweeps. An empty cluster triggers one complete re-seed; a second empty
/// cluster throws EmptyClusterError. Throws TooFewPoints if rows < k.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng,
                    int max_iters = 100);

/// k-means++ seeding only; returns k row indices into `points`.
std::vector<int> kmeanspp_seeds(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng);

}  // namespace tissuegmm
