#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tissuegmm/datapoint.hpp"

namespace tissuegmm {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// Coordinate order of every mixture component.
enum Dim : int { kTime = 0, kRelX = 1, kRelY = 2, kRelAngle = 3 };

/// Joint Gaussian mixture over [t, x_rel, y_rel, theta_rel].
struct MixtureModel {
  std::vector<double> priors;
  std::vector<Vec4> means;
  std::vector<Mat4> covariances;

  int size() const noexcept { return static_cast<int>(priors.size()); }

  /// Throws ValidationError unless priors are non-negative and sum to one
  /// (1e-9), and each covariance is symmetric (1e-9 relative) with smallest
  /// eigenvalue >= min_eigenvalue.
  void validate(double min_eigenvalue) const;

  /// Total log-likelihood of `rows` (n x 4) under the mixture.
  double log_likelihood(const Eigen::MatrixXd& rows) const;
  double log_likelihood(std::span<const Datapoint> data) const;
};

/// Packs datapoints into an n x 4 row matrix in Dim order.
Eigen::MatrixXd to_rows(std::span<const Datapoint> data);

struct TrainConfig {
  int components = 10;
  int max_iters = 500;
  double loglik_tol = 1e-6;   // relative improvement
  double floor = 1e-6;        // eigenvalue floor on standardized data
  std::uint64_t seed = 0;
  int restarts = 5;
  bool standardize = true;

  void validate() const;
};

struct TrainDiagnostics {
  /// Log-likelihood (original units) after each E-step of the winning run.
  std::vector<double> loglik_trace;
  /// Final log-likelihood of every restart, in restart order.
  std::vector<double> restart_logliks;
  int best_restart = 0;
  int iterations = 0;
  bool converged = false;
  /// M-steps in which the covariance eigenvalue floor changed a component.
  int floor_activations = 0;
  int reseeded_components = 0;
};

struct TrainResult {
  MixtureModel model;
  TrainDiagnostics diagnostics;
  double loglik = 0.0;
};

/// EM with k-means++ initialisation, keeping the best of `restarts` runs.
/// Throws TooFewPoints when data has fewer rows than components and
/// NumericalCollapse when a component dies twice.
TrainResult em_train(std::span<const Datapoint> data, const TrainConfig& config);
TrainResult em_train(const Eigen::MatrixXd& rows, const TrainConfig& config);

/// Free parameters of an N-component full-covariance mixture in 4-D.
int parameter_count(int components) noexcept;

double bic(double loglik, int components, size_t samples) noexcept;

struct SelectionEntry {
  int components = 0;
  double loglik = 0.0;
  double bic = 0.0;
};

struct SelectionResult {
  int components = 0;
  std::vector<SelectionEntry> table;
  TrainResult best;
};

/// Trains one model per N in [min_components, max_components] and keeps the
/// BIC minimiser (ties resolve to the smaller N).
SelectionResult select_components(std::span<const Datapoint> data, int min_components,
                                  int max_components, const TrainConfig& config);
SelectionResult select_components(const Eigen::MatrixXd& rows, int min_components,
                                  int max_components, const TrainConfig& config);

}  // namespace tissuegmm
