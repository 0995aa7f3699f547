#include "tissuegmm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tissuegmm/error.hpp"
#include "tissuegmm/kmeans.hpp"

namespace tissuegmm {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // ln(2 pi)
constexpr double kDeadMass = 1e-12;

// Cached Cholesky factor of one component.
struct GaussianCache {
  Eigen::LLT<Mat4> llt;
  double log_norm = 0.0;  // -0.5 * (d ln 2pi + ln det)
};

GaussianCache factor(const Mat4& cov) {
  GaussianCache g;
  g.llt.compute(cov);
  if (g.llt.info() != Eigen::Success) {
    fail(ErrorKind::NumericalCollapse, "component covariance is not positive definite");
  }
  const auto& l = g.llt.matrixL();
  double logdet = 0.0;
  for (int d = 0; d < 4; ++d) logdet += std::log(l(d, d));
  g.log_norm = -0.5 * (4.0 * kLog2Pi) - logdet;
  return g;
}

double log_density(const GaussianCache& g, const Vec4& mean, const Vec4& x) {
  const Vec4 w = g.llt.matrixL().solve(x - mean);
  return g.log_norm - 0.5 * w.squaredNorm();
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Normalizes a row of log-weights in place; returns their log-sum-exp.
double normalize_log(Eigen::Ref<Eigen::RowVectorXd> logw) {
  const double mx = logw.maxCoeff();
  if (!std::isfinite(mx)) {
    logw.setConstant(1.0 / static_cast<double>(logw.size()));
    return mx;
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < logw.size(); ++k) sum += std::exp(logw(k) - mx);
  const double lse = mx + std::log(sum);
  for (Eigen::Index k = 0; k < logw.size(); ++k) logw(k) = std::exp(logw(k) - lse);
  return lse;
}

// Raises every eigenvalue below `floor` to `floor`. Returns true if any moved.
bool floor_eigenvalues(Mat4& cov, double floor) {
  cov = 0.5 * (cov + cov.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat4> solver(cov);
  Vec4 evals = solver.eigenvalues();
  if (evals.minCoeff() >= floor) return false;
  for (int d = 0; d < 4; ++d) evals(d) = std::max(evals(d), floor);
  cov = solver.eigenvectors() * evals.asDiagonal() * solver.eigenvectors().transpose();
  cov = 0.5 * (cov + cov.transpose());
  return true;
}

struct Standardizer {
  Vec4 offset = Vec4::Zero();
  Vec4 scale = Vec4::Ones();

  static Standardizer fit(const Eigen::MatrixXd& rows, bool enabled) {
    Standardizer s;
    if (!enabled) return s;
    const double n = static_cast<double>(rows.rows());
    for (int d = 0; d < 4; ++d) {
      const double mean = rows.col(d).sum() / n;
      const double var = (rows.col(d).array() - mean).square().sum() / n;
      s.offset(d) = mean;
      const double sd = std::sqrt(var);
      s.scale(d) = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const {
    Eigen::MatrixXd z = rows;
    for (int d = 0; d < 4; ++d) z.col(d) = (rows.col(d).array() - offset(d)) / scale(d);
    return z;
  }

  double log_jacobian(size_t n) const {
    return static_cast<double>(n) * scale.array().log().sum();
  }

  MixtureModel restore(const MixtureModel& m) const {
    MixtureModel out = m;
    const Mat4 d = scale.asDiagonal();
    for (int k = 0; k < m.size(); ++k) {
      out.means[static_cast<size_t>(k)] = offset + scale.cwiseProduct(m.means[static_cast<size_t>(k)]);
      Mat4 c = d * m.covariances[static_cast<size_t>(k)] * d;
      out.covariances[static_cast<size_t>(k)] = 0.5 * (c + c.transpose());
    }
    return out;
  }
};

struct RunResult {
  MixtureModel model;  // standardized space
  std::vector<double> trace;
  double loglik = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  int floor_activations = 0;
  int reseeded = 0;
};

MixtureModel init_from_kmeans(const Eigen::MatrixXd& z, int components, double floor,
                              std::mt19937_64& rng) {
  const KMeansResult km = kmeans(z, components, rng);
  const Eigen::Index n = z.rows();
  MixtureModel m;
  m.priors.assign(static_cast<size_t>(components), 0.0);
  m.means.assign(static_cast<size_t>(components), Vec4::Zero());
  m.covariances.assign(static_cast<size_t>(components), Mat4::Zero());
  std::vector<int> counts(static_cast<size_t>(components), 0);
  for (Eigen::Index i = 0; i < n; ++i) ++counts[static_cast<size_t>(km.labels[static_cast<size_t>(i)])];
  for (int k = 0; k < components; ++k) {
    m.means[static_cast<size_t>(k)] = km.centroids.row(k).transpose();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(km.labels[static_cast<size_t>(i)]);
    const Vec4 d = z.row(i).transpose() - m.means[k];
    m.covariances[k] += d * d.transpose();
  }
  for (int k = 0; k < components; ++k) {
    const auto kk = static_cast<size_t>(k);
    m.covariances[kk] = m.covariances[kk] / counts[kk] + floor * Mat4::Identity();
    m.priors[kk] = static_cast<double>(counts[kk]) / static_cast<double>(n);
  }
  return m;
}

RunResult run_em(const Eigen::MatrixXd& z, const TrainConfig& config, std::mt19937_64& rng,
                 double log_jacobian) {
  const Eigen::Index n = z.rows();
  const int K = config.components;
  RunResult run;
  run.model = init_from_kmeans(z, K, config.floor, rng);
  MixtureModel& m = run.model;

  RowMajorMatrix resp(n, K);
  std::vector<int> dead_streak(static_cast<size_t>(K), 0);
  int reseeds_left = 1;
  double prev = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd point_loglik(n);

  for (int iter = 0;; ++iter) {
    // E-step
    std::vector<GaussianCache> caches;
    caches.reserve(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) caches.push_back(factor(m.covariances[static_cast<size_t>(k)]));
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec4 x = z.row(i).transpose();
      for (int k = 0; k < K; ++k) {
        const auto kk = static_cast<size_t>(k);
        resp(i, k) = (m.priors[kk] > 0.0 ? std::log(m.priors[kk])
                                          : -std::numeric_limits<double>::infinity()) +
                     log_density(caches[kk], m.means[kk], x);
      }
      point_loglik(i) = normalize_log(resp.row(i));
      ll += point_loglik(i);
    }
    ll -= log_jacobian;
    run.trace.push_back(ll);
    run.loglik = ll;

    if (iter > 0 && ll - prev < config.loglik_tol * std::abs(prev)) {
      run.converged = true;
      break;
    }
    if (iter == config.max_iters) break;
    prev = ll;

    // M-step
    const Eigen::RowVectorXd mass = resp.colwise().sum();
    for (int k = 0; k < K; ++k) {
      const auto kk = static_cast<size_t>(k);
      if (mass(k) < kDeadMass) {
        if (++dead_streak[kk] < 2) continue;
        if (reseeds_left == 0) {
          fail(ErrorKind::NumericalCollapse,
               "mixture component " + std::to_string(k) + " lost all responsibility twice");
        }
        --reseeds_left;
        ++run.reseeded;
        dead_streak[kk] = 0;
        Eigen::Index worst = 0;
        point_loglik.minCoeff(&worst);
        m.means[kk] = z.row(worst).transpose();
        m.covariances[kk] = Mat4::Identity();
        m.priors[kk] = 1.0 / K;
        continue;
      }
      dead_streak[kk] = 0;
      Vec4 mean = Vec4::Zero();
      for (Eigen::Index i = 0; i < n; ++i) mean += resp(i, k) * z.row(i).transpose();
      mean /= mass(k);
      Mat4 cov = Mat4::Zero();
      for (Eigen::Index i = 0; i < n; ++i) {
        const Vec4 d = z.row(i).transpose() - mean;
        cov += resp(i, k) * (d * d.transpose());
      }
      cov /= mass(k);
      if (floor_eigenvalues(cov, config.floor)) ++run.floor_activations;
      m.means[kk] = mean;
      m.covariances[kk] = cov;
      m.priors[kk] = mass(k) / static_cast<double>(n);
    }
    double prior_sum = 0.0;
    for (double p : m.priors) prior_sum += p;
    for (double& p : m.priors) p /= prior_sum;
    run.iterations = iter + 1;
  }
  return run;
}

}  // namespace

void MixtureModel::validate(double min_eigenvalue) const {
  if (priors.empty()) fail(ErrorKind::ValidationError, "mixture has no components");
  if (means.size() != priors.size() || covariances.size() != priors.size()) {
    fail(ErrorKind::ValidationError, "mixture parameter arrays differ in length");
  }
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorKind::ValidationError, "negative prior");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorKind::ValidationError, "priors sum to " + std::to_string(sum));
  }
  for (size_t k = 0; k < covariances.size(); ++k) {
    const Mat4& c = covariances[k];
    if (!c.allFinite() || !means[k].allFinite()) {
      fail(ErrorKind::ValidationError, "non-finite component " + std::to_string(k));
    }
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      fail(ErrorKind::ValidationError, "covariance " + std::to_string(k) + " is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Mat4> solver(0.5 * (c + c.transpose()),
                                                     Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < min_eigenvalue - 1e-12 * scale) {
      fail(ErrorKind::ValidationError,
           "covariance " + std::to_string(k) + " has eigenvalue below the floor");
    }
  }
}

double MixtureModel::log_likelihood(const Eigen::MatrixXd& rows) const {
  std::vector<GaussianCache> caches;
  for (const auto& c : covariances) caches.push_back(factor(c));
  Eigen::RowVectorXd logw(size());
  double ll = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Vec4 x = rows.row(i).transpose();
    for (int k = 0; k < size(); ++k) {
      const auto kk = static_cast<size_t>(k);
      logw(k) = std::log(priors[kk]) + log_density(caches[kk], means[kk], x);
    }
    ll += normalize_log(logw);
  }
  return ll;
}

double MixtureModel::log_likelihood(std::span<const Datapoint> data) const {
  return log_likelihood(to_rows(data));
}

Eigen::MatrixXd to_rows(std::span<const Datapoint> data) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(data.size()), 4);
  for (size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    rows(r, kTime) = data[i].time;
    rows(r, kRelX) = data[i].rel_position.x();
    rows(r, kRelY) = data[i].rel_position.y();
    rows(r, kRelAngle) = data[i].rel_angle;
  }
  return rows;
}

void TrainConfig::validate() const {
  if (components < 1) fail(ErrorKind::ConfigError, "gmm.N must be >= 1");
  if (max_iters < 1) fail(ErrorKind::ConfigError, "gmm.max_iters must be >= 1");
  if (!(floor > 0.0)) fail(ErrorKind::ConfigError, "gmm.floor must be > 0");
  if (!(loglik_tol >= 0.0)) fail(ErrorKind::ConfigError, "gmm.tol must be >= 0");
  if (restarts < 1) fail(ErrorKind::ConfigError, "gmm.restarts must be >= 1");
}

TrainResult em_train(const Eigen::MatrixXd& rows, const TrainConfig& config) {
  config.validate();
  if (rows.cols() != 4) fail(ErrorKind::ValidationError, "training rows must have 4 columns");
  if (rows.rows() < config.components) {
    fail(ErrorKind::TooFewPoints, std::to_string(rows.rows()) + " datapoints for " +
                                      std::to_string(config.components) + " components");
  }
  if (!rows.allFinite()) fail(ErrorKind::ValidationError, "training data is not finite");

  const Standardizer standardizer = Standardizer::fit(rows, config.standardize);
  const Eigen::MatrixXd z = standardizer.apply(rows);
  const double log_jacobian = standardizer.log_jacobian(static_cast<size_t>(rows.rows()));

  TrainResult best;
  best.loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> restart_ll;
  RunResult winner;
  int winner_index = -1;
  for (int r = 0; r < config.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    RunResult run = run_em(z, config, rng, log_jacobian);
    restart_ll.push_back(run.loglik);
    if (winner_index < 0 || run.loglik > winner.loglik) {
      winner = std::move(run);
      winner_index = r;
    }
  }

  best.model = standardizer.restore(winner.model);
  best.loglik = winner.loglik;
  best.diagnostics.loglik_trace = std::move(winner.trace);
  best.diagnostics.restart_logliks = std::move(restart_ll);
  best.diagnostics.best_restart = winner_index;
  best.diagnostics.iterations = winner.iterations;
  best.diagnostics.converged = winner.converged;
  best.diagnostics.floor_activations = winner.floor_activations;
  best.diagnostics.reseeded_components = winner.reseeded;
  return best;
}

TrainResult em_train(std::span<const Datapoint> data, const TrainConfig& config) {
  return em_train(to_rows(data), config);
}

int parameter_count(int components) noexcept { return components * (1 + 4 + 10) - 1; }

double bic(double loglik, int components, size_t samples) noexcept {
  return -2.0 * loglik + parameter_count(components) * std::log(static_cast<double>(samples));
}

SelectionResult select_components(const Eigen::MatrixXd& rows, int min_components,
                                  int max_components, const TrainConfig& config) {
  if (min_components < 1 || max_components < min_components) {
    fail(ErrorKind::ConfigError, "component range must be non-empty and start at >= 1");
  }
  if (max_components > rows.rows()) {
    fail(ErrorKind::TooFewPoints, "component range exceeds the number of datapoints");
  }
  SelectionResult result;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int n = min_components; n <= max_components; ++n) {
    TrainConfig c = config;
    c.components = n;
    TrainResult trained = em_train(rows, c);
    const double score = bic(trained.loglik, n, static_cast<size_t>(rows.rows()));
    result.table.push_back({n, trained.loglik, score});
    if (score < best_bic) {
      best_bic = score;
      result.components = n;
      result.best = std::move(trained);
    }
  }
  return result;
}

SelectionResult select_components(std::span<const Datapoint> data, int min_components,
                                  int max_components, const TrainConfig& config) {
  return select_components(to_rows(data), min_components, max_components, config);
}

}  // namespace tissuegmm
