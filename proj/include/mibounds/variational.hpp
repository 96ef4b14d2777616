#pragma once

#include "mibounds/models.hpp"
#include "mibounds/posteriors.hpp"

#include <optional>
#include <vector>

namespace mibounds {

/// Diagonal Gaussians, optionally with box constraints on the means.
struct MeanFieldFamily {
  int dim = 1;
  std::optional<Vector> mean_lo;
  std::optional<Vector> mean_hi;
  double var_floor = 1e-10;

  void validate() const;
  bool contains(const GaussianMeasure& q) const;
};

struct VariationalSolution {
  GaussianMeasure q;
  double objective = 0.0;
  int iterations = 0;  // coordinate sweeps of the best start
  bool converged = false;
};

struct VariationalOptions {
  int max_sweeps = 500;
  double tolerance = 1e-10;  // stop when a sweep improves the objective by less
  int gh_nodes = 32;
  /// Extra initial points tried in addition to the prior and prior mean +- 1 sd.
  std::vector<GaussianMeasure> extra_starts;
};

/// alpha / (n (1 - alpha)) E_q[r_n(theta, theta0)] + KL(q || prior) / (n (1 - alpha)).
/// E_q[r_n] is exact for the Gaussian models and uses Gauss-Hermite with
/// `gh_nodes` nodes for exponential families; nodes outside the domain are
/// clamped to it and a warning is written to std::clog.
double variational_objective(const ModelSpec& model, const GaussianMeasure& prior, double alpha,
                             const Sample& s, const Vector& theta0, const GaussianMeasure& q,
                             int gh_nodes = 32);

/// Gaussian-model objective from the sufficient statistic (n, sample mean).
double variational_objective_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                      const Vector& sample_mean, const Vector& theta0,
                                      double noise_sd, const GaussianMeasure& q);

/// Coordinate-wise golden-section search over each mean and log-variance,
/// started from the prior, prior mean +- 1 prior sd, and any extra starts.
VariationalSolution solve_variational(const ModelSpec& model, const GaussianMeasure& prior,
                                      double alpha, const Sample& s, const Vector& theta0,
                                      const MeanFieldFamily& fam,
                                      const VariationalOptions& opts = {});

/// Same, for the Gaussian models given only (n, sample mean).
VariationalSolution solve_variational_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                               const Vector& sample_mean, const Vector& theta0,
                                               double noise_sd, const MeanFieldFamily& fam,
                                               const VariationalOptions& opts = {});

/// Number of Gauss-Hermite nodes clamped to a domain boundary so far (process-wide).
long clamped_node_count();

}  // namespace mibounds
