#pragma once

#include "mibounds/numerics.hpp"
#include "mibounds/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

namespace mibounds {

/// N(theta, v^2 I_d) with unknown mean theta.
struct GaussianMeanModel {
  int dim = 1;
  double noise_sd = 1.0;

  GaussianMeanModel() = default;
  GaussianMeanModel(int dim, double noise_sd);

  double noise_var() const { return noise_sd * noise_sd; }
};

/// Gaussian sequence model X_{i,j} = theta_j + eps_{i,j}, truncated to the
/// first `n_trunc` coordinates, with theta in the Sobolev ball
/// { sum_l l^{2b} theta_l^2 <= L }. Unit noise.
struct GaussianSequenceModel {
  double smoothness = 1.0;  // b
  double radius = 1.0;      // L
  int n_trunc = 1;

  GaussianSequenceModel() = default;
  GaussianSequenceModel(double smoothness, double radius, int n_trunc);

  /// sum_l l^{2b} theta_l^2 over the stored coefficients.
  double sobolev_norm_sq(const Vector& theta) const;
  bool admits(const Vector& theta, double tol = 1e-9) const;
  /// Prior variance of coordinate i (1-based) for the reference prior, i^{-1-2b}.
  double prior_variance(int i) const;
  GaussianMeanModel as_mean_model() const { return {n_trunc, 1.0}; }
};

enum class Carrier { counting, lebesgue };

/// One-parameter exponential family p_theta(x) = exp(h(x) + x theta - psi(theta))
/// on a compact natural-parameter interval, with certified curvature bounds
/// strong_convexity <= psi'' <= grad_lipschitz.
struct ExpFamily1D {
  std::string name;
  std::function<double(double)> psi;
  std::function<double(double)> psi1;
  std::function<double(double)> psi2;
  std::function<double(double)> log_base;  // h(x)
  std::function<double(CounterRng&, double)> draw;
  double theta_lo = 0.0;
  double theta_hi = 1.0;
  double strong_convexity = 1.0;
  double grad_lipschitz = 1.0;
  Carrier carrier = Carrier::counting;
  long support_max = -1;  // counting carriers: largest support point, -1 if unbounded

  double kappa() const { return grad_lipschitz / strong_convexity; }
  bool contains(double theta) const { return theta >= theta_lo && theta <= theta_hi; }
  /// Throws std::domain_error when theta is outside [theta_lo, theta_hi].
  void require_domain(double theta, const char* what) const;
  /// Checks the interval and the curvature bounds on a 1000-point grid.
  void validate() const;

  double log_density(double theta, double x) const { return log_base(x) + x * theta - psi(theta); }
};

/// Poisson with theta = log(lambda) on [lo, hi]: m = e^lo, L = e^hi.
ExpFamily1D poisson_family(double lo, double hi);
/// Bernoulli with theta = logit(p) on [lo, hi]: m = min psi'' at the endpoints, L = 1/4.
ExpFamily1D bernoulli_family(double lo, double hi);
/// N(v^2 theta, v^2) in natural parameterization: psi = v^2 theta^2 / 2, m = L = v^2.
ExpFamily1D gaussian_natural_family(double v, double lo, double hi);

using ModelSpec = std::variant<GaussianMeanModel, GaussianSequenceModel, ExpFamily1D>;

struct Sample {
  Matrix data;  // one observation per row
  int n = 0;
  std::uint64_t seed_tag = 0;

  Vector mean() const { return data.colwise().mean().transpose(); }
};

int parameter_dim(const ModelSpec& model);
int observation_dim(const ModelSpec& model);

/// log p_theta(x).
double log_density(const ModelSpec& model, const Vector& theta, const Vector& x);

/// n i.i.d. draws from P_theta0; rows are generated from independent streams
/// keyed by (seed, row) so the output is a pure function of the arguments.
Sample sample(const ModelSpec& model, const Vector& theta0, int n, std::uint64_t seed);

/// Draws the sample mean of n observations directly. For the Gaussian models
/// it has the exact law N(theta0, v^2/n I), which is all the conjugate
/// posterior depends on.
Vector draw_gaussian_sample_mean(const Vector& theta0, double noise_sd, int n, CounterRng& rng);

/// r_n(theta, theta0) = sum_i log(p_theta0(X_i) / p_theta(X_i)), with
/// log(a/0) = +inf for a > 0 and log(0/0) = 0.
double neg_log_lik_ratio(const ModelSpec& model, const Vector& theta, const Vector& theta0,
                         const Sample& s);

/// Gaussian-model shortcut: r_n depends on S only through (n, sample mean).
double neg_log_lik_ratio_gaussian(const Vector& theta, const Vector& theta0,
                                  const Vector& sample_mean, int n, double noise_sd);

Vector scalar_param(double theta);

}  // namespace mibounds

namespace mibounds {

/// theta_j = a j^{-b-1} with a chosen so the Sobolev norm is 0.99 L.
Vector smooth_sequence_theta0(const GaussianSequenceModel& model);

}  // namespace mibounds
