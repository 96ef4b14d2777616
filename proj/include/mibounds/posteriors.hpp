#pragma once

#include "mibounds/models.hpp"

namespace mibounds {

/// Gaussian with diagonal covariance.
struct GaussianMeasure {
  Vector mean;
  Vector var_diag;

  GaussianMeasure() = default;
  GaussianMeasure(Vector mean, Vector var_diag);
  static GaussianMeasure isotropic(int dim, double mean, double var);

  int dim() const { return static_cast<int>(mean.size()); }
  /// Throws std::invalid_argument unless lengths agree and variances are > 0.
  void validate() const;
};

/// KL(p || q) for diagonal Gaussians.
double kl_gaussian_measures(const GaussianMeasure& p, const GaussianMeasure& q);

/// Reference prior for the sequence model: N(0, diag(i^{-1-2b})).
GaussianMeasure sequence_prior(const GaussianSequenceModel& model);

/// pi_{n,alpha} from the sample mean: precision 1/s_i^2 + n alpha / v^2 and
/// mean (m_i / s_i^2 + n alpha xbar_i / v^2) / precision.
GaussianMeasure fractional_posterior_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                              const Vector& sample_mean, double noise_sd);
GaussianMeasure fractional_posterior_gaussian(const GaussianMeanModel& model,
                                              const GaussianMeasure& prior, double alpha,
                                              const Sample& s);
GaussianMeasure fractional_posterior_gaussian(const GaussianSequenceModel& model,
                                              const GaussianMeasure& prior, double alpha,
                                              const Sample& s);

struct LocalizedPriorParams {
  double beta = 0.0;
  GaussianMeasure base;
  Vector theta0;
};

/// pi_{-beta} proportional to exp(-beta KL(P_theta0 || P_theta)) pi(theta),
/// with KL = ||theta - theta0||^2 / (2 v^2); per coordinate
/// precision 1/s_i^2 + beta/v^2 and mean (m_i/s_i^2 + beta theta0_i / v^2)/precision.
GaussianMeasure localized_prior_gaussian(const LocalizedPriorParams& params, double noise_sd);

/// E_{theta ~ rho}[KL(P_theta0 || P_theta)] = (||mean - theta0||^2 + tr) / (2 v^2).
double expected_kl_under(const GaussianMeasure& measure, const Vector& theta0, double noise_sd);
/// E_{theta ~ rho}[V(theta, theta0)] with V = ||theta - theta0||^2 (1 + 4 v^2) / (2 v^4).
double expected_v_under(const GaussianMeasure& measure, const Vector& theta0, double noise_sd);
/// E_{theta ~ rho}[D_alpha(P_theta || P_theta0)] = alpha E_rho[KL].
double expected_renyi_under(const GaussianMeasure& measure, double alpha, const Vector& theta0,
                            double noise_sd);
/// E_{theta ~ rho}[r_n(theta, theta0)] given the sample mean.
double expected_rn_under(const GaussianMeasure& measure, const Vector& theta0,
                         const Vector& sample_mean, int n, double noise_sd);

/// E_S[pi_{n,alpha}] when S ~ P_theta0^n: Gaussian because the posterior mean is
/// linear in the sample mean.
GaussianMeasure posterior_marginal_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                            const Vector& theta0, double noise_sd);

/// I(theta; S) for rho = pi_{n,alpha}, in closed form:
/// sum_i 1/2 log(1 + w_i^2 v^2 / (n C_i)).
double mutual_information_gaussian(const GaussianMeanModel& model, const GaussianMeasure& prior,
                                   double alpha, int n, const Vector& theta0);

/// E_S[KL(pi_{n,alpha} || pi)], the left side of the decomposition
/// E_S KL(rho || pi) = I + KL(E_S rho || pi), in closed form.
double expected_posterior_kl_to_prior(const GaussianMeasure& prior, double alpha, int n,
                                      const Vector& theta0, double noise_sd);

}  // namespace mibounds
