#include "mibounds/posteriors.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mibounds {

GaussianMeasure::GaussianMeasure(Vector m, Vector v) : mean(std::move(m)), var_diag(std::move(v)) {
  validate();
}

GaussianMeasure GaussianMeasure::isotropic(int dim, double mean, double var) {
  return {Vector::Constant(dim, mean), Vector::Constant(dim, var)};
}

void GaussianMeasure::validate() const {
  if (mean.size() != var_diag.size()) {
    throw std::invalid_argument("GaussianMeasure: mean and variance lengths differ");
  }
  if (mean.size() == 0) throw std::invalid_argument("GaussianMeasure: empty");
  if (!(var_diag.array() > 0.0).all()) {
    throw std::invalid_argument("GaussianMeasure: variances must be > 0");
  }
}

double kl_gaussian_measures(const GaussianMeasure& p, const GaussianMeasure& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("kl_gaussian_measures: dimension mismatch");
  const auto r = (p.var_diag.array() / q.var_diag.array());
  const auto d2 = (p.mean - q.mean).array().square() / q.var_diag.array();
  return 0.5 * (r + d2 - 1.0 - r.log()).sum();
}

GaussianMeasure sequence_prior(const GaussianSequenceModel& model) {
  Vector var(model.n_trunc);
  for (int i = 1; i <= model.n_trunc; ++i) var[i - 1] = model.prior_variance(i);
  return {Vector::Zero(model.n_trunc), var};
}

GaussianMeasure fractional_posterior_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                              const Vector& sample_mean, double noise_sd) {
  prior.validate();
  if (n < 1) throw std::invalid_argument("fractional posterior: empty sample");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("fractional posterior: alpha must lie in (0, 1]");
  }
  if (sample_mean.size() != prior.mean.size()) {
    throw std::invalid_argument("fractional posterior: prior/model dimension mismatch");
  }
  const double lik_prec = n * alpha / (noise_sd * noise_sd);
  const Vector prec = prior.var_diag.cwiseInverse().array() + lik_prec;
  Vector mean =
      (prior.mean.cwiseQuotient(prior.var_diag).array() + lik_prec * sample_mean.array()) /
      prec.array();
  return {std::move(mean), prec.cwiseInverse()};
}

GaussianMeasure fractional_posterior_gaussian(const GaussianMeanModel& model,
                                              const GaussianMeasure& prior, double alpha,
                                              const Sample& s) {
  if (s.n < 1) throw std::invalid_argument("fractional posterior: empty sample");
  return fractional_posterior_gaussian(prior, alpha, s.n, s.mean(), model.noise_sd);
}

GaussianMeasure fractional_posterior_gaussian(const GaussianSequenceModel& model,
                                              const GaussianMeasure& prior, double alpha,
                                              const Sample& s) {
  (void)model;
  if (s.n < 1) throw std::invalid_argument("fractional posterior: empty sample");
  return fractional_posterior_gaussian(prior, alpha, s.n, s.mean(), 1.0);
}

GaussianMeasure localized_prior_gaussian(const LocalizedPriorParams& params, double noise_sd) {
  params.base.validate();
  if (!(params.beta >= 0.0)) throw std::invalid_argument("localized prior: beta must be >= 0");
  if (params.theta0.size() != params.base.mean.size()) {
    throw std::invalid_argument("localized prior: theta0 dimension mismatch");
  }
  if (params.beta == 0.0) return params.base;
  const double b = params.beta / (noise_sd * noise_sd);
  const Vector prec = params.base.var_diag.cwiseInverse().array() + b;
  Vector mean =
      (params.base.mean.cwiseQuotient(params.base.var_diag).array() + b * params.theta0.array()) /
      prec.array();
  return {std::move(mean), prec.cwiseInverse()};
}

double expected_kl_under(const GaussianMeasure& measure, const Vector& theta0, double noise_sd) {
  if (theta0.size() != measure.mean.size()) throw std::invalid_argument("dimension mismatch");
  return ((measure.mean - theta0).squaredNorm() + measure.var_diag.sum()) /
         (2.0 * noise_sd * noise_sd);
}

double expected_v_under(const GaussianMeasure& measure, const Vector& theta0, double noise_sd) {
  if (theta0.size() != measure.mean.size()) throw std::invalid_argument("dimension mismatch");
  const double v2 = noise_sd * noise_sd;
  return ((measure.mean - theta0).squaredNorm() + measure.var_diag.sum()) * (1.0 + 4.0 * v2) /
         (2.0 * v2 * v2);
}

double expected_renyi_under(const GaussianMeasure& measure, double alpha, const Vector& theta0,
                            double noise_sd) {
  return alpha * expected_kl_under(measure, theta0, noise_sd);
}

double expected_rn_under(const GaussianMeasure& measure, const Vector& theta0,
                         const Vector& sample_mean, int n, double noise_sd) {
  const double q = (sample_mean - measure.mean).squaredNorm() + measure.var_diag.sum() -
                   (sample_mean - theta0).squaredNorm();
  return n * q / (2.0 * noise_sd * noise_sd);
}

namespace {

struct Shrinkage {
  Vector w;  // weight on the sample mean
  Vector c;  // posterior variance
};

Shrinkage shrinkage(const GaussianMeasure& prior, double alpha, int n, double noise_sd) {
  const double lik_prec = n * alpha / (noise_sd * noise_sd);
  const Vector prec = prior.var_diag.cwiseInverse().array() + lik_prec;
  return {lik_prec * prec.cwiseInverse(), prec.cwiseInverse()};
}

}  // namespace

GaussianMeasure posterior_marginal_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                            const Vector& theta0, double noise_sd) {
  const auto sh = shrinkage(prior, alpha, n, noise_sd);
  const double s2 = noise_sd * noise_sd / n;
  Vector mean = sh.w.cwiseProduct(theta0) + (1.0 - sh.w.array()).matrix().cwiseProduct(prior.mean);
  Vector var = sh.c.array() + sh.w.array().square() * s2;
  return {std::move(mean), std::move(var)};
}

double mutual_information_gaussian(const GaussianMeanModel& model, const GaussianMeasure& prior,
                                   double alpha, int n, const Vector& theta0) {
  prior.validate();
  if (n < 1) throw std::invalid_argument("mutual information: n must be >= 1");
  if (theta0.size() != model.dim || prior.dim() != model.dim) {
    throw std::invalid_argument("mutual information: dimension mismatch");
  }
  const auto sh = shrinkage(prior, alpha, n, model.noise_sd);
  const double s2 = model.noise_var() / n;
  return 0.5 * (sh.w.array().square() * s2 / sh.c.array()).log1p().sum();
}

double expected_posterior_kl_to_prior(const GaussianMeasure& prior, double alpha, int n,
                                      const Vector& theta0, double noise_sd) {
  const auto sh = shrinkage(prior, alpha, n, noise_sd);
  const double s2 = noise_sd * noise_sd / n;
  const auto shift = sh.w.array() * (theta0 - prior.mean).array();
  const auto mean_sq = shift.square() + sh.w.array().square() * s2;
  const auto r = sh.c.array() / prior.var_diag.array();
  return 0.5 * (r + mean_sq / prior.var_diag.array() - 1.0 - r.log()).sum();
}

}  // namespace mibounds
