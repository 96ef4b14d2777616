#include "mibounds/assumptions.hpp"

#include "mibounds/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mibounds {

nlohmann::json DimensionCertificate::to_json() const {
  nlohmann::json j;
  j["d_pi"] = d_pi;
  j["kappa_pi"] = kappa_pi;
  j["d_pi_prime"] = d_pi_prime ? nlohmann::json(*d_pi_prime) : nlohmann::json(nullptr);
  j["method"] = method;
  j["beta_grid"] = beta_grid;
  j["empirical_sup"] = empirical_sup;
  j["beta_at_sup"] = beta_at_sup;
  if (termwise_sup) j["termwise_sup"] = *termwise_sup;
  if (empirical_sup_prime) j["empirical_sup_prime"] = *empirical_sup_prime;
  j["asymptotic_only"] = asymptotic_only;
  return j;
}

std::vector<double> default_beta_grid() { return log_space(1e-3, 1e6, 200); }

std::string describe_grid(const std::vector<double>& grid) {
  if (grid.empty()) return "empty";
  char buf[128];
  std::snprintf(buf, sizeof buf, "log-spaced, %zu points on [%.6g, %.6g]", grid.size(),
                grid.front(), grid.back());
  return buf;
}

namespace {

void fail_if_exceeds(double sup, double bound, const char* what) {
  if (sup > bound + 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": grid supremum " << sup << " exceeds the closed form " << bound;
    throw std::runtime_error(msg.str());
  }
}

struct GaussianParts {
  double bias = 0.0;
  double variance = 0.0;
};

// beta E_{pi_{-beta}}[KL] split into the squared-bias and trace parts.
GaussianParts gaussian_parts(const GaussianMeasure& prior, const Vector& theta0, double v,
                             double beta) {
  const auto loc = localized_prior_gaussian({beta, prior, theta0}, v);
  const double s = 2.0 * v * v;
  return {beta * (loc.mean - theta0).squaredNorm() / s, beta * loc.var_diag.sum() / s};
}

}  // namespace

DimensionCertificate certify_assumption2_gaussian(const GaussianMeanModel& model,
                                                  const GaussianMeasure& prior,
                                                  const Vector& theta0,
                                                  const std::vector<double>& beta_grid) {
  prior.validate();
  if (prior.dim() != model.dim || theta0.size() != model.dim) {
    throw std::invalid_argument("certify_assumption2_gaussian: dimension mismatch");
  }
  DimensionCertificate cert;
  cert.kappa_pi = 1.0;
  cert.d_pi = (0.5 + (theta0 - prior.mean).array().square() / (8.0 * prior.var_diag.array())).sum();
  cert.method = "closed_form";
  cert.beta_grid = describe_grid(beta_grid);

  const double v = model.noise_sd;
  double bias_best = 0.0, var_best = 0.0;
  std::size_t bias_at = 0;
  for (std::size_t k = 0; k < beta_grid.size(); ++k) {
    const auto p = gaussian_parts(prior, theta0, v, beta_grid[k]);
    const double f = p.bias + p.variance;
    if (f > cert.empirical_sup) {
      cert.empirical_sup = f;
      cert.beta_at_sup = beta_grid[k];
    }
    if (p.bias > bias_best) {
      bias_best = p.bias;
      bias_at = k;
    }
    var_best = std::max(var_best, p.variance);
  }
  // The squared-bias part peaks at an interior beta; refine between the
  // neighbouring grid points.
  if (bias_best > 0.0 && beta_grid.size() >= 3) {
    const double lo = std::log(beta_grid[bias_at == 0 ? 0 : bias_at - 1]);
    const double hi = std::log(beta_grid[std::min(bias_at + 1, beta_grid.size() - 1)]);
    const auto m = golden_section(
        [&](double lb) { return -gaussian_parts(prior, theta0, v, std::exp(lb)).bias; }, lo, hi,
        1e-12);
    bias_best = std::max(bias_best, -m.f);
  }
  cert.termwise_sup = bias_best + var_best;
  fail_if_exceeds(cert.empirical_sup, cert.d_pi, "Gaussian dimension certificate");
  fail_if_exceeds(*cert.termwise_sup, cert.d_pi, "Gaussian dimension certificate (termwise)");
  return cert;
}

DimensionCertificate certify_assumption2_sequence(const GaussianSequenceModel& model,
                                                  const Vector& theta0,
                                                  const std::vector<double>& beta_grid) {
  if (theta0.size() != model.n_trunc) {
    throw std::invalid_argument("certify_assumption2_sequence: theta0 length must be n_trunc");
  }
  if (!model.admits(theta0)) {
    throw std::domain_error("certify_assumption2_sequence: theta0 outside the Sobolev ball");
  }
  const double b = model.smoothness;
  DimensionCertificate cert;
  cert.kappa_pi = 2.0 * b / (1.0 + 2.0 * b);
  cert.d_pi = 1.5 * model.radius + 0.5 + 1.0 / (4.0 * b);
  cert.method = "closed_form";
  cert.beta_grid = describe_grid(beta_grid);
  const auto prior = sequence_prior(model);
  for (double beta : beta_grid) {
    const auto loc = localized_prior_gaussian({beta, prior, theta0}, 1.0);
    const double f = std::pow(beta, cert.kappa_pi) * expected_kl_under(loc, theta0, 1.0);
    if (f > cert.empirical_sup) {
      cert.empirical_sup = f;
      cert.beta_at_sup = beta;
    }
  }
  fail_if_exceeds(cert.empirical_sup, cert.d_pi, "sequence-model dimension certificate");
  return cert;
}

namespace {

struct Curvature {
  double m, L;
};

Curvature kl_curvature(const ModelSpec& model) {
  if (const auto* g = std::get_if<GaussianMeanModel>(&model)) {
    if (g->dim != 1) throw std::invalid_argument("uniform-prior certificate: one dimension only");
    return {1.0 / g->noise_var(), 1.0 / g->noise_var()};
  }
  if (const auto* f = std::get_if<ExpFamily1D>(&model)) {
    return {f->strong_convexity, f->grad_lipschitz};
  }
  throw std::invalid_argument("uniform-prior certificate: unsupported model");
}

}  // namespace

double uniform_localized_beta_kl(const ModelSpec& model, double half_width, double theta0,
                                 double beta) {
  const Vector t0 = scalar_param(theta0);
  auto kl = [&](double t) { return kl_divergence(model, t0, scalar_param(t)).value; };
  const double M = half_width;
  if (beta == 0.0) return 0.0;
  const auto c = kl_curvature(model);
  const double w = 1.0 / std::sqrt(beta * c.L);
  std::vector<double> breaks{-M, M, theta0};
  for (double k : {1.0, 4.0, 16.0, 64.0}) {
    for (double s : {-1.0, 1.0}) {
      const double x = theta0 + s * k * w;
      if (x > -M && x < M) breaks.push_back(x);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const double z_scale = std::min(2.0 * M, std::sqrt(2.0 * std::numbers::pi / (beta * c.m)));
  const auto z = adaptive_simpson_panels([&](double t) { return std::exp(-beta * kl(t)); }, breaks,
                                         1e-10 * z_scale);
  const auto num = adaptive_simpson_panels(
      [&](double t) {
        const double k = kl(t);
        return k * std::exp(-beta * k);
      },
      breaks, 1e-10 * z_scale / beta);
  return beta * num.value / z.value;
}

DimensionCertificate certify_assumption2_uniform_1d(const ModelSpec& model, double half_width,
                                                    double theta0,
                                                    const std::vector<double>& beta_grid) {
  if (!(half_width > 0.0)) throw std::invalid_argument("uniform prior: half-width must be > 0");
  if (!(theta0 > -half_width && theta0 < half_width)) {
    throw std::domain_error("uniform prior: theta0 must lie strictly inside (-M, M)");
  }
  if (const auto* f = std::get_if<ExpFamily1D>(&model)) {
    f->require_domain(-half_width, "uniform prior support");
    f->require_domain(half_width, "uniform prior support");
  }
  const auto c = kl_curvature(model);
  const Vector t0 = scalar_param(theta0);
  for (double t : lin_space(-half_width, half_width, 1000)) {
    const double d2 = (t - theta0) * (t - theta0);
    const double kl = kl_divergence(model, t0, scalar_param(t)).value;
    if (kl < 0.5 * c.m * d2 * (1.0 - 1e-12) || kl > 0.5 * c.L * d2 * (1.0 + 1e-12) + 1e-300) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "uniform prior: quadratic KL sandwich fails at theta=" << t;
      throw std::runtime_error(msg.str());
    }
  }
  DimensionCertificate cert;
  cert.kappa_pi = 1.0;
  const double kappa = c.L / c.m;
  cert.d_pi = 0.5 * std::pow(kappa, 1.5);
  cert.method = "grid_sup";
  cert.beta_grid = describe_grid(beta_grid);
  for (double beta : beta_grid) {
    const double f = uniform_localized_beta_kl(model, half_width, theta0, beta);
    if (f > cert.empirical_sup) {
      cert.empirical_sup = f;
      cert.beta_at_sup = beta;
    }
  }
  cert.asymptotic_only = cert.empirical_sup > cert.d_pi;
  return cert;
}

DimensionCertificate certify_assumption3_gaussian(const GaussianMeanModel& model,
                                                  const GaussianMeasure& prior,
                                                  const Vector& theta0,
                                                  const std::vector<double>& beta_grid) {
  auto cert = certify_assumption2_gaussian(model, prior, theta0, beta_grid);
  const double v2 = model.noise_var();
  const double ratio = (1.0 + 4.0 * v2) / v2;
  cert.d_pi_prime = ratio * cert.d_pi;
  double sup = 0.0;
  for (double beta : beta_grid) {
    const auto loc = localized_prior_gaussian({beta, prior, theta0}, model.noise_sd);
    sup = std::max(sup, beta * expected_v_under(loc, theta0, model.noise_sd));
  }
  cert.empirical_sup_prime = sup;
  fail_if_exceeds(sup, *cert.d_pi_prime, "Gaussian V certificate");
  return cert;
}

DimensionCertificate certify_assumption4_conjugate(const GaussianMeanModel& model,
                                                   const GaussianMeasure& prior,
                                                   const Vector& theta0, double alpha, int n,
                                                   const MeanFieldFamily& fam,
                                                   const std::vector<double>& beta_grid) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  auto cert = certify_assumption2_gaussian(model, prior, theta0, beta_grid);
  double sup = 0.0;
  for (double beta : beta_grid) {
    const auto rho = localized_prior_gaussian({beta, prior, theta0}, model.noise_sd);
    if (!fam.contains(rho)) {
      throw std::runtime_error("assumption 4: localized prior is outside the mean-field family");
    }
    const double kl_self = kl_gaussian_measures(rho, rho);
    const double f = beta * (expected_kl_under(rho, theta0, model.noise_sd) + kl_self / n);
    sup = std::max(sup, f);
  }
  fail_if_exceeds(sup, cert.d_pi, "variational certificate");
  return cert;
}

}  // namespace mibounds
