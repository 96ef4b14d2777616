#include "mibounds/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mibounds {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double gaussian_log_density(const Vector& theta, const Vector& x, double v) {
  if (theta.size() != x.size()) throw std::invalid_argument("log_density: dimension mismatch");
  const double d = static_cast<double>(x.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi * v * v) -
         (x - theta).squaredNorm() / (2.0 * v * v);
}

void require_dim(const Vector& theta, int dim, const char* what) {
  if (theta.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": parameter has dimension " +
                                std::to_string(theta.size()) + ", model expects " +
                                std::to_string(dim));
  }
}

}  // namespace

GaussianMeanModel::GaussianMeanModel(int dim_, double noise_sd_) : dim(dim_), noise_sd(noise_sd_) {
  if (dim < 1) throw std::invalid_argument("GaussianMeanModel: dim must be >= 1");
  if (!(noise_sd > 0.0)) throw std::invalid_argument("GaussianMeanModel: noise_sd must be > 0");
}

GaussianSequenceModel::GaussianSequenceModel(double b, double L, int n)
    : smoothness(b), radius(L), n_trunc(n) {
  if (!(smoothness > 0.0)) throw std::invalid_argument("GaussianSequenceModel: b must be > 0");
  if (!(radius > 0.0)) throw std::invalid_argument("GaussianSequenceModel: L must be > 0");
  if (n_trunc < 1) throw std::invalid_argument("GaussianSequenceModel: truncation must be >= 1");
}

double GaussianSequenceModel::sobolev_norm_sq(const Vector& theta) const {
  double acc = 0.0;
  for (Eigen::Index l = 0; l < theta.size(); ++l) {
    acc += std::pow(static_cast<double>(l + 1), 2.0 * smoothness) * theta[l] * theta[l];
  }
  return acc;
}

bool GaussianSequenceModel::admits(const Vector& theta, double tol) const {
  return sobolev_norm_sq(theta) <= radius + tol;
}

double GaussianSequenceModel::prior_variance(int i) const {
  return std::pow(static_cast<double>(i), -1.0 - 2.0 * smoothness);
}

void ExpFamily1D::require_domain(double theta, const char* what) const {
  if (!contains(theta)) {
    throw std::domain_error(std::string(what) + ": theta=" + std::to_string(theta) +
                            " outside [" + std::to_string(theta_lo) + ", " +
                            std::to_string(theta_hi) + "] for " + name);
  }
}

void ExpFamily1D::validate() const {
  if (!(theta_lo < theta_hi)) throw std::invalid_argument(name + ": need theta_lo < theta_hi");
  if (!(strong_convexity > 0.0 && strong_convexity <= grad_lipschitz)) {
    throw std::invalid_argument(name + ": need 0 < strong_convexity <= grad_lipschitz");
  }
  if (!psi || !psi1 || !psi2 || !log_base) {
    throw std::invalid_argument(name + ": partition function and base measure are required");
  }
  constexpr int kGrid = 1000;
  const double slack = 1e-12 * grad_lipschitz;
  for (int i = 0; i < kGrid; ++i) {
    const double t = theta_lo + (theta_hi - theta_lo) * i / (kGrid - 1.0);
    const double c = psi2(t);
    if (c < strong_convexity - slack || c > grad_lipschitz + slack) {
      throw std::invalid_argument(name + ": psi''(" + std::to_string(t) + ")=" +
                                  std::to_string(c) + " outside [m, L]");
    }
  }
}

ExpFamily1D poisson_family(double lo, double hi) {
  ExpFamily1D f;
  f.name = "poisson";
  f.psi = [](double t) { return std::exp(t); };
  f.psi1 = [](double t) { return std::exp(t); };
  f.psi2 = [](double t) { return std::exp(t); };
  f.log_base = [](double x) { return -std::lgamma(x + 1.0); };
  f.draw = [](CounterRng& rng, double t) { return static_cast<double>(rng.poisson(std::exp(t))); };
  f.theta_lo = lo;
  f.theta_hi = hi;
  f.strong_convexity = std::exp(lo);
  f.grad_lipschitz = std::exp(hi);
  f.carrier = Carrier::counting;
  f.validate();
  return f;
}

ExpFamily1D bernoulli_family(double lo, double hi) {
  auto second = [](double t) {
    const double e = std::exp(-std::fabs(t));
    return e / ((1.0 + e) * (1.0 + e));
  };
  ExpFamily1D f;
  f.name = "bernoulli";
  f.psi = [](double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); };
  f.psi1 = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
  f.psi2 = second;
  f.log_base = [](double) { return 0.0; };
  f.draw = [](CounterRng& rng, double t) { return rng.bernoulli(1.0 / (1.0 + std::exp(-t))) ? 1.0 : 0.0; };
  f.theta_lo = lo;
  f.theta_hi = hi;
  f.strong_convexity = std::min(second(lo), second(hi));
  f.grad_lipschitz = 0.25;
  f.carrier = Carrier::counting;
  f.support_max = 1;
  f.validate();
  return f;
}

ExpFamily1D gaussian_natural_family(double v, double lo, double hi) {
  if (!(v > 0.0)) throw std::invalid_argument("gaussian_natural_family: v must be > 0");
  const double v2 = v * v;
  ExpFamily1D f;
  f.name = "gaussian_natural";
  f.psi = [v2](double t) { return 0.5 * v2 * t * t; };
  f.psi1 = [v2](double t) { return v2 * t; };
  f.psi2 = [v2](double) { return v2; };
  f.log_base = [v2](double x) { return -0.5 * x * x / v2 - 0.5 * std::log(2.0 * std::numbers::pi * v2); };
  f.draw = [v, v2](CounterRng& rng, double t) { return v2 * t + v * rng.normal(); };
  f.theta_lo = lo;
  f.theta_hi = hi;
  f.strong_convexity = v2;
  f.grad_lipschitz = v2;
  f.carrier = Carrier::lebesgue;
  f.validate();
  return f;
}

int parameter_dim(const ModelSpec& model) {
  return std::visit(overloaded{[](const GaussianMeanModel& m) { return m.dim; },
                               [](const GaussianSequenceModel& m) { return m.n_trunc; },
                               [](const ExpFamily1D&) { return 1; }},
                    model);
}

int observation_dim(const ModelSpec& model) { return parameter_dim(model); }

double log_density(const ModelSpec& model, const Vector& theta, const Vector& x) {
  return std::visit(
      overloaded{[&](const GaussianMeanModel& m) {
                   require_dim(theta, m.dim, "log_density");
                   return gaussian_log_density(theta, x, m.noise_sd);
                 },
                 [&](const GaussianSequenceModel& m) {
                   require_dim(theta, m.n_trunc, "log_density");
                   return gaussian_log_density(theta, x, 1.0);
                 },
                 [&](const ExpFamily1D& f) {
                   require_dim(theta, 1, "log_density");
                   f.require_domain(theta[0], "log_density");
                   const double xv = x[0];
                   if (f.carrier == Carrier::counting &&
                       (xv < 0.0 || xv != std::floor(xv) ||
                        (f.support_max >= 0 && xv > static_cast<double>(f.support_max)))) {
                     return -std::numeric_limits<double>::infinity();
                   }
                   return f.log_density(theta[0], xv);
                 }},
      model);
}

Sample sample(const ModelSpec& model, const Vector& theta0, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const int dim = parameter_dim(model);
  require_dim(theta0, dim, "sample");
  Sample s;
  s.n = n;
  s.seed_tag = seed;
  s.data.resize(n, dim);
  std::visit(overloaded{[&](const GaussianMeanModel& m) {
                          for (int i = 0; i < n; ++i) {
                            CounterRng rng(seed, static_cast<std::uint64_t>(i));
                            for (int j = 0; j < dim; ++j) s.data(i, j) = theta0[j] + m.noise_sd * rng.normal();
                          }
                        },
                        [&](const GaussianSequenceModel& m) {
                          if (!m.admits(theta0)) {
                            throw std::domain_error("sample: theta0 outside the Sobolev ball");
                          }
                          for (int i = 0; i < n; ++i) {
                            CounterRng rng(seed, static_cast<std::uint64_t>(i));
                            for (int j = 0; j < dim; ++j) s.data(i, j) = theta0[j] + rng.normal();
                          }
                        },
                        [&](const ExpFamily1D& f) {
                          f.require_domain(theta0[0], "sample");
                          for (int i = 0; i < n; ++i) {
                            CounterRng rng(seed, static_cast<std::uint64_t>(i));
                            s.data(i, 0) = f.draw(rng, theta0[0]);
                          }
                        }},
             model);
  return s;
}

Vector draw_gaussian_sample_mean(const Vector& theta0, double noise_sd, int n, CounterRng& rng) {
  if (n < 1) throw std::invalid_argument("draw_gaussian_sample_mean: n must be >= 1");
  const double sd = noise_sd / std::sqrt(static_cast<double>(n));
  Vector out(theta0.size());
  for (Eigen::Index j = 0; j < theta0.size(); ++j) out[j] = theta0[j] + sd * rng.normal();
  return out;
}

double neg_log_lik_ratio(const ModelSpec& model, const Vector& theta, const Vector& theta0,
                         const Sample& s) {
  double acc = 0.0;
  for (int i = 0; i < s.n; ++i) {
    const Vector x = s.data.row(i).transpose();
    const double l0 = log_density(model, theta0, x);
    const double l1 = log_density(model, theta, x);
    if (std::isinf(l0) && l0 < 0 && std::isinf(l1) && l1 < 0) continue;  // 0/0
    if (std::isinf(l1) && l1 < 0) return INFINITY;
    acc += l0 - l1;
  }
  return acc;
}

double neg_log_lik_ratio_gaussian(const Vector& theta, const Vector& theta0,
                                  const Vector& sample_mean, int n, double noise_sd) {
  const double scale = static_cast<double>(n) / (2.0 * noise_sd * noise_sd);
  return scale * ((sample_mean - theta).squaredNorm() - (sample_mean - theta0).squaredNorm());
}

Vector scalar_param(double theta) {
  Vector v(1);
  v[0] = theta;
  return v;
}

}  // namespace mibounds

namespace mibounds {

Vector smooth_sequence_theta0(const GaussianSequenceModel& model) {
  Vector theta(model.n_trunc);
  double norm = 0.0;
  for (int j = 1; j <= model.n_trunc; ++j) {
    theta[j - 1] = std::pow(static_cast<double>(j), -model.smoothness - 1.0);
  }
  // Scale against the infinite-sequence norm so every truncation level
  // shares the same leading coefficients.
  norm = std::numbers::pi * std::numbers::pi / 6.0;
  theta *= std::sqrt(0.99 * model.radius / norm);
  return theta;
}

}  // namespace mibounds
