#include "mibounds/variational.hpp"

#include "mibounds/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace mibounds {

namespace {

std::atomic<long> g_clamped{0};
std::atomic<bool> g_warned{false};

void require_alpha_open(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("variational objective: alpha must lie in (0, 1)");
  }
}

constexpr double kLogVarCeiling = 40.0;

// Objective written as a sum of coordinate terms plus a constant, so that a
// coordinate move only re-evaluates its own term when the model separates.
struct Problem {
  int dim = 0;
  bool separable = false;
  std::function<double(int, double, double)> term;  // (coordinate, mean, var) -> term
  std::function<double(const GaussianMeasure&)> full;
};

double kl_coord(double m, double s, double pm, double pv) {
  const double r = s / pv;
  return 0.5 * (r + (m - pm) * (m - pm) / pv - 1.0 - std::log(r));
}

VariationalSolution coordinate_search(const Problem& p, const GaussianMeasure& start,
                                      const MeanFieldFamily& fam, const VariationalOptions& opts) {
  GaussianMeasure q = start;
  q.var_diag = q.var_diag.cwiseMax(fam.var_floor);
  for (int j = 0; j < p.dim; ++j) {
    if (fam.mean_lo) q.mean[j] = std::max(q.mean[j], (*fam.mean_lo)[j]);
    if (fam.mean_hi) q.mean[j] = std::min(q.mean[j], (*fam.mean_hi)[j]);
  }
  const double log_floor = std::log(fam.var_floor);

  std::vector<double> terms;
  auto total = [&]() {
    if (!p.separable) return p.full(q);
    double t = 0.0;
    for (double v : terms) t += v;
    return t;
  };
  if (p.separable) {
    terms.resize(p.dim);
    for (int j = 0; j < p.dim; ++j) terms[j] = p.term(j, q.mean[j], q.var_diag[j]);
  }

  VariationalSolution sol;
  double current = total();
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const double before = current;
    for (int j = 0; j < p.dim; ++j) {
      auto eval = [&](double m, double s) {
        if (p.separable) return p.term(j, m, s);
        const double om = q.mean[j], os = q.var_diag[j];
        q.mean[j] = m;
        q.var_diag[j] = s;
        const double f = p.full(q);
        q.mean[j] = om;
        q.var_diag[j] = os;
        return f;
      };
      const double lo = fam.mean_lo ? (*fam.mean_lo)[j] : -1e300;
      const double hi = fam.mean_hi ? (*fam.mean_hi)[j] : 1e300;
      const double sd = std::sqrt(q.var_diag[j]);
      const double sj = q.var_diag[j];
      auto fm = bracket_and_minimize([&](double m) { return eval(m, sj); }, q.mean[j],
                                     std::max(sd, 1e-6), 1e-12 * std::max(1.0, std::fabs(q.mean[j])),
                                     lo, hi);
      const double base_m = eval(q.mean[j], sj);
      if (fm.f < base_m) q.mean[j] = fm.x;
      const double mj = q.mean[j];
      auto fs = bracket_and_minimize([&](double ls) { return eval(mj, std::exp(ls)); },
                                     std::log(q.var_diag[j]), 0.5, 1e-10, log_floor,
                                     kLogVarCeiling);
      const double base_s = eval(mj, q.var_diag[j]);
      if (fs.f < base_s) q.var_diag[j] = std::exp(fs.x);
      if (p.separable) terms[j] = p.term(j, q.mean[j], q.var_diag[j]);
    }
    current = total();
    sol.iterations = sweep;
    if (std::isfinite(current) && before - current < opts.tolerance) {
      sol.converged = true;
      break;
    }
  }
  sol.q = q;
  sol.objective = p.separable ? p.full(q) : current;
  if (!std::isfinite(sol.objective)) sol.converged = false;
  return sol;
}

VariationalSolution solve(const Problem& p, const GaussianMeasure& prior,
                          const MeanFieldFamily& fam, const VariationalOptions& opts) {
  fam.validate();
  if (fam.dim != prior.dim()) throw std::invalid_argument("mean-field family dimension mismatch");
  std::vector<GaussianMeasure> starts{prior};
  const Vector sd = prior.var_diag.cwiseSqrt();
  starts.push_back({prior.mean + sd, prior.var_diag});
  starts.push_back({prior.mean - sd, prior.var_diag});
  for (const auto& e : opts.extra_starts) starts.push_back(e);

  std::optional<VariationalSolution> best;
  for (const auto& s0 : starts) {
    auto sol = coordinate_search(p, s0, fam, opts);
    if (!best || sol.objective < best->objective) best = std::move(sol);
  }
  return *best;
}

Problem gaussian_problem(const GaussianMeasure& prior, double alpha, int n,
                         const Vector& sample_mean, const Vector& theta0, double noise_sd) {
  require_alpha_open(alpha);
  prior.validate();
  if (n < 1) throw std::invalid_argument("variational objective: empty sample");
  if (sample_mean.size() != prior.mean.size() || theta0.size() != prior.mean.size()) {
    throw std::invalid_argument("variational objective: dimension mismatch");
  }
  Problem p;
  p.dim = prior.dim();
  p.separable = true;
  const double scale = 1.0 / (n * (1.0 - alpha));
  const double rn_coef = n / (2.0 * noise_sd * noise_sd);
  p.term = [=](int j, double m, double s) {
    const double xb = sample_mean[j];
    const double er = rn_coef * ((xb - m) * (xb - m) + s - (xb - theta0[j]) * (xb - theta0[j]));
    return scale * (alpha * er + kl_coord(m, s, prior.mean[j], prior.var_diag[j]));
  };
  p.full = [=](const GaussianMeasure& q) {
    const double er = expected_rn_under(q, theta0, sample_mean, n, noise_sd);
    return scale * (alpha * er + kl_gaussian_measures(q, prior));
  };
  return p;
}

double expfam_expected_rn(const ExpFamily1D& f, const ModelSpec& model, const Sample& s,
                          const Vector& theta0, double mean, double var, int gh_nodes) {
  const auto& rule = gauss_hermite(gh_nodes);
  long clamped = 0;
  const double r = expect_normal(
      [&](double t) {
        double tc = t;
        if (t < f.theta_lo || t > f.theta_hi) {
          tc = std::clamp(t, f.theta_lo, f.theta_hi);
          ++clamped;
        }
        return neg_log_lik_ratio(model, scalar_param(tc), theta0, s);
      },
      mean, std::sqrt(var), rule);
  if (clamped > 0) {
    g_clamped += clamped;
    if (!g_warned.exchange(true)) {
      std::clog << "warning: Gauss-Hermite nodes outside [" << f.theta_lo << ", " << f.theta_hi
                << "] for family " << f.name << " were clamped to the domain\n";
    }
  }
  return r;
}

}  // namespace

void MeanFieldFamily::validate() const {
  if (dim < 1) throw std::invalid_argument("MeanFieldFamily: dim must be >= 1");
  if (!(var_floor > 0.0)) throw std::invalid_argument("MeanFieldFamily: var_floor must be > 0");
  if (mean_lo && mean_lo->size() != dim) throw std::invalid_argument("MeanFieldFamily: bounds");
  if (mean_hi && mean_hi->size() != dim) throw std::invalid_argument("MeanFieldFamily: bounds");
}

bool MeanFieldFamily::contains(const GaussianMeasure& q) const {
  if (q.dim() != dim) return false;
  if ((q.var_diag.array() < var_floor).any()) return false;
  if (mean_lo && (q.mean.array() < mean_lo->array()).any()) return false;
  if (mean_hi && (q.mean.array() > mean_hi->array()).any()) return false;
  return true;
}

long clamped_node_count() { return g_clamped.load(); }

double variational_objective_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                      const Vector& sample_mean, const Vector& theta0,
                                      double noise_sd, const GaussianMeasure& q) {
  return gaussian_problem(prior, alpha, n, sample_mean, theta0, noise_sd).full(q);
}

double variational_objective(const ModelSpec& model, const GaussianMeasure& prior, double alpha,
                             const Sample& s, const Vector& theta0, const GaussianMeasure& q,
                             int gh_nodes) {
  require_alpha_open(alpha);
  if (const auto* g = std::get_if<GaussianMeanModel>(&model)) {
    return variational_objective_gaussian(prior, alpha, s.n, s.mean(), theta0, g->noise_sd, q);
  }
  if (std::holds_alternative<GaussianSequenceModel>(model)) {
    return variational_objective_gaussian(prior, alpha, s.n, s.mean(), theta0, 1.0, q);
  }
  const auto& f = std::get<ExpFamily1D>(model);
  if (q.dim() != 1 || prior.dim() != 1) {
    throw std::invalid_argument("variational objective: exponential families are one-dimensional");
  }
  const double er = expfam_expected_rn(f, model, s, theta0, q.mean[0], q.var_diag[0], gh_nodes);
  return (alpha * er + kl_gaussian_measures(q, prior)) / (s.n * (1.0 - alpha));
}

VariationalSolution solve_variational_gaussian(const GaussianMeasure& prior, double alpha, int n,
                                               const Vector& sample_mean, const Vector& theta0,
                                               double noise_sd, const MeanFieldFamily& fam,
                                               const VariationalOptions& opts) {
  return solve(gaussian_problem(prior, alpha, n, sample_mean, theta0, noise_sd), prior, fam, opts);
}

VariationalSolution solve_variational(const ModelSpec& model, const GaussianMeasure& prior,
                                      double alpha, const Sample& s, const Vector& theta0,
                                      const MeanFieldFamily& fam,
                                      const VariationalOptions& opts) {
  if (const auto* g = std::get_if<GaussianMeanModel>(&model)) {
    return solve_variational_gaussian(prior, alpha, s.n, s.mean(), theta0, g->noise_sd, fam, opts);
  }
  if (std::holds_alternative<GaussianSequenceModel>(model)) {
    return solve_variational_gaussian(prior, alpha, s.n, s.mean(), theta0, 1.0, fam, opts);
  }
  require_alpha_open(alpha);
  const auto& f = std::get<ExpFamily1D>(model);
  Problem p;
  p.dim = 1;
  p.full = [&](const GaussianMeasure& q) {
    return variational_objective(model, prior, alpha, s, theta0, q, opts.gh_nodes);
  };
  MeanFieldFamily boxed = fam;
  if (!boxed.mean_lo) boxed.mean_lo = Vector::Constant(1, f.theta_lo);
  if (!boxed.mean_hi) boxed.mean_hi = Vector::Constant(1, f.theta_hi);
  return solve(p, prior, boxed, opts);
}

}  // namespace mibounds
