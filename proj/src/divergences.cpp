#include "mibounds/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mibounds {

namespace {

constexpr double kClampTol = 1e-12;

double clamp_nonneg(double v) { return (v < 0.0 && v > -kClampTol) ? 0.0 : v; }

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("Renyi order alpha must lie in (0, 1)");
  }
}

void require_same_dim(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("parameter dimension mismatch");
}

DivergenceValue make(double value, DivergenceKind kind, DivergenceMethod method,
                     double alpha = 1.0) {
  return {clamp_nonneg(value), kind, alpha, method};
}

// Integration window for a pair of one-dimensional continuous densities whose
// means and standard deviations are known.
std::vector<double> window(double m0, double s0, double m1, double s1) {
  const double lo_m = std::min(m0, m1);
  const double hi_m = std::max(m0, m1);
  const double s = std::max(s0, s1);
  std::vector<double> b{lo_m - 16.0 * s, lo_m - 3.0 * s, lo_m,
                        0.5 * (lo_m + hi_m), hi_m, hi_m + 3.0 * s, hi_m + 16.0 * s};
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

// Sum or integrate g(x) against the carrier of a family.
template <class G>
std::pair<double, DivergenceMethod> carrier_integral(const ExpFamily1D& fam, double th_a,
                                                     double th_b, G g) {
  if (fam.carrier == Carrier::counting) {
    const long last = fam.support_max >= 0 ? fam.support_max : std::numeric_limits<long>::max();
    const auto r = sum_series([&](long k) { return g(static_cast<double>(k)); }, 0, last, 1e-14);
    if (!r.converged) throw std::runtime_error("series oracle did not converge for " + fam.name);
    return {r.value, DivergenceMethod::series};
  }
  const double m0 = fam.psi1(th_a), s0 = std::sqrt(fam.psi2(th_a));
  const double m1 = fam.psi1(th_b), s1 = std::sqrt(fam.psi2(th_b));
  const auto breaks = window(m0, s0, m1, s1);
  const auto q = adaptive_simpson_panels(g, breaks, 1e-12);
  return {q.value, DivergenceMethod::quadrature};
}

double gaussian_log_pdf(double x, double mean, double v) {
  const double z = (x - mean) / v;
  return -0.5 * z * z - std::log(v) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

const char* to_string(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::kl: return "KL";
    case DivergenceKind::renyi: return "Renyi";
    case DivergenceKind::hellinger_sq: return "HellingerSq";
  }
  return "?";
}

const char* to_string(DivergenceMethod m) {
  switch (m) {
    case DivergenceMethod::closed_form: return "closed_form";
    case DivergenceMethod::quadrature: return "quadrature";
    case DivergenceMethod::series: return "series";
  }
  return "?";
}

DivergenceValue kl_gaussian(const Vector& mean0, const Vector& mean1, double v) {
  require_same_dim(mean0, mean1);
  if (!(v > 0.0)) throw std::invalid_argument("kl_gaussian: v must be > 0");
  return make((mean1 - mean0).squaredNorm() / (2.0 * v * v), DivergenceKind::kl,
              DivergenceMethod::closed_form);
}

DivergenceValue renyi_gaussian(double alpha, const Vector& mean0, const Vector& mean1, double v) {
  require_alpha(alpha);
  require_same_dim(mean0, mean1);
  if (!(v > 0.0)) throw std::invalid_argument("renyi_gaussian: v must be > 0");
  return make(alpha * (mean1 - mean0).squaredNorm() / (2.0 * v * v), DivergenceKind::renyi,
              DivergenceMethod::closed_form, alpha);
}

DivergenceValue kl_expfam(const ExpFamily1D& fam, double theta0, double theta) {
  fam.require_domain(theta0, "kl_expfam theta0");
  fam.require_domain(theta, "kl_expfam theta");
  const double v = fam.psi(theta) - fam.psi(theta0) - (theta - theta0) * fam.psi1(theta0);
  return make(v, DivergenceKind::kl, DivergenceMethod::closed_form);
}

DivergenceValue renyi_expfam(const ExpFamily1D& fam, double alpha, double theta0, double theta) {
  require_alpha(alpha);
  fam.require_domain(theta0, "renyi_expfam theta0");
  fam.require_domain(theta, "renyi_expfam theta");
  const double mix = alpha * theta + (1.0 - alpha) * theta0;
  fam.require_domain(mix, "renyi_expfam convex combination");
  const double v =
      (alpha * fam.psi(theta) + (1.0 - alpha) * fam.psi(theta0) - fam.psi(mix)) / (1.0 - alpha);
  return make(v, DivergenceKind::renyi, DivergenceMethod::closed_form, alpha);
}

DivergenceValue kl_divergence(const ModelSpec& model, const Vector& theta0, const Vector& theta) {
  if (const auto* g = std::get_if<GaussianMeanModel>(&model)) {
    return kl_gaussian(theta0, theta, g->noise_sd);
  }
  if (std::holds_alternative<GaussianSequenceModel>(model)) {
    return kl_gaussian(theta0, theta, 1.0);
  }
  const auto& f = std::get<ExpFamily1D>(model);
  return kl_expfam(f, theta0[0], theta[0]);
}

DivergenceValue renyi_divergence(const ModelSpec& model, double alpha, const Vector& theta0,
                                 const Vector& theta) {
  if (const auto* g = std::get_if<GaussianMeanModel>(&model)) {
    return renyi_gaussian(alpha, theta0, theta, g->noise_sd);
  }
  if (std::holds_alternative<GaussianSequenceModel>(model)) {
    return renyi_gaussian(alpha, theta0, theta, 1.0);
  }
  const auto& f = std::get<ExpFamily1D>(model);
  return renyi_expfam(f, alpha, theta0[0], theta[0]);
}

DivergenceValue hellinger_sq(const ModelSpec& model, const Vector& theta_p, const Vector& theta_q,
                             bool force_quadrature) {
  require_same_dim(theta_p, theta_q);
  if (!force_quadrature) {
    const double d_half = renyi_divergence(model, 0.5, theta_q, theta_p).value;
    return make(2.0 * (1.0 - std::exp(-0.5 * d_half)), DivergenceKind::hellinger_sq,
                DivergenceMethod::closed_form, 0.5);
  }
  if (const auto* f = std::get_if<ExpFamily1D>(&model)) {
    return hellinger_oracle(*f, theta_p[0], theta_q[0]);
  }
  const double v = std::holds_alternative<GaussianMeanModel>(model)
                       ? std::get<GaussianMeanModel>(model).noise_sd
                       : 1.0;
  if (theta_p.size() != 1) {
    throw std::invalid_argument("hellinger_sq: quadrature is only available in one dimension");
  }
  const double a = theta_p[0], b = theta_q[0];
  const auto breaks = window(a, v, b, v);
  const auto q = adaptive_simpson_panels(
      [&](double x) {
        const double d = std::exp(0.5 * gaussian_log_pdf(x, a, v)) -
                         std::exp(0.5 * gaussian_log_pdf(x, b, v));
        return d * d;
      },
      breaks, 1e-12);
  return make(q.value, DivergenceKind::hellinger_sq, DivergenceMethod::quadrature, 0.5);
}

DivergenceValue kl_oracle(const ExpFamily1D& fam, double theta0, double theta) {
  const auto [v, method] = carrier_integral(fam, theta0, theta, [&](double x) {
    const double l0 = fam.log_density(theta0, x);
    const double l1 = fam.log_density(theta, x);
    if (!std::isfinite(l0)) return 0.0;
    return std::exp(l0) * (l0 - l1);
  });
  return make(v, DivergenceKind::kl, method);
}

DivergenceValue renyi_oracle(const ExpFamily1D& fam, double alpha, double theta0, double theta) {
  require_alpha(alpha);
  const auto [s, method] = carrier_integral(fam, theta0, theta, [&](double x) {
    return std::exp(alpha * fam.log_density(theta, x) + (1.0 - alpha) * fam.log_density(theta0, x));
  });
  return make(std::log(s) / (alpha - 1.0), DivergenceKind::renyi, method, alpha);
}

DivergenceValue hellinger_oracle(const ExpFamily1D& fam, double theta_p, double theta_q) {
  const auto [v, method] = carrier_integral(fam, theta_p, theta_q, [&](double x) {
    const double d = std::exp(0.5 * fam.log_density(theta_p, x)) -
                     std::exp(0.5 * fam.log_density(theta_q, x));
    return d * d;
  });
  return make(v, DivergenceKind::hellinger_sq, method, 0.5);
}

DivergenceValue kl_oracle_gaussian(double mean0, double mean1, double v) {
  const auto breaks = window(mean0, v, mean1, v);
  const auto q = adaptive_simpson_panels(
      [&](double x) {
        const double l0 = gaussian_log_pdf(x, mean0, v);
        return std::exp(l0) * (l0 - gaussian_log_pdf(x, mean1, v));
      },
      breaks, 1e-12);
  return make(q.value, DivergenceKind::kl, DivergenceMethod::quadrature);
}

DivergenceValue renyi_oracle_gaussian(double alpha, double mean0, double mean1, double v) {
  require_alpha(alpha);
  const auto breaks = window(mean0, v, mean1, v);
  const auto q = adaptive_simpson_panels(
      [&](double x) {
        return std::exp(alpha * gaussian_log_pdf(x, mean1, v) +
                        (1.0 - alpha) * gaussian_log_pdf(x, mean0, v));
      },
      breaks, 1e-12);
  return make(std::log(q.value) / (alpha - 1.0), DivergenceKind::renyi,
              DivergenceMethod::quadrature, alpha);
}

CAlphaCertificate certify_c_alpha(const ModelSpec& model, double alpha, int grid) {
  require_alpha(alpha);
  if (grid < 2) throw std::invalid_argument("certify_c_alpha: grid must be >= 2");
  CAlphaCertificate cert;
  cert.alpha = alpha;
  std::vector<double> pts;
  Vector base;
  if (const auto* f = std::get_if<ExpFamily1D>(&model)) {
    cert.kappa = f->kappa();
    pts = lin_space(f->theta_lo, f->theta_hi, grid);
    base = Vector::Zero(1);
  } else {
    cert.kappa = 1.0;
    pts = lin_space(-3.0, 3.0, grid);
    base = Vector::Zero(parameter_dim(model));
  }
  cert.c_alpha = cert.kappa / alpha;

  for (double t0 : pts) {
    for (double t : pts) {
      if (t == t0) continue;
      Vector a = base, b = base;
      a[0] = t0;
      b[0] = t;
      const double kl = kl_divergence(model, a, b).value;
      const double dr = renyi_divergence(model, alpha, a, b).value;
      ++cert.pairs_checked;
      if (dr > 0.0) cert.worst_ratio = std::max(cert.worst_ratio, kl / dr);
      if (kl > cert.c_alpha * dr * (1.0 + 1e-12) + 1e-15) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "c(alpha) check failed at theta=" << t << ", theta0=" << t0 << ": KL=" << kl
            << " > c(alpha)*D_alpha=" << cert.c_alpha * dr;
        throw std::runtime_error(msg.str());
      }
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------

namespace {

double fisher_at(const FisherSubject& s, double theta) {
  if (const auto* f = std::get_if<ExpFamily1D>(&s)) return f->psi2(theta);
  const auto& g = std::get<GaussianMeanModel>(s);
  return 1.0 / g.noise_var();
}

struct LocalDivergences {
  double h2, kl, d_half;
};

LocalDivergences local_divergences(const FisherSubject& s, double theta0, double theta) {
  double kl = 0.0, d_half = 0.0;
  if (const auto* f = std::get_if<ExpFamily1D>(&s)) {
    kl = kl_expfam(*f, theta0, theta).value;
    d_half = renyi_expfam(*f, 0.5, theta0, theta).value;
  } else {
    const double v = std::get<GaussianMeanModel>(s).noise_sd;
    kl = kl_gaussian(scalar_param(theta0), scalar_param(theta), v).value;
    d_half = renyi_gaussian(0.5, scalar_param(theta0), scalar_param(theta), v).value;
  }
  return {clamp_nonneg(2.0 * (1.0 - std::exp(-0.5 * d_half))), kl, d_half};
}

// Polynomial extrapolation to h = 0 through (h_i, y_i) by Neville's scheme.
double extrapolate_to_zero(std::vector<double> h, std::vector<double> y) {
  const std::size_t n = y.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      y[i] = (h[i - level] * y[i] - h[i] * y[i - 1]) / (h[i - level] - h[i]);
      if (i == level) break;
    }
  }
  return y.empty() ? 0.0 : y[n - 1];
}

}  // namespace

FisherInfo fisher_info(const FisherSubject& subject, double theta0, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("fisher_info: radius must be >= 0");
  if (const auto* f = std::get_if<ExpFamily1D>(&subject)) {
    f->require_domain(theta0 - radius, "fisher neighbourhood");
    f->require_domain(theta0 + radius, "fisher neighbourhood");
  }
  FisherInfo info;
  info.i0 = fisher_at(subject, theta0);
  info.i_lo = info.i0;
  info.i_hi = info.i0;
  const auto grid = lin_space(theta0 - radius, theta0 + radius, 2001);
  for (double t : grid) {
    const double i = fisher_at(subject, t);
    info.i_lo = std::min(info.i_lo, i);
    info.i_hi = std::max(info.i_hi, i);
    const double h = 1e-4 * std::max(1.0, std::fabs(t));
    const double d = (fisher_at(subject, t + h) - fisher_at(subject, t - h)) / (2.0 * h);
    info.i1_bound = std::max(info.i1_bound, std::fabs(d));
  }
  return info;
}

FisherCheckReport fisher_expansion_check(const FisherSubject& subject, double theta0,
                                         const std::vector<double>& deltas,
                                         const std::vector<double>& ratio_deltas) {
  FisherCheckReport rep;
  double radius = 0.0;
  for (double d : deltas) radius = std::max(radius, std::fabs(d));
  for (double d : ratio_deltas) radius = std::max(radius, std::fabs(d));
  rep.info = fisher_info(subject, theta0, radius);
  const double m = rep.info.i_lo, M = rep.info.i_hi, L = rep.info.i1_bound;

  auto check = [&](double lo, double value, double hi, const char* what, double delta) {
    const double tol = 1e-12;
    auto flag = [&](const char* side, double bound) {
      std::ostringstream msg;
      msg.precision(12);
      msg << what << " " << side << " bound fails at delta=" << delta << ": value=" << value
          << ", bound=" << bound;
      rep.violations.push_back(msg.str());
    };
    if (lo > value * (1.0 + tol)) flag("lower", lo);
    if (std::isfinite(hi) && value > hi * (1.0 + tol)) flag("upper", hi);
    if (value > 0.0) {
      rep.max_relative_slack = std::max(rep.max_relative_slack, (value - lo) / value);
      if (std::isfinite(hi)) {
        rep.max_relative_slack = std::max(rep.max_relative_slack, (hi - value) / value);
      }
    }
  };

  for (double delta : deltas) {
    const auto dv = local_divergences(subject, theta0, theta0 + delta);
    SandwichRow row;
    row.delta = delta;
    row.h2 = dv.h2;
    row.kl = dv.kl;
    row.d_half = dv.d_half;
    const double d2 = delta * delta, d3 = std::fabs(delta) * d2;
    row.h2_lo = m / 4.0 * d2;
    row.h2_hi = M / 4.0 * d2 + L / 12.0 * d3;
    row.kl_lo = m / 2.0 * d2;
    row.kl_hi = M / 2.0 * d2 + L / 6.0 * d3;
    row.dh_lo = m / 4.0 * d2;
    row.dh_hi = M / 4.0 * d2 + L / 12.0 * d3;
    if (delta != 0.0) {
      rep.fitted_c = std::max(rep.fitted_c, (row.d_half - row.dh_hi) / (d2 * d2));
    }
    rep.rows.push_back(row);
  }
  for (const auto& row : rep.rows) {
    if (row.delta == 0.0) continue;
    const double d4 = row.delta * row.delta * row.delta * row.delta;
    check(row.h2_lo, row.h2, row.h2_hi, "H^2", row.delta);
    check(row.kl_lo, row.kl, row.kl_hi, "KL", row.delta);
    check(row.dh_lo, row.d_half, row.dh_hi + rep.fitted_c * d4, "D_1/2", row.delta);
  }

  for (double h : ratio_deltas) {
    if (!(h != 0.0)) throw std::invalid_argument("fisher_expansion_check: zero ratio offset");
    const auto dv = local_divergences(subject, theta0, theta0 + h);
    rep.ratio_deltas.push_back(h);
    rep.ratios.push_back(dv.h2 / (rep.info.i0 * h * h / 4.0));
  }
  rep.ratio_limit = extrapolate_to_zero(rep.ratio_deltas, rep.ratios);
  return rep;
}

}  // namespace mibounds
