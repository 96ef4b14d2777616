#include "mibounds/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mibounds {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int evaluations = 0;
  int max_depth;
  double error = 0.0;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= max_depth || std::fabs(delta) <= 15.0 * tol) {
      error += std::fabs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
  if (a == b) return {};
  SimpsonState st{f, 0, max_depth};
  const double fa = st.eval(a);
  const double fb = st.eval(b);
  const double m = 0.5 * (a + b);
  const double fm = st.eval(m);
  // Seed with four sub-panels so that a smooth-looking coarse triple cannot
  // terminate the recursion before the integrand has been sampled at all.
  const double q1 = 0.5 * (a + m);
  const double q3 = 0.5 * (m + b);
  const double fq1 = st.eval(q1);
  const double fq3 = st.eval(q3);
  const double left = (m - a) / 6.0 * (fa + 4.0 * fq1 + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * fq3 + fb);
  QuadratureResult out;
  out.value = st.recurse(a, m, fa, fq1, fm, left, 0.5 * abs_tol, 1) +
              st.recurse(m, b, fm, fq3, fb, right, 0.5 * abs_tol, 1);
  out.error_estimate = st.error;
  out.evaluations = st.evaluations;
  return out;
}

QuadratureResult adaptive_simpson_panels(const std::function<double(double)>& f,
                                         std::span<const double> breaks, double abs_tol) {
  QuadratureResult total;
  if (breaks.size() < 2) return total;
  const double tol = abs_tol / static_cast<double>(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    const auto part = adaptive_simpson(f, breaks[i], breaks[i + 1], tol);
    total.value += part.value;
    total.error_estimate += part.error_estimate;
    total.evaluations += part.evaluations;
  }
  return total;
}

const GaussHermiteRule& gauss_hermite(int n_nodes) {
  if (n_nodes < 1 || n_nodes > 200) {
    throw std::invalid_argument("gauss_hermite: node count must be in [1, 200]");
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n_nodes];
  if (!slot) {
    // Jacobi matrix of the physicists' Hermite recurrence.
    Matrix jacobi = Matrix::Zero(n_nodes, n_nodes);
    for (int k = 1; k < n_nodes; ++k) {
      const double off = std::sqrt(0.5 * k);
      jacobi(k, k - 1) = off;
      jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(jacobi);
    auto rule = std::make_unique<GaussHermiteRule>();
    rule->nodes = solver.eigenvalues();
    rule->weights = std::sqrt(std::numbers::pi) *
                    solver.eigenvectors().row(0).transpose().array().square().matrix();
    slot = std::move(rule);
  }
  return *slot;
}

double expect_normal(const std::function<double(double)>& f, double mean, double sd,
                     const GaussHermiteRule& rule) {
  const double scale = std::numbers::sqrt2 * sd;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mean + scale * rule.nodes[i]);
  }
  return acc / std::sqrt(std::numbers::pi);
}

SeriesResult sum_series(const std::function<double(long)>& term, long first, long last,
                        double tail_tol, long max_terms) {
  SeriesResult out;
  double prev_abs = -1.0;
  int quiet = 0;
  for (long k = first; k <= last && out.terms < max_terms; ++k) {
    const double t = term(k);
    out.value += t;
    ++out.terms;
    const double a = std::fabs(t);
    if (prev_abs > 0.0 && a < prev_abs) {
      const double ratio = a / prev_abs;
      const double tail = ratio < 1.0 ? a * ratio / (1.0 - ratio) : INFINITY;
      quiet = (tail < tail_tol && a < tail_tol) ? quiet + 1 : 0;
    } else if (a == 0.0 && prev_abs == 0.0) {
      ++quiet;
    } else {
      quiet = 0;
    }
    if (quiet >= 5) {
      out.converged = true;
      return out;
    }
    prev_abs = a;
  }
  out.converged = (last != std::numeric_limits<long>::max() && out.terms == last - first + 1);
  return out;
}

Minimum1D golden_section(const std::function<double(double)>& f, double lo, double hi,
                         double x_tol, int max_evaluations) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  while (std::fabs(b - a) > x_tol && evals < max_evaluations) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? Minimum1D{c, fc, evals} : Minimum1D{d, fd, evals};
}

Minimum1D bracket_and_minimize(const std::function<double(double)>& f, double x0, double step,
                               double x_tol, double lo_limit, double hi_limit) {
  constexpr double grow = 1.618033988749895;
  const double f0 = f(x0);
  int evals = 1;
  double dir = step;
  double x1 = std::clamp(x0 + dir, lo_limit, hi_limit);
  double f1 = f(x1);
  ++evals;
  if (f1 > f0) {
    dir = -step;
    x1 = std::clamp(x0 + dir, lo_limit, hi_limit);
    f1 = f(x1);
    ++evals;
    if (f1 > f0) {
      const double lo = std::clamp(std::min(x0 - step, x0 + step), lo_limit, hi_limit);
      const double hi = std::clamp(std::max(x0 - step, x0 + step), lo_limit, hi_limit);
      auto m = golden_section(f, lo, hi, x_tol);
      m.evaluations += evals;
      if (f0 < m.f) return {x0, f0, m.evaluations};
      return m;
    }
  }
  // Walk downhill until the function turns up again.
  double a = x0;
  double b = x1;
  double fb = f1;
  double width = dir;
  for (int it = 0; it < 200; ++it) {
    width *= grow;
    const double c = std::clamp(b + width, lo_limit, hi_limit);
    const double fc = f(c);
    ++evals;
    if (fc >= fb || c == b) {
      auto m = golden_section(f, std::min(a, c), std::max(a, c), x_tol);
      m.evaluations += evals;
      if (fb < m.f) return {b, fb, m.evaluations};
      return m;
    }
    a = b;
    b = c;
    fb = fc;
  }
  return {b, fb, evals};
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  out.count = values.size();
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - out.mean;
      sq[i] = d * d;
    }
    out.sd = std::sqrt(pairwise_sum(sq) / (n - 1.0));
    out.se = out.sd / std::sqrt(n);
  }
  return out;
}

double sample_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw std::invalid_argument("sample_quantile: empty input");
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("sample_quantile: level");
  std::sort(values.begin(), values.end());
  const double h = level * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo : std::exp(a + (b - a) * i / static_cast<double>(count - 1));
  }
  if (count > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

std::vector<double> lin_space(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace mibounds
