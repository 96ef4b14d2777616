#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mibounds {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Simpson on [a, b] with absolute tolerance `abs_tol`.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-10, int max_depth = 48);

/// Adaptive Simpson over consecutive panels [breaks[i], breaks[i+1]], splitting
/// the tolerance evenly. Useful when the integrand has a narrow peak at a known
/// location that a single panel could step over.
QuadratureResult adaptive_simpson_panels(const std::function<double(double)>& f,
                                         std::span<const double> breaks, double abs_tol = 1e-10);

/// Gauss-Hermite rule for the weight exp(-x^2), computed by Golub-Welsch.
struct GaussHermiteRule {
  Vector nodes;
  Vector weights;
};

const GaussHermiteRule& gauss_hermite(int n_nodes);

/// E[f(Z)] for Z ~ N(mean, sd^2) with the given Gauss-Hermite rule.
double expect_normal(const std::function<double(double)>& f, double mean, double sd,
                     const GaussHermiteRule& rule);

/// Sum of term(k) for k = first, first+1, ... until the geometric tail estimate
/// drops below `tail_tol` (or `last` is reached, when finite support is known).
struct SeriesResult {
  double value = 0.0;
  long terms = 0;
  bool converged = false;
};

SeriesResult sum_series(const std::function<double(long)>& term, long first, long last,
                        double tail_tol = 1e-12, long max_terms = 1'000'000);

// ---------------------------------------------------------------------------
// One-dimensional minimization

struct Minimum1D {
  double x = 0.0;
  double f = 0.0;
  int evaluations = 0;
};

/// Golden-section search on a bracket [lo, hi] to absolute x tolerance `x_tol`.
Minimum1D golden_section(const std::function<double(double)>& f, double lo, double hi,
                         double x_tol = 1e-10, int max_evaluations = 400);

/// Expands outward from x0 with step `step` until a bracket around a local
/// minimum is found, then refines it by golden section.
Minimum1D bracket_and_minimize(const std::function<double(double)>& f, double x0, double step,
                               double x_tol = 1e-10, double lo_limit = -1e300,
                               double hi_limit = 1e300);

// ---------------------------------------------------------------------------
// Reductions

/// Pairwise (cascade) summation; the result depends only on the values and
/// their order, never on how the caller scheduled their computation.
double pairwise_sum(std::span<const double> values);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

MeanSe mean_and_se(std::span<const double> values);

/// Linear-interpolation sample quantile (the common "type 7" definition).
double sample_quantile(std::vector<double> values, double level);

/// Standard normal CDF.
double normal_cdf(double x);

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int count);
std::vector<double> lin_space(double lo, double hi, int count);

}  // namespace mibounds
