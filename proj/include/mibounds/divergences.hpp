#pragma once

#include "mibounds/models.hpp"

#include <string>
#include <variant>
#include <vector>

namespace mibounds {

enum class DivergenceKind { kl, renyi, hellinger_sq };
enum class DivergenceMethod { closed_form, quadrature, series };

const char* to_string(DivergenceKind k);
const char* to_string(DivergenceMethod m);

struct DivergenceValue {
  double value = 0.0;  // nats
  DivergenceKind kind = DivergenceKind::kl;
  double alpha = 1.0;  // only meaningful for renyi
  DivergenceMethod method = DivergenceMethod::closed_form;
};

// Closed forms. Rényi values are D_alpha(P_theta || P_theta0); KL values are
// KL(P_theta0 || P_theta).

/// ||mean1 - mean0||^2 / (2 v^2).
DivergenceValue kl_gaussian(const Vector& mean0, const Vector& mean1, double v);
/// alpha ||mean1 - mean0||^2 / (2 v^2).
DivergenceValue renyi_gaussian(double alpha, const Vector& mean0, const Vector& mean1, double v);

/// psi(theta) - psi(theta0) - (theta - theta0) psi'(theta0).
DivergenceValue kl_expfam(const ExpFamily1D& fam, double theta0, double theta);
/// [alpha psi(theta) + (1-alpha) psi(theta0) - psi(alpha theta + (1-alpha) theta0)] / (1-alpha).
DivergenceValue renyi_expfam(const ExpFamily1D& fam, double alpha, double theta0, double theta);

/// Dispatch on the model. For the Gaussian sequence model the noise is unit.
DivergenceValue kl_divergence(const ModelSpec& model, const Vector& theta0, const Vector& theta);
DivergenceValue renyi_divergence(const ModelSpec& model, double alpha, const Vector& theta0,
                                 const Vector& theta);

/// H^2(P, Q) = 2 - 2 int sqrt(p q) = 2 (1 - exp(-D_{1/2}(P||Q) / 2)).
/// Uses the closed-form D_{1/2} when available; `force_quadrature` integrates
/// (sqrt p - sqrt q)^2 directly (one-dimensional models only).
DivergenceValue hellinger_sq(const ModelSpec& model, const Vector& theta_p, const Vector& theta_q,
                             bool force_quadrature = false);

// Oracles: direct summation over the support (counting carriers) or adaptive
// Simpson over the real line (continuous carriers), independent of psi'.

DivergenceValue kl_oracle(const ExpFamily1D& fam, double theta0, double theta);
DivergenceValue renyi_oracle(const ExpFamily1D& fam, double alpha, double theta0, double theta);
DivergenceValue hellinger_oracle(const ExpFamily1D& fam, double theta_p, double theta_q);
/// One-dimensional Gaussian oracles by quadrature.
DivergenceValue kl_oracle_gaussian(double mean0, double mean1, double v);
DivergenceValue renyi_oracle_gaussian(double alpha, double mean0, double mean1, double v);

struct CAlphaCertificate {
  double c_alpha = 0.0;
  double kappa = 1.0;
  double alpha = 0.5;
  long pairs_checked = 0;
  double worst_ratio = 0.0;  // max KL / D_alpha over the grid
};

/// c(alpha) = 1/alpha for the Gaussian models and kappa/alpha for exponential
/// families, checked numerically on a grid x grid set of (theta, theta0) pairs
/// (the domain for exponential families, [-3, 3] along the first axis for the
/// Gaussian models). Throws std::runtime_error naming the first violating pair.
CAlphaCertificate certify_c_alpha(const ModelSpec& model, double alpha, int grid = 100);

// ---------------------------------------------------------------------------
// Local expansions around theta0 for one-dimensional smooth models.

struct FisherInfo {
  double i0 = 0.0;        // I(theta0)
  double i1_bound = 0.0;  // L >= |I'| on the neighbourhood
  double i_lo = 0.0;      // m
  double i_hi = 0.0;      // M
};

/// One-dimensional subjects with analytic Fisher information: I = psi'' for
/// exponential families in the natural parameter and 1/v^2 for N(theta, v^2).
using FisherSubject = std::variant<ExpFamily1D, GaussianMeanModel>;

/// m, M, L on [theta0 - radius, theta0 + radius] from a dense grid; L from a
/// central difference of I.
FisherInfo fisher_info(const FisherSubject& subject, double theta0, double radius);

struct SandwichRow {
  double delta = 0.0;
  double h2 = 0.0, kl = 0.0, d_half = 0.0;
  double h2_lo = 0.0, h2_hi = 0.0;
  double kl_lo = 0.0, kl_hi = 0.0;
  double dh_lo = 0.0, dh_hi = 0.0;  // dh_hi excludes the fitted quartic term
};

struct FisherCheckReport {
  FisherInfo info;
  std::vector<SandwichRow> rows;
  std::vector<std::string> violations;
  /// Smallest C >= 0 such that D_{1/2} <= M/4 D^2 + L/12 |D|^3 + C D^4 on the grid.
  double fitted_c = 0.0;
  /// Max over rows and bounds of (bound - value) / value, i.e. the loosest side.
  double max_relative_slack = 0.0;
  /// H^2 / (I(theta0) D^2 / 4) at each ratio offset, and its Richardson limit.
  std::vector<double> ratio_deltas;
  std::vector<double> ratios;
  double ratio_limit = 0.0;
  bool sandwiches_hold() const { return violations.empty(); }
};

/// Evaluates H^2, KL and D_{1/2} exactly at theta0 + delta for each offset and
/// checks the curvature sandwiches (relative tolerance 1e-12). The
/// neighbourhood used for m, M, L is the smallest interval containing all
/// offsets. `ratio_deltas` (positive, halving) feed the Richardson limit.
FisherCheckReport fisher_expansion_check(const FisherSubject& subject, double theta0,
                                         const std::vector<double>& deltas,
                                         const std::vector<double>& ratio_deltas = {0.1, 0.05,
                                                                                    0.025});

}  // namespace mibounds
