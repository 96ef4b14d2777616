#pragma once

#include "mibounds/assumptions.hpp"
#include "mibounds/bounds.hpp"
#include "mibounds/models.hpp"
#include "mibounds/posteriors.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mibounds {

enum class PosteriorRoute { closed_form, variational };

/// Monte Carlo contraction experiment. `model` is a GaussianMeanModel or a
/// GaussianSequenceModel; for the latter the truncation is reset to n at each
/// grid point and theta0 (coefficients, zero-padded) defaults to
/// smooth_sequence_theta0. The Gaussian-mean prior is N(0, prior_sd^2 I).
struct ExperimentConfig {
  ModelSpec model = GaussianMeanModel{1, 1.0};
  double prior_sd = 1.0;
  Vector theta0 = Vector::Zero(1);
  double alpha = 0.5;
  std::vector<int> n_grid{50, 100, 200, 400, 800, 1600};
  int replicates = 2000;
  std::uint64_t seed = 0;
  /// gaussian_kl (default for the mean model) or localized_opt (default for
  /// the sequence model; also accepted for the mean model).
  std::string bound_id;
  PosteriorRoute route = PosteriorRoute::closed_form;
  int jobs = 1;
  bool keep_replicates = false;
  std::string output_path;

  void validate() const;
  nlohmann::json to_json() const;
};

struct ExperimentPoint {
  int n = 0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double bound_rhs = 0.0;
  double slack = 0.0;        // bound_rhs / mc_mean
  double exact_mean = 0.0;   // analytic E_S E_rho[KL], NaN when unavailable
  std::vector<double> values;  // per replicate, only when requested
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct ExperimentResult {
  nlohmann::json config;
  nlohmann::json certificates;
  std::vector<ExperimentPoint> points;
  RateFit rate_fit;
  bool bound_dominates = true;  // mc_mean - 3 se <= bound_rhs at every n
};

/// Theta0 for the sequence model at truncation n.
Vector sequence_theta0_at(const GaussianSequenceModel& base, const Vector& coefficients, int n);

/// Exact E_S E_{pi_{n,alpha}}[KL(P_theta0 || P_theta)] for a diagonal Gaussian prior.
double exact_expected_posterior_kl(const GaussianMeasure& prior, double alpha, int n,
                                   const Vector& theta0, double noise_sd);

ExperimentResult run_contraction_experiment(const ExperimentConfig& cfg);

/// OLS of log value on log n. Needs >= 3 points, all values > 0.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// Runs body(i) for i in [0, count) on `jobs` threads. body must write only to
/// its own slot; iteration-to-thread assignment does not affect results.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------

struct MiCheckReport {
  double mi = 0.0;            // closed form
  double rhs = 0.0;           // mi / (n (1 - alpha))
  double lhs_mean = 0.0;      // E_S[E_rho D_alpha - alpha/(n(1-alpha)) E_rho r_n]
  double lhs_se = 0.0;
  double mi_mc_mean = 0.0;    // E_S KL(rho || E_S rho)
  double mi_mc_se = 0.0;
  double decomposition_lhs_mean = 0.0;  // E_S KL(rho || pi)
  double decomposition_lhs_se = 0.0;
  double decomposition_rhs = 0.0;       // I + KL(E_S rho || pi)
  bool holds = false;         // lhs_mean <= rhs + 3 se
  bool holds_strict = false;  // lhs_mean <= rhs
  nlohmann::json to_json() const;
};

/// Checks the mutual-information bound with rho = pi_{n, posterior_alpha} and
/// the divergence order alpha. posterior_alpha <= 0 means "use alpha".
MiCheckReport verify_mi_bound(const GaussianMeanModel& model, const GaussianMeasure& prior,
                              double alpha, int n, const Vector& theta0, int replicates,
                              std::uint64_t seed, double posterior_alpha = 0.0, int jobs = 1);

struct HighProbReport {
  double level = 0.0;        // 1 - delta - eta
  double quantile = 0.0;     // empirical level-quantile of E_{pi_{n,alpha}}[KL]
  double rhs = 0.0;
  double violation_frequency = 0.0;  // fraction of replicates above rhs
  int replicates = 0;
  bool low_confidence = false;
  bool holds = true;
  BoundReport bound;
  DimensionCertificate certificate;
  nlohmann::json to_json() const;
};

HighProbReport verify_highprob_bound(const GaussianMeanModel& model, const GaussianMeasure& prior,
                                     double alpha, int n, const Vector& theta0, double delta,
                                     double eta, int replicates, std::uint64_t seed, int jobs = 1);

struct MlePoint {
  int n = 0;
  double mc_mean = 0.0;  // E ||theta_hat - theta0||^2
  double mc_se = 0.0;
  double bound_rhs = 0.0;
  double slack = 0.0;    // bound_rhs / mc_mean
  double lipschitz = 0.0;
  double log_cover = 0.0;
  double m_lower = 0.0;
};

struct MleReport {
  std::vector<MlePoint> points;
  RateFit lhs_fit;
  RateFit rhs_fit;
  bool bound_holds = true;
  bool slack_increasing = true;
  nlohmann::json to_json() const;
};

/// MLE on [-M, M]^d (Gaussian mean model) or on the domain intersected with
/// [-M, M] (exponential family, via bisection), with eps = 1/n.
MleReport run_mle_experiment(const ModelSpec& model, const Vector& theta0, double half_width,
                             double alpha, const std::vector<int>& n_grid, int replicates,
                             std::uint64_t seed, int jobs = 1);

// ---------------------------------------------------------------------------
// Output

/// CSV with columns n, mc_mean, mc_se, bound_rhs, slack and a JSON sidecar
/// (schema, config, certificates, rate fit). Numbers use 17 significant digits.
void emit_results(const ExperimentResult& result, const std::string& csv_path,
                  const std::string& json_path);
std::string results_csv(const ExperimentResult& result);
nlohmann::json results_json(const ExperimentResult& result);
/// Reads the CSV written by emit_results.
std::vector<ExperimentPoint> read_results_csv(const std::string& path);
std::vector<ExperimentPoint> parse_results_csv(const std::string& text);

/// %.17g
std::string format_real(double x);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mibounds
