#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <string>

namespace mibounds {

/// Right-hand side of one inequality plus everything it was computed from.
/// Evaluators never throw on bad ingredients; they return valid = false.
struct BoundReport {
  double rhs = 0.0;
  std::map<std::string, double> ingredients;
  std::string formula_id;
  bool valid = false;
  std::string note;  // why the report is invalid, if it is

  nlohmann::json to_json() const;
};

/// Stable formula identifiers.
namespace formula {
inline constexpr const char* mi = "mi";
inline constexpr const char* localized_general = "localized_general";
inline constexpr const char* localized_opt = "localized_opt";
inline constexpr const char* gaussian_kl = "gaussian_kl";
inline constexpr const char* gaussian_l2 = "gaussian_l2";
inline constexpr const char* highprob = "highprob";
inline constexpr const char* pacbayes_expectation = "pacbayes_expectation";
inline constexpr const char* pacbayes_probability = "pacbayes_probability";
inline constexpr const char* localized_expectation = "localized_expectation";
inline constexpr const char* localized_probability = "localized_probability";
inline constexpr const char* mle = "mle";
}  // namespace formula

/// mi / (n (1 - alpha)).
BoundReport bound_mi(double mi, double n, double alpha);
/// c (alpha n - beta) / (n (1 - alpha) - beta c) * d_pi / beta^kappa, for 0 < beta < n (1-alpha)/c.
BoundReport bound_localized_general(double c_alpha, double d_pi, double kappa_pi, double alpha,
                                    double beta, double n);
/// alpha (2c/(1-alpha))^{1+kappa} d_pi / n^kappa  (beta = n (1-alpha) / (2c)).
BoundReport bound_localized_opt(double c_alpha, double d_pi, double kappa_pi, double alpha,
                                double n);
/// Gaussian mean model, KL scale: (2d + ||theta0||^2/(2 sigma^2)) / (alpha (1-alpha)^2 n).
BoundReport bound_gaussian_kl(double d, double theta0_norm_sq, double sigma_sq, double alpha,
                              double n);
/// Gaussian mean model, squared-error scale: v^2 (4d + ||theta0||^2/sigma^2) / (alpha (1-alpha)^2 n).
BoundReport bound_gaussian_l2(double d, double theta0_norm_sq, double sigma_sq, double v_sq,
                              double alpha, double n);
/// alpha (2c/(1+alpha))^{1+kappa} (d_pi + d_pi') / n^kappa + 2c (1/eta + log(1/delta)) / (n (1-alpha)).
BoundReport bound_highprob(double c_alpha, double d_pi, double d_pi_prime, double kappa_pi,
                           double alpha, double n, double delta, double eta);
/// alpha E_rho[r_n] / (n (1-alpha)) + KL(rho || pi) / (n (1-alpha)).
BoundReport bound_pacbayes_expectation(double alpha, double n, double exp_rn, double kl_rho_pi);
/// Same with KL(rho || pi) + log(1/delta) in the second numerator.
BoundReport bound_pacbayes_probability(double alpha, double n, double exp_rn, double kl_rho_pi,
                                       double delta);
/// c n / (n (1-alpha) - beta c) [(alpha - beta/n) E_rho KL + KL(rho || pi_{-beta}) / n].
BoundReport bound_localized_expectation(double c_alpha, double alpha, double beta, double n,
                                        double exp_kl, double kl_rho_local);
/// c n / (n (1-alpha) - beta c) [(alpha - beta/n) E_rho KL + alpha sqrt(E_rho V / (n eta))
///   + (KL(rho || pi_{-beta}) + log(1/delta)) / n].
BoundReport bound_localized_probability(double c_alpha, double alpha, double beta, double n,
                                        double exp_kl, double exp_v, double kl_rho_local,
                                        double delta, double eta);
/// (1/n) [(2 alpha L + 2 log N) / (m (1-alpha)) + 1/n].
BoundReport bound_mle(double m_lower, double lipschitz, double log_cover, double alpha, double n);

struct CoveringNumber {
  double count = 0.0;  // may be +inf when it overflows a double
  double log_count = 0.0;
  long per_axis = 0;
};

/// Grid upper bound ceil(M sqrt(d) / eps)^d for [-M, M]^d with Euclidean eps-balls.
CoveringNumber covering_number_box(double half_width, int dim, double eps);

/// Resolves a formula name (canonical id or accepted alias) to its canonical id;
/// returns an empty string for unknown names.
std::string canonical_formula_id(const std::string& name);

}  // namespace mibounds
