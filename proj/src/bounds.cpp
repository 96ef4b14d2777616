#include "mibounds/bounds.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

namespace mibounds {

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["formula_id"] = formula_id;
  j["rhs"] = std::isfinite(rhs) ? nlohmann::json(rhs) : nlohmann::json(nullptr);
  j["valid"] = valid;
  j["ingredients"] = ingredients;
  if (!note.empty()) j["note"] = note;
  return j;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

BoundReport start(const char* id, std::map<std::string, double> ingredients) {
  BoundReport r;
  r.formula_id = id;
  r.ingredients = std::move(ingredients);
  r.rhs = kNaN;
  return r;
}

BoundReport& invalid(BoundReport& r, const char* why) {
  r.valid = false;
  r.rhs = kNaN;
  r.note = why;
  return r;
}

BoundReport& finish(BoundReport& r, double rhs) {
  r.rhs = rhs;
  r.valid = std::isfinite(rhs) && rhs >= 0.0;
  if (!r.valid) r.note = "right-hand side is not a finite non-negative number";
  return r;
}

bool alpha_ok(double a) { return a > 0.0 && a < 1.0; }
bool prob_ok(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

BoundReport bound_mi(double mi, double n, double alpha) {
  auto r = start(formula::mi, {{"mi", mi}, {"n", n}, {"alpha", alpha}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(mi >= 0.0) || !(n > 0.0)) return invalid(r, "need mi >= 0 and n > 0");
  return finish(r, mi / (n * (1.0 - alpha)));
}

BoundReport bound_localized_general(double c, double d_pi, double kappa, double alpha, double beta,
                                    double n) {
  auto r = start(formula::localized_general, {{"c_alpha", c},
                                              {"d_pi", d_pi},
                                              {"kappa_pi", kappa},
                                              {"alpha", alpha},
                                              {"beta", beta},
                                              {"n", n}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(c > 0.0 && d_pi >= 0.0 && n > 0.0)) return invalid(r, "need c > 0, d_pi >= 0, n > 0");
  if (!(beta > 0.0)) return invalid(r, "beta must be > 0");
  if (!(beta < n * (1.0 - alpha) / c)) return invalid(r, "beta must be < n (1 - alpha) / c");
  const double rhs =
      c * (alpha * n - beta) / (n * (1.0 - alpha) - beta * c) * d_pi / std::pow(beta, kappa);
  return finish(r, rhs);
}

BoundReport bound_localized_opt(double c, double d_pi, double kappa, double alpha, double n) {
  auto r = start(formula::localized_opt,
                 {{"c_alpha", c}, {"d_pi", d_pi}, {"kappa_pi", kappa}, {"alpha", alpha}, {"n", n}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(c > 0.0 && d_pi >= 0.0 && n > 0.0)) return invalid(r, "need c > 0, d_pi >= 0, n > 0");
  r.ingredients["beta"] = n * (1.0 - alpha) / (2.0 * c);
  return finish(r, alpha * std::pow(2.0 * c / (1.0 - alpha), 1.0 + kappa) * d_pi /
                       std::pow(n, kappa));
}

BoundReport bound_gaussian_kl(double d, double theta0_norm_sq, double sigma_sq, double alpha,
                              double n) {
  auto r = start(formula::gaussian_kl, {{"d", d},
                                        {"theta0_norm_sq", theta0_norm_sq},
                                        {"sigma_sq", sigma_sq},
                                        {"alpha", alpha},
                                        {"n", n}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(d > 0.0 && sigma_sq > 0.0 && n > 0.0 && theta0_norm_sq >= 0.0)) {
    return invalid(r, "need d, sigma^2, n > 0");
  }
  r.ingredients["c_alpha"] = 1.0 / alpha;
  r.ingredients["kappa_pi"] = 1.0;
  r.ingredients["d_pi"] = d / 2.0 + theta0_norm_sq / (8.0 * sigma_sq);
  return finish(r, (2.0 * d + theta0_norm_sq / (2.0 * sigma_sq)) /
                       (alpha * (1.0 - alpha) * (1.0 - alpha) * n));
}

BoundReport bound_gaussian_l2(double d, double theta0_norm_sq, double sigma_sq, double v_sq,
                              double alpha, double n) {
  auto r = start(formula::gaussian_l2, {{"d", d},
                                        {"theta0_norm_sq", theta0_norm_sq},
                                        {"sigma_sq", sigma_sq},
                                        {"v_sq", v_sq},
                                        {"alpha", alpha},
                                        {"n", n}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(d > 0.0 && sigma_sq > 0.0 && v_sq > 0.0 && n > 0.0 && theta0_norm_sq >= 0.0)) {
    return invalid(r, "need d, sigma^2, v^2, n > 0");
  }
  return finish(r, v_sq * (4.0 * d + theta0_norm_sq / sigma_sq) /
                       (alpha * (1.0 - alpha) * (1.0 - alpha) * n));
}

BoundReport bound_highprob(double c, double d_pi, double d_pi_prime, double kappa, double alpha,
                           double n, double delta, double eta) {
  auto r = start(formula::highprob, {{"c_alpha", c},
                                     {"d_pi", d_pi},
                                     {"d_pi_prime", d_pi_prime},
                                     {"kappa_pi", kappa},
                                     {"alpha", alpha},
                                     {"n", n},
                                     {"delta", delta},
                                     {"eta", eta}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!prob_ok(delta) || !prob_ok(eta)) return invalid(r, "delta and eta must lie in (0, 1)");
  if (!(c > 0.0 && d_pi >= 0.0 && d_pi_prime >= 0.0 && n > 0.0)) {
    return invalid(r, "need c > 0, d_pi, d_pi' >= 0, n > 0");
  }
  const double head =
      alpha * std::pow(2.0 * c / (1.0 + alpha), 1.0 + kappa) * (d_pi + d_pi_prime) /
      std::pow(n, kappa);
  const double tail = 2.0 * c * (1.0 / eta + std::log(1.0 / delta)) / (n * (1.0 - alpha));
  r.ingredients["contraction_term"] = head;
  r.ingredients["deviation_term"] = tail;
  return finish(r, head + tail);
}

BoundReport bound_pacbayes_expectation(double alpha, double n, double exp_rn, double kl_rho_pi) {
  auto r = start(formula::pacbayes_expectation,
                 {{"alpha", alpha}, {"n", n}, {"exp_rn", exp_rn}, {"kl_rho_pi", kl_rho_pi}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(n > 0.0 && kl_rho_pi >= 0.0)) return invalid(r, "need n > 0 and KL >= 0");
  const double s = n * (1.0 - alpha);
  return finish(r, alpha * exp_rn / s + kl_rho_pi / s);
}

BoundReport bound_pacbayes_probability(double alpha, double n, double exp_rn, double kl_rho_pi,
                                       double delta) {
  auto r = start(formula::pacbayes_probability, {{"alpha", alpha},
                                                 {"n", n},
                                                 {"exp_rn", exp_rn},
                                                 {"kl_rho_pi", kl_rho_pi},
                                                 {"delta", delta}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!prob_ok(delta)) return invalid(r, "delta must lie in (0, 1)");
  if (!(n > 0.0 && kl_rho_pi >= 0.0)) return invalid(r, "need n > 0 and KL >= 0");
  const double s = n * (1.0 - alpha);
  return finish(r, alpha * exp_rn / s + (kl_rho_pi + std::log(1.0 / delta)) / s);
}

BoundReport bound_localized_expectation(double c, double alpha, double beta, double n,
                                        double exp_kl, double kl_rho_local) {
  auto r = start(formula::localized_expectation, {{"c_alpha", c},
                                                  {"alpha", alpha},
                                                  {"beta", beta},
                                                  {"n", n},
                                                  {"exp_kl", exp_kl},
                                                  {"kl_rho_local", kl_rho_local}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(c > 0.0 && n > 0.0 && beta >= 0.0)) return invalid(r, "need c, n > 0, beta >= 0");
  if (!(beta < n * (1.0 - alpha) / c)) return invalid(r, "beta must be < n (1 - alpha) / c");
  const double pre = c * n / (n * (1.0 - alpha) - beta * c);
  return finish(r, pre * ((alpha - beta / n) * exp_kl + kl_rho_local / n));
}

BoundReport bound_localized_probability(double c, double alpha, double beta, double n,
                                        double exp_kl, double exp_v, double kl_rho_local,
                                        double delta, double eta) {
  auto r = start(formula::localized_probability, {{"c_alpha", c},
                                                  {"alpha", alpha},
                                                  {"beta", beta},
                                                  {"n", n},
                                                  {"exp_kl", exp_kl},
                                                  {"exp_v", exp_v},
                                                  {"kl_rho_local", kl_rho_local},
                                                  {"delta", delta},
                                                  {"eta", eta}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!prob_ok(delta) || !prob_ok(eta)) return invalid(r, "delta and eta must lie in (0, 1)");
  if (!(c > 0.0 && n > 0.0 && beta >= 0.0 && exp_v >= 0.0)) {
    return invalid(r, "need c, n > 0, beta, E V >= 0");
  }
  if (!(beta < n * (1.0 - alpha) / c)) return invalid(r, "beta must be < n (1 - alpha) / c");
  const double pre = c * n / (n * (1.0 - alpha) - beta * c);
  const double inner = (alpha - beta / n) * exp_kl + alpha * std::sqrt(exp_v / (n * eta)) +
                       (kl_rho_local + std::log(1.0 / delta)) / n;
  return finish(r, pre * inner);
}

BoundReport bound_mle(double m_lower, double lipschitz, double log_cover, double alpha, double n) {
  auto r = start(formula::mle, {{"m_lower", m_lower},
                                {"lipschitz", lipschitz},
                                {"log_cover", log_cover},
                                {"alpha", alpha},
                                {"n", n}});
  if (!alpha_ok(alpha)) return invalid(r, "alpha must lie in (0, 1)");
  if (!(m_lower > 0.0)) return invalid(r, "m must be > 0");
  if (!(n > 0.0 && lipschitz >= 0.0 && log_cover >= 0.0)) {
    return invalid(r, "need n > 0, L >= 0, log N >= 0");
  }
  return finish(r, ((2.0 * alpha * lipschitz + 2.0 * log_cover) / (m_lower * (1.0 - alpha)) +
                    1.0 / n) /
                       n);
}

CoveringNumber covering_number_box(double half_width, int dim, double eps) {
  CoveringNumber c;
  if (!(half_width > 0.0) || !(eps > 0.0) || dim < 1) {
    c.count = kNaN;
    c.log_count = kNaN;
    return c;
  }
  const double ratio = half_width * std::sqrt(static_cast<double>(dim)) / eps;
  // Absorb representation error so that e.g. 1/0.1 does not round up to 11.
  const double k = std::max(1.0, std::ceil(ratio * (1.0 - 1e-12)));
  c.per_axis = static_cast<long>(k);
  c.log_count = dim * std::log(k);
  c.count = std::pow(k, dim);
  return c;
}

std::string canonical_formula_id(const std::string& name) {
  static const std::map<std::string, std::string> ids{
      {"mi", formula::mi},
      {"thm_main", formula::mi},
      {"localized_general", formula::localized_general},
      {"thm31_general", formula::localized_general},
      {"localized_opt", formula::localized_opt},
      {"thm31_opt", formula::localized_opt},
      {"gaussian_kl", formula::gaussian_kl},
      {"gaussian_corollary", formula::gaussian_kl},
      {"gaussian_l2", formula::gaussian_l2},
      {"highprob", formula::highprob},
      {"thm32_prob", formula::highprob},
      {"pacbayes_expectation", formula::pacbayes_expectation},
      {"thm51", formula::pacbayes_expectation},
      {"pacbayes_probability", formula::pacbayes_probability},
      {"thm53", formula::pacbayes_probability},
      {"localized_expectation", formula::localized_expectation},
      {"thm54", formula::localized_expectation},
      {"localized_probability", formula::localized_probability},
      {"thm55", formula::localized_probability},
      {"mle", formula::mle},
  };
  const auto it = ids.find(name);
  return it == ids.end() ? std::string() : it->second;
}

}  // namespace mibounds
