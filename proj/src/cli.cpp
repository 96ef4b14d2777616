#include "mibounds/cli.hpp"

#include "mibounds/assumptions.hpp"
#include "mibounds/bounds.hpp"
#include "mibounds/divergences.hpp"
#include "mibounds/experiments.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <thread>

namespace mibounds {

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

struct SubcommandSpec {
  const char* name;
  const char* help;
  std::vector<FlagSpec> flags;
};

const std::vector<SubcommandSpec>& specs() {
  static const std::vector<SubcommandSpec> s{
      {"divergence",
       "KL(P_theta0||P_theta), D_alpha(P_theta||P_theta0) and H^2 in closed form, each checked "
       "against a series or quadrature oracle.",
       {{"--family", "family", "gaussian | poisson | bernoulli | gaussian_natural"},
        {"--theta0", "theta0", "reference parameter"},
        {"--theta", "theta", "second parameter"},
        {"--alpha", "alpha", "Renyi order in (0,1)"},
        {"--v", "v", "noise standard deviation (Gaussian families)"},
        {"--domain", "domain", "natural-parameter interval lo,hi"}}},
      {"certify",
       "Dimension certificates: KL <= c(alpha) D_alpha (assumption 1), "
       "sup_beta beta^kappa E_{pi_-beta} KL <= d_pi (2), the same for V with d_pi' (3), "
       "and a mean-field rho attaining it (4); 'uniform' gives the uniform-prior constant.",
       {{"--assumption", "assumption", "1 | 2 | 3 | 4 | uniform"},
        {"--model", "family", "gaussian | sequence | poisson | bernoulli | gaussian_natural"},
        {"--theta0", "theta0", "true parameter (comma list)"},
        {"--sigma", "sigma", "prior standard deviation"},
        {"--v", "v", "noise standard deviation"},
        {"--d", "dim", "dimension"},
        {"--b", "b", "Sobolev smoothness"},
        {"--L", "L", "Sobolev radius"},
        {"--n", "n", "sample size (sequence truncation, assumption 4)"},
        {"--alpha", "alpha", "alpha for assumptions 1 and 4"},
        {"--M", "M", "uniform prior half-width"},
        {"--domain", "domain", "natural-parameter interval lo,hi"}}},
      {"bound",
       "Evaluates one bound right-hand side from its ingredients. Formulas: mi, "
       "localized_general, localized_opt, gaussian_kl, gaussian_l2, highprob, "
       "pacbayes_expectation, pacbayes_probability, localized_expectation, "
       "localized_probability, mle.",
       {{"--formula", "formula", "formula id"},
        {"--alpha", "alpha", "alpha in (0,1)"},
        {"--c", "c", "c(alpha)"},
        {"--dpi", "dpi", "d_pi"},
        {"--kappa", "kappa", "kappa_pi"},
        {"--dpi-prime", "dpi_prime", "d_pi'"},
        {"--n", "n", "sample size"},
        {"--beta", "beta", "localization inverse temperature"},
        {"--delta", "delta", "confidence parameter"},
        {"--eta", "eta", "second confidence parameter"},
        {"--mi", "mi", "mutual information I(theta;S)"},
        {"--exp-rn", "exp_rn", "E_rho r_n"},
        {"--kl", "kl", "KL(rho||pi) or KL(rho||pi_-beta)"},
        {"--exp-kl", "exp_kl", "E_rho KL(P_theta0||P_theta)"},
        {"--exp-v", "exp_v", "E_rho V(theta,theta0)"},
        {"--m", "m", "curvature lower bound m"},
        {"--lipschitz", "lipschitz", "Lipschitz constant of r_n/n"},
        {"--log-cover", "log_cover", "log covering number"},
        {"--d", "dim", "dimension"},
        {"--theta0-norm-sq", "theta0_norm_sq", "||theta0||^2"},
        {"--sigma-sq", "sigma_sq", "prior variance"},
        {"--v-sq", "v_sq", "noise variance"}}},
      {"contract",
       "Monte Carlo estimate of E_S E_{theta~pi_{n,alpha}} KL(P_theta0||P_theta) on an n grid, "
       "compared with the localized-prior upper bound; fails if the bound is violated.",
       {{"--model", "family", "gaussian | sequence"},
        {"--d", "dim", "dimension (gaussian)"},
        {"--v", "v", "noise standard deviation (gaussian)"},
        {"--sigma", "sigma", "prior standard deviation (gaussian)"},
        {"--b", "b", "Sobolev smoothness (sequence)"},
        {"--L", "L", "Sobolev radius (sequence)"},
        {"--theta0", "theta0", "true parameter (comma list)"},
        {"--alpha", "alpha", "alpha in (0,1)"},
        {"--n", "n", "comma list of sample sizes"},
        {"--replicates", "replicates", "Monte Carlo replicates per n"},
        {"--bound", "bound", "gaussian_kl | localized_opt"},
        {"--route", "route", "closed_form | variational"}}},
      {"rate-sweep",
       "Contraction sweep plus log-log rate fit of the Monte Carlo curve, the bound curve and "
       "the log(n)/n comparison sequence; fails if the fitted slope misses --expect-slope.",
       {{"--model", "family", "gaussian | sequence"},
        {"--d", "dim", "dimension (gaussian)"},
        {"--v", "v", "noise standard deviation (gaussian)"},
        {"--sigma", "sigma", "prior standard deviation (gaussian)"},
        {"--b", "b", "Sobolev smoothness (sequence)"},
        {"--L", "L", "Sobolev radius (sequence)"},
        {"--theta0", "theta0", "true parameter (comma list)"},
        {"--alpha", "alpha", "alpha in (0,1)"},
        {"--n", "n", "comma list of sample sizes"},
        {"--replicates", "replicates", "Monte Carlo replicates per n"},
        {"--expect-slope", "expect_slope", "expected slope"},
        {"--slope-tol", "slope_tol", "tolerance on the slope"}}},
      {"mi-check",
       "E_S E_rho[D_alpha - alpha r_n/(n(1-alpha))] <= I(theta;S)/(n(1-alpha)) with the "
       "closed-form mutual information, plus the decomposition "
       "E_S KL(rho||pi) = I + KL(E_S rho||pi).",
       {{"--d", "dim", "dimension"},
        {"--v", "v", "noise standard deviation"},
        {"--sigma", "sigma", "prior standard deviation"},
        {"--theta0", "theta0", "true parameter"},
        {"--alpha", "alpha", "divergence order alpha in (0,1)"},
        {"--posterior-alpha", "posterior_alpha", "tempering of rho (default: alpha)"},
        {"--n", "n", "sample size"},
        {"--replicates", "replicates", "Monte Carlo replicates"}}},
      {"highprob-check",
       "Empirical (1-delta-eta)-quantile of E_{pi_{n,alpha}} KL against the bound that holds "
       "with probability at least 1-delta-eta.",
       {{"--d", "dim", "dimension"},
        {"--v", "v", "noise standard deviation"},
        {"--sigma", "sigma", "prior standard deviation"},
        {"--theta0", "theta0", "true parameter"},
        {"--alpha", "alpha", "alpha in (0,1)"},
        {"--n", "n", "sample size"},
        {"--delta", "delta", "delta"},
        {"--eta", "eta", "eta"},
        {"--replicates", "replicates", "Monte Carlo replicates"}}},
      {"mle-check",
       "E||theta_hat - theta0||^2 for the maximum likelihood estimator on a compact set against "
       "the covering-number bound with eps = 1/n.",
       {{"--model", "family", "gaussian | poisson | bernoulli"},
        {"--d", "dim", "dimension (gaussian)"},
        {"--v", "v", "noise standard deviation (gaussian)"},
        {"--M", "M", "box half-width (gaussian)"},
        {"--domain", "domain", "natural-parameter interval lo,hi"},
        {"--theta0", "theta0", "true parameter"},
        {"--alpha", "alpha", "alpha in (0,1)"},
        {"--n", "n", "comma list of sample sizes"},
        {"--replicates", "replicates", "Monte Carlo replicates per n"}}},
      {"fisher-check",
       "Local sandwiches m/4 D^2 <= H^2 <= M/4 D^2 + L/12 |D|^3 (and the KL, D_1/2 analogues) "
       "around theta0, with the Fisher-information ratio limit.",
       {{"--family", "family", "gaussian | poisson | bernoulli | gaussian_natural"},
        {"--theta0", "theta0", "centre"},
        {"--v", "v", "noise standard deviation (gaussian)"},
        {"--domain", "domain", "natural-parameter interval lo,hi"},
        {"--radius", "radius", "largest |delta|"},
        {"--points", "points", "number of delta grid points"}}},
  };
  return s;
}

// Merged config with typed accessors.
struct Params {
  ConfigMap m;
  double real(std::string_view k, double d) const { return config_real(m, k, d); }
  long integer(std::string_view k, long d) const { return config_int(m, k, d); }
  std::string str(std::string_view k, const std::string& d) const {
    return config_get(m, k).value_or(d);
  }
  bool has(std::string_view k) const { return m.find(k) != m.end(); }
  std::vector<int> ints(std::string_view k, std::vector<int> d) const {
    const auto v = config_get(m, k);
    if (!v) return d;
    std::vector<int> out;
    for (long x : parse_int_list(*v)) out.push_back(static_cast<int>(x));
    return out;
  }
  Vector vec(std::string_view k, int dim, double fill) const {
    const auto v = config_get(m, k);
    if (!v) return Vector::Constant(dim, fill);
    const auto xs = parse_real_list(*v);
    if (xs.size() == 1) return Vector::Constant(dim, xs[0]);
    if (static_cast<int>(xs.size()) != dim) {
      throw std::invalid_argument(std::string(k) + ": expected " + std::to_string(dim) +
                                  " values");
    }
    return Eigen::Map<const Vector>(xs.data(), dim);
  }
};

std::uint64_t resolve_seed(const Params& p) {
  if (p.has("seed")) return static_cast<std::uint64_t>(p.integer("seed", 0));
  if (const char* env = std::getenv("MIBOUNDS_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
    throw std::invalid_argument("MIBOUNDS_SEED must be a non-negative integer");
  }
  return 0;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Outcome {
  std::string csv;
  nlohmann::json result;
  bool assertion_failed = false;
  bool usage_error = false;
};

ExpFamily1D family_from(const Params& p, const std::string& name) {
  ConfigMap c = p.m;
  c["family"] = name;
  c.erase("theta0");
  return std::get<ExpFamily1D>(model_from_config(c).model);
}

Outcome run_divergence(const Params& p, std::ostream& out) {
  Outcome o;
  const std::string family = p.str("family", "gaussian");
  const double alpha = p.real("alpha", 0.5);
  const double t0 = p.real("theta0", 0.0);
  const double t1 = p.real("theta", 1.0);
  o.csv = "quantity,value,method,oracle\n";
  nlohmann::json rows = nlohmann::json::array();
  auto add = [&](const char* q, const DivergenceValue& v, double oracle) {
    o.csv += std::string(q) + "," + format_real(v.value) + "," + to_string(v.method) + "," +
             format_real(oracle) + "\n";
    rows.push_back({{"quantity", q},
                    {"value", v.value},
                    {"method", to_string(v.method)},
                    {"oracle", oracle},
                    {"alpha", v.alpha}});
    out << q << " = " << fmt(v.value) << " (oracle " << fmt(oracle) << ")\n";
  };
  if (family == "gaussian") {
    const double v = p.real("v", 1.0);
    const GaussianMeanModel model(1, v);
    add("kl", kl_gaussian(scalar_param(t0), scalar_param(t1), v),
        kl_oracle_gaussian(t0, t1, v).value);
    add("renyi", renyi_gaussian(alpha, scalar_param(t0), scalar_param(t1), v),
        renyi_oracle_gaussian(alpha, t0, t1, v).value);
    add("hellinger_sq", hellinger_sq(model, scalar_param(t1), scalar_param(t0)),
        hellinger_sq(model, scalar_param(t1), scalar_param(t0), true).value);
  } else {
    const auto fam = family_from(p, family);
    add("kl", kl_expfam(fam, t0, t1), kl_oracle(fam, t0, t1).value);
    add("renyi", renyi_expfam(fam, alpha, t0, t1), renyi_oracle(fam, alpha, t0, t1).value);
    add("hellinger_sq", hellinger_sq(fam, scalar_param(t1), scalar_param(t0)),
        hellinger_oracle(fam, t1, t0).value);
  }
  o.result = {{"divergences", rows}};
  return o;
}

Outcome run_certify(const Params& p, std::ostream& out) {
  Outcome o;
  const std::string which = p.str("assumption", "2");
  const std::string family = p.str("family", "gaussian");
  nlohmann::json j;
  if (which == "1") {
    ModelSpec model;
    if (family == "gaussian") {
      model = GaussianMeanModel(static_cast<int>(p.integer("dim", 1)), p.real("v", 1.0));
    } else {
      model = family_from(p, family);
    }
    const auto c = certify_c_alpha(model, p.real("alpha", 0.5));
    j = {{"c_alpha", c.c_alpha},
         {"kappa", c.kappa},
         {"alpha", c.alpha},
         {"pairs_checked", c.pairs_checked},
         {"worst_ratio", c.worst_ratio}};
  } else if (which == "uniform") {
    ModelSpec model;
    if (family == "gaussian") {
      model = GaussianMeanModel(1, p.real("v", 1.0));
    } else {
      model = family_from(p, family);
    }
    j = certify_assumption2_uniform_1d(model, p.real("M", 1.0), p.real("theta0", 0.0)).to_json();
  } else if (family == "sequence") {
    if (which != "2") throw std::invalid_argument("certify: the sequence model supports assumption 2");
    const GaussianSequenceModel m(p.real("b", 1.0), p.real("L", 1.0),
                                  static_cast<int>(p.integer("n", 100)));
    Vector theta0 = smooth_sequence_theta0(m);
    if (p.has("theta0")) {
      theta0 = sequence_theta0_at(m, Eigen::Map<const Vector>(
                                         parse_real_list(p.str("theta0", "")).data(),
                                         static_cast<Eigen::Index>(
                                             parse_real_list(p.str("theta0", "")).size())),
                                  m.n_trunc);
    }
    j = certify_assumption2_sequence(m, theta0).to_json();
  } else if (family == "gaussian") {
    const int dim = static_cast<int>(p.integer("dim", 1));
    const GaussianMeanModel model(dim, p.real("v", 1.0));
    const double s = p.real("sigma", 1.0);
    const auto prior = GaussianMeasure::isotropic(dim, 0.0, s * s);
    const Vector theta0 = p.vec("theta0", dim, 0.0);
    if (which == "2") {
      j = certify_assumption2_gaussian(model, prior, theta0).to_json();
    } else if (which == "3") {
      j = certify_assumption3_gaussian(model, prior, theta0).to_json();
    } else if (which == "4") {
      j = certify_assumption4_conjugate(model, prior, theta0, p.real("alpha", 0.5),
                                        static_cast<int>(p.integer("n", 100)),
                                        MeanFieldFamily{dim, std::nullopt, std::nullopt, 1e-10})
              .to_json();
    } else {
      throw std::invalid_argument("certify: unknown assumption '" + which + "'");
    }
  } else {
    throw std::invalid_argument("certify: assumptions 2-4 need the gaussian or sequence model");
  }
  o.csv = "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_number()) o.csv += it.key() + "," + format_real(it->get<double>()) + "\n";
  }
  o.result = {{"certificate", j}};
  out << j.dump(2) << "\n";
  return o;
}

Outcome run_bound(const Params& p, std::ostream& out) {
  Outcome o;
  const std::string name = p.str("formula", "");
  const std::string id = canonical_formula_id(name);
  if (id.empty()) throw std::invalid_argument("bound: unknown formula '" + name + "'");
  const double a = p.real("alpha", 0.5), n = p.real("n", 100.0);
  BoundReport r;
  if (id == formula::mi) {
    r = bound_mi(p.real("mi", 0.0), n, a);
  } else if (id == formula::localized_general) {
    r = bound_localized_general(p.real("c", 1.0 / a), p.real("dpi", 1.0), p.real("kappa", 1.0), a,
                                p.real("beta", 0.0), n);
  } else if (id == formula::localized_opt) {
    r = bound_localized_opt(p.real("c", 1.0 / a), p.real("dpi", 1.0), p.real("kappa", 1.0), a, n);
  } else if (id == formula::gaussian_kl) {
    r = bound_gaussian_kl(p.real("dim", 1.0), p.real("theta0_norm_sq", 0.0),
                          p.real("sigma_sq", 1.0), a, n);
  } else if (id == formula::gaussian_l2) {
    r = bound_gaussian_l2(p.real("dim", 1.0), p.real("theta0_norm_sq", 0.0),
                          p.real("sigma_sq", 1.0), p.real("v_sq", 1.0), a, n);
  } else if (id == formula::highprob) {
    r = bound_highprob(p.real("c", 1.0 / a), p.real("dpi", 1.0), p.real("dpi_prime", 1.0),
                       p.real("kappa", 1.0), a, n, p.real("delta", 0.05), p.real("eta", 0.05));
  } else if (id == formula::pacbayes_expectation) {
    r = bound_pacbayes_expectation(a, n, p.real("exp_rn", 0.0), p.real("kl", 0.0));
  } else if (id == formula::pacbayes_probability) {
    r = bound_pacbayes_probability(a, n, p.real("exp_rn", 0.0), p.real("kl", 0.0),
                                   p.real("delta", 0.05));
  } else if (id == formula::localized_expectation) {
    r = bound_localized_expectation(p.real("c", 1.0 / a), a, p.real("beta", 0.0), n,
                                    p.real("exp_kl", 0.0), p.real("kl", 0.0));
  } else if (id == formula::localized_probability) {
    r = bound_localized_probability(p.real("c", 1.0 / a), a, p.real("beta", 0.0), n,
                                    p.real("exp_kl", 0.0), p.real("exp_v", 0.0), p.real("kl", 0.0),
                                    p.real("delta", 0.05), p.real("eta", 0.05));
  } else {
    r = bound_mle(p.real("m", 0.5), p.real("lipschitz", 1.0), p.real("log_cover", 0.0), a, n);
  }
  o.csv = "formula_id,rhs,valid\n" + r.formula_id + "," + format_real(r.rhs) + "," +
          (r.valid ? "true" : "false") + "\n";
  o.result = {{"bound", r.to_json()}};
  if (r.valid) {
    out << fmt(r.rhs) << "\n";
  } else {
    out << "invalid: " << r.note << "\n";
    o.usage_error = true;
  }
  return o;
}

ExperimentConfig experiment_from(const Params& p, int jobs, std::uint64_t seed) {
  ExperimentConfig cfg;
  const std::string family = p.str("family", "gaussian");
  cfg.alpha = p.real("alpha", 0.5);
  cfg.n_grid = p.ints("n", cfg.n_grid);
  cfg.replicates = static_cast<int>(p.integer("replicates", 2000));
  cfg.seed = seed;
  cfg.jobs = jobs;
  cfg.bound_id = p.str("bound", "");
  const std::string route = p.str("route", "closed_form");
  if (route == "closed_form") {
    cfg.route = PosteriorRoute::closed_form;
  } else if (route == "variational") {
    cfg.route = PosteriorRoute::variational;
  } else {
    throw std::invalid_argument("unknown route '" + route + "'");
  }
  if (family == "gaussian") {
    const int dim = static_cast<int>(p.integer("dim", 1));
    cfg.model = GaussianMeanModel(dim, p.real("v", 1.0));
    cfg.prior_sd = p.real("sigma", 1.0);
    cfg.theta0 = p.vec("theta0", dim, 0.0);
  } else if (family == "sequence") {
    cfg.model = GaussianSequenceModel(p.real("b", 1.0), p.real("L", 1.0), 1);
    if (p.has("theta0")) {
      const auto xs = parse_real_list(p.str("theta0", ""));
      cfg.theta0 = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    } else {
      cfg.theta0 = Vector();
    }
  } else {
    throw std::invalid_argument("contraction runs support the gaussian and sequence models");
  }
  return cfg;
}

Outcome run_contract(const Params& p, int jobs, std::uint64_t seed, std::ostream& out) {
  Outcome o;
  const auto res = run_contraction_experiment(experiment_from(p, jobs, seed));
  o.csv = results_csv(res);
  o.result = results_json(res);
  for (const auto& pt : res.points) {
    out << "n=" << pt.n << " mc_mean=" << fmt(pt.mc_mean) << " se=" << fmt(pt.mc_se)
        << " bound=" << fmt(pt.bound_rhs) << "\n";
  }
  o.assertion_failed = !res.bound_dominates;
  return o;
}

Outcome run_rate_sweep(const Params& p, int jobs, std::uint64_t seed, std::ostream& out) {
  Outcome o = run_contract(p, jobs, seed, out);
  std::vector<std::pair<double, double>> bound_pts, log_pts;
  const auto points = parse_results_csv(o.csv);
  for (const auto& pt : points) {
    bound_pts.emplace_back(pt.n, pt.bound_rhs);
    log_pts.emplace_back(pt.n, std::log(static_cast<double>(pt.n)) / pt.n);
  }
  const double slope = o.result["rate_fit"]["slope"].is_number()
                           ? o.result["rate_fit"]["slope"].get<double>()
                           : std::nan("");
  nlohmann::json fits;
  fits["mc"] = o.result["rate_fit"];
  if (points.size() >= 3) {
    const auto b = fit_rate(bound_pts), l = fit_rate(log_pts);
    fits["bound"] = {{"slope", b.slope}, {"intercept", b.intercept}, {"r2", b.r2}};
    fits["log_n_over_n"] = {{"slope", l.slope}, {"intercept", l.intercept}, {"r2", l.r2}};
    out << "slopes: mc=" << fmt(slope) << " bound=" << fmt(b.slope)
        << " log(n)/n=" << fmt(l.slope) << "\n";
  }
  o.result["fits"] = fits;
  if (p.has("expect_slope")) {
    const double want = p.real("expect_slope", -1.0), tol = p.real("slope_tol", 0.15);
    const bool ok = std::fabs(slope - want) <= tol;
    o.result["slope_check"] = {{"expected", want}, {"tolerance", tol}, {"pass", ok}};
    if (!ok) o.assertion_failed = true;
  }
  return o;
}

struct GaussianSetup {
  GaussianMeanModel model;
  GaussianMeasure prior;
  Vector theta0;
};

GaussianSetup gaussian_setup(const Params& p) {
  const int dim = static_cast<int>(p.integer("dim", 1));
  const double s = p.real("sigma", 1.0);
  return {GaussianMeanModel(dim, p.real("v", 1.0)), GaussianMeasure::isotropic(dim, 0.0, s * s),
          p.vec("theta0", dim, 0.0)};
}

Outcome run_mi_check(const Params& p, int jobs, std::uint64_t seed, std::ostream& out) {
  Outcome o;
  const auto g = gaussian_setup(p);
  const auto rep = verify_mi_bound(g.model, g.prior, p.real("alpha", 0.5),
                                   static_cast<int>(p.integer("n", 1)), g.theta0,
                                   static_cast<int>(p.integer("replicates", 100000)), seed,
                                   p.real("posterior_alpha", 0.0), jobs);
  o.result = rep.to_json();
  o.csv = "quantity,value\n";
  for (auto it = o.result.begin(); it != o.result.end(); ++it) {
    if (it->is_number()) o.csv += it.key() + "," + format_real(it->get<double>()) + "\n";
  }
  out << "MI=" << fmt(rep.mi) << " rhs=" << fmt(rep.rhs) << " lhs=" << fmt(rep.lhs_mean)
      << " (se " << fmt(rep.lhs_se) << ")\n";
  o.assertion_failed = !rep.holds;
  return o;
}

Outcome run_highprob_check(const Params& p, int jobs, std::uint64_t seed, std::ostream& out) {
  Outcome o;
  const auto g = gaussian_setup(p);
  const auto rep = verify_highprob_bound(g.model, g.prior, p.real("alpha", 0.5),
                                         static_cast<int>(p.integer("n", 1000)), g.theta0,
                                         p.real("delta", 0.1), p.real("eta", 0.1),
                                         static_cast<int>(p.integer("replicates", 5000)), seed,
                                         jobs);
  o.result = rep.to_json();
  o.csv = "quantity,value\n";
  for (const char* k : {"level", "quantile", "rhs", "violation_frequency"}) {
    o.csv += std::string(k) + "," + format_real(o.result[k].get<double>()) + "\n";
  }
  out << "quantile=" << fmt(rep.quantile) << " rhs=" << fmt(rep.rhs)
      << (rep.low_confidence ? " (low confidence)" : "") << "\n";
  o.assertion_failed = !rep.holds;
  return o;
}

Outcome run_mle_check(const Params& p, int jobs, std::uint64_t seed, std::ostream& out) {
  Outcome o;
  const std::string family = p.str("family", "gaussian");
  ModelSpec model;
  Vector theta0;
  if (family == "gaussian") {
    const int dim = static_cast<int>(p.integer("dim", 1));
    model = GaussianMeanModel(dim, p.real("v", 1.0));
    theta0 = p.vec("theta0", dim, 0.0);
  } else {
    const auto fam = family_from(p, family);
    theta0 = scalar_param(p.real("theta0", 0.5 * (fam.theta_lo + fam.theta_hi)));
    model = fam;
  }
  const auto rep = run_mle_experiment(model, theta0, p.real("M", 3.0), p.real("alpha", 0.5),
                                      p.ints("n", {100, 200, 400, 800, 1600}),
                                      static_cast<int>(p.integer("replicates", 10000)), seed,
                                      jobs);
  o.result = rep.to_json();
  o.csv = "n,mc_mean,mc_se,bound_rhs,slack,lipschitz,log_cover\n";
  for (const auto& pt : rep.points) {
    o.csv += std::to_string(pt.n) + "," + format_real(pt.mc_mean) + "," + format_real(pt.mc_se) +
             "," + format_real(pt.bound_rhs) + "," + format_real(pt.slack) + "," +
             format_real(pt.lipschitz) + "," + format_real(pt.log_cover) + "\n";
    out << "n=" << pt.n << " mse=" << fmt(pt.mc_mean) << " bound=" << fmt(pt.bound_rhs)
        << " ratio=" << fmt(pt.slack) << "\n";
  }
  o.assertion_failed = !rep.bound_holds;
  return o;
}

Outcome run_fisher_check(const Params& p, std::ostream& out) {
  Outcome o;
  const std::string family = p.str("family", "gaussian");
  FisherSubject subject;
  if (family == "gaussian") {
    subject = GaussianMeanModel(1, p.real("v", 1.0));
  } else {
    subject = family_from(p, family);
  }
  const double radius = p.real("radius", 0.5);
  const int points = static_cast<int>(p.integer("points", 101));
  const auto rep =
      fisher_expansion_check(subject, p.real("theta0", 0.0), lin_space(-radius, radius, points));
  o.csv = "delta,h2,h2_lo,h2_hi,kl,kl_lo,kl_hi,d_half,dh_lo,dh_hi\n";
  for (const auto& r : rep.rows) {
    for (double x : {r.delta, r.h2, r.h2_lo, r.h2_hi, r.kl, r.kl_lo, r.kl_hi, r.d_half, r.dh_lo}) {
      o.csv += format_real(x) + ",";
    }
    o.csv += format_real(r.dh_hi) + "\n";
  }
  o.result = {{"i0", rep.info.i0},
              {"i_lo", rep.info.i_lo},
              {"i_hi", rep.info.i_hi},
              {"i1_bound", rep.info.i1_bound},
              {"fitted_c", rep.fitted_c},
              {"max_relative_slack", rep.max_relative_slack},
              {"ratio_deltas", rep.ratio_deltas},
              {"ratios", rep.ratios},
              {"ratio_limit", rep.ratio_limit},
              {"violations", rep.violations}};
  out << "ratio limit=" << fmt(rep.ratio_limit) << " fitted C=" << fmt(rep.fitted_c) << " violations="
      << rep.violations.size() << "\n";
  for (const auto& v : rep.violations) out << "  " << v << "\n";
  o.assertion_failed = !rep.sandwiches_hold();
  return o;
}

}  // namespace

const std::vector<std::string>& cli_subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : specs()) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  Params p;
  std::uint64_t seed = 0;
  Outcome o;
  try {
    if (inv.config_path) p.m = load_config(*inv.config_path);
    for (const auto& [k, v] : inv.overrides) p.m[k] = v;
    seed = resolve_seed(p);
    const auto& s = inv.subcommand;
    if (s == "divergence") {
      o = run_divergence(p, out);
    } else if (s == "certify") {
      o = run_certify(p, out);
    } else if (s == "bound") {
      o = run_bound(p, out);
    } else if (s == "contract") {
      o = run_contract(p, inv.jobs, seed, out);
    } else if (s == "rate-sweep") {
      o = run_rate_sweep(p, inv.jobs, seed, out);
    } else if (s == "mi-check") {
      o = run_mi_check(p, inv.jobs, seed, out);
    } else if (s == "highprob-check") {
      o = run_highprob_check(p, inv.jobs, seed, out);
    } else if (s == "mle-check") {
      o = run_mle_check(p, inv.jobs, seed, out);
    } else if (s == "fisher-check") {
      o = run_fisher_check(p, out);
    } else {
      err << "unknown subcommand '" << s << "'\n";
      return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(inv.out_dir) / (inv.subcommand + "-" + std::to_string(seed));
    fs::create_directories(dir);
    nlohmann::json meta;
    meta["schema"] = 1;
    meta["subcommand"] = inv.subcommand;
    meta["seed"] = seed;
    meta["config"] = nlohmann::json(std::map<std::string, std::string>(p.m.begin(), p.m.end()));
    meta["result"] = o.result;
    meta["assertion_failed"] = o.assertion_failed;
    write_text_file((dir / "results.csv").string(), o.csv);
    write_text_file((dir / "meta.json").string(), meta.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (o.usage_error) return kExitUsage;
  if (o.assertion_failed) {
    err << inv.subcommand << ": assertion failed\n";
    return kExitAssertion;
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Numerical checks of information-theoretic posterior contraction bounds"};
  app.require_subcommand(1);
  CliInvocation inv;
  std::string config_path;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out-dir", inv.out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads")->capture_default_str();
  app.add_option_function<std::string>(
      "--seed", [&](const std::string& v) { inv.overrides["seed"] = v; },
      "master seed (default: MIBOUNDS_SEED, else 0)");

  for (const auto& spec : specs()) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out-dir", inv.out_dir, "output directory");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->add_option_function<std::string>(
        "--seed", [&](const std::string& v) { inv.overrides["seed"] = v; }, "master seed");
    for (const auto& f : spec.flags) {
      const std::string key = f.key;
      sub->add_option_function<std::string>(
          f.flag, [&inv, key](const std::string& v) { inv.overrides[key] = v; }, f.help);
    }
    sub->callback([&inv, name = std::string(spec.name)] { inv.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (!config_path.empty()) inv.config_path = config_path;
  inv.jobs = std::max(1, jobs);
  return dispatch(inv, std::cout, std::cerr);
}

}  // namespace mibounds
