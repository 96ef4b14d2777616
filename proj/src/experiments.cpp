#include "mibounds/experiments.hpp"

#include "mibounds/mle.hpp"
#include "mibounds/numerics.hpp"
#include "mibounds/rng.hpp"
#include "mibounds/variational.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mibounds {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json vector_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

nlohmann::json fit_json(const RateFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

RateFit fit_or_empty(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 3) return {kNaN, kNaN, kNaN};
  for (const auto& p : pts) {
    if (!(p.second > 0.0)) return {kNaN, kNaN, kNaN};
  }
  return fit_rate(pts);
}

}  // namespace

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(workers, count);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
  const auto k = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0)) throw std::invalid_argument("fit_rate: values must be > 0");
    sx += std::log(n);
    sy += std::log(v);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, v] : points) {
    const double dx = std::log(n) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: need distinct n values");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("experiment: replicates must be >= 1");
  if (n_grid.empty()) throw std::invalid_argument("experiment: empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw std::invalid_argument("experiment: n must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("experiment: n grid must be strictly increasing");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("experiment: alpha in (0, 1)");
  if (std::holds_alternative<ExpFamily1D>(model)) {
    throw std::invalid_argument(
        "experiment: contraction runs support the Gaussian mean and sequence models");
  }
  if (const auto* g = std::get_if<GaussianMeanModel>(&model)) {
    if (theta0.size() != g->dim) throw std::invalid_argument("experiment: theta0 dimension");
    if (!(prior_sd > 0.0)) throw std::invalid_argument("experiment: prior sd must be > 0");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  if (const auto* g = std::get_if<GaussianMeanModel>(&model)) {
    j["family"] = "gaussian";
    j["dim"] = g->dim;
    j["v"] = g->noise_sd;
    j["sigma"] = prior_sd;
  } else if (const auto* s = std::get_if<GaussianSequenceModel>(&model)) {
    j["family"] = "sequence";
    j["b"] = s->smoothness;
    j["L"] = s->radius;
  }
  j["theta0"] = vector_json(theta0);
  j["alpha"] = alpha;
  j["n_grid"] = n_grid;
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["bound_id"] = bound_id;
  j["route"] = route == PosteriorRoute::closed_form ? "closed_form" : "variational";
  return j;
}

Vector sequence_theta0_at(const GaussianSequenceModel& base, const Vector& coefficients, int n) {
  const GaussianSequenceModel m(base.smoothness, base.radius, n);
  if (coefficients.size() == 0) return smooth_sequence_theta0(m);
  Vector out = Vector::Zero(n);
  const auto k = std::min<Eigen::Index>(n, coefficients.size());
  out.head(k) = coefficients.head(k);
  return out;
}

double exact_expected_posterior_kl(const GaussianMeasure& prior, double alpha, int n,
                                   const Vector& theta0, double noise_sd) {
  const double v2 = noise_sd * noise_sd;
  const double lik = n * alpha / v2;
  const Vector prec = prior.var_diag.cwiseInverse().array() + lik;
  const Vector w = lik * prec.cwiseInverse();
  const Vector c = prec.cwiseInverse();
  const auto bias = (1.0 - w.array()) * (prior.mean - theta0).array();
  const double e = (w.array().square() * v2 / n + bias.square() + c.array()).sum();
  return e / (2.0 * v2);
}

ExperimentResult run_contraction_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.config = cfg.to_json();
  const bool sequence = std::holds_alternative<GaussianSequenceModel>(cfg.model);
  std::string bound_id = cfg.bound_id.empty()
                             ? std::string(sequence ? formula::localized_opt : formula::gaussian_kl)
                             : canonical_formula_id(cfg.bound_id);
  if (bound_id != formula::gaussian_kl && bound_id != formula::localized_opt) {
    throw std::invalid_argument("experiment: bound must be gaussian_kl or localized_opt");
  }
  if (sequence && bound_id != formula::localized_opt) {
    throw std::invalid_argument("experiment: the sequence model uses the localized_opt bound");
  }
  res.config["bound_id"] = bound_id;
  const double c_alpha = 1.0 / cfg.alpha;
  res.certificates["c_alpha"] = c_alpha;

  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const int n = cfg.n_grid[g];
    GaussianMeasure prior;
    Vector theta0;
    double v = 1.0;
    DimensionCertificate cert;
    if (sequence) {
      const auto& base = std::get<GaussianSequenceModel>(cfg.model);
      const GaussianSequenceModel m(base.smoothness, base.radius, n);
      theta0 = sequence_theta0_at(base, cfg.theta0, n);
      prior = sequence_prior(m);
      cert = certify_assumption2_sequence(m, theta0);
    } else {
      const auto& m = std::get<GaussianMeanModel>(cfg.model);
      theta0 = cfg.theta0;
      v = m.noise_sd;
      prior = GaussianMeasure::isotropic(m.dim, 0.0, cfg.prior_sd * cfg.prior_sd);
      cert = certify_assumption2_gaussian(m, prior, theta0);
    }
    res.certificates["dimension"] = cert.to_json();

    BoundReport bound;
    if (bound_id == formula::gaussian_kl) {
      bound = bound_gaussian_kl(static_cast<double>(theta0.size()), theta0.squaredNorm(),
                                cfg.prior_sd * cfg.prior_sd, cfg.alpha, n);
    } else {
      bound = bound_localized_opt(c_alpha, cert.d_pi, cert.kappa_pi, cfg.alpha, n);
    }
    if (!bound.valid) throw std::runtime_error("experiment: invalid bound: " + bound.note);

    std::vector<double> values(static_cast<std::size_t>(cfg.replicates));
    const MeanFieldFamily fam{prior.dim(), std::nullopt, std::nullopt, 1e-10};
    parallel_for(values.size(), cfg.jobs, [&](std::size_t r) {
      CounterRng rng(cfg.seed, stream_id(g, r));
      const Vector xbar = draw_gaussian_sample_mean(theta0, v, n, rng);
      if (cfg.route == PosteriorRoute::closed_form) {
        const auto post = fractional_posterior_gaussian(prior, cfg.alpha, n, xbar, v);
        values[r] = expected_kl_under(post, theta0, v);
      } else {
        const auto sol = solve_variational_gaussian(prior, cfg.alpha, n, xbar, theta0, v, fam);
        values[r] = expected_kl_under(sol.q, theta0, v);
      }
    });
    const auto stats = mean_and_se(values);
    ExperimentPoint pt;
    pt.n = n;
    pt.mc_mean = stats.mean;
    pt.mc_se = stats.se;
    pt.bound_rhs = bound.rhs;
    pt.slack = bound.rhs / stats.mean;
    pt.exact_mean = exact_expected_posterior_kl(prior, cfg.alpha, n, theta0, v);
    if (cfg.keep_replicates) pt.values = std::move(values);
    if (pt.mc_mean - 3.0 * pt.mc_se > pt.bound_rhs) res.bound_dominates = false;
    res.points.push_back(std::move(pt));
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : res.points) pts.emplace_back(p.n, p.mc_mean);
  res.rate_fit = fit_or_empty(pts);
  return res;
}

// ---------------------------------------------------------------------------

nlohmann::json MiCheckReport::to_json() const {
  return {{"mi", mi},
          {"rhs", rhs},
          {"lhs_mean", lhs_mean},
          {"lhs_se", lhs_se},
          {"mi_mc_mean", mi_mc_mean},
          {"mi_mc_se", mi_mc_se},
          {"decomposition_lhs_mean", decomposition_lhs_mean},
          {"decomposition_lhs_se", decomposition_lhs_se},
          {"decomposition_rhs", decomposition_rhs},
          {"holds", holds},
          {"holds_strict", holds_strict}};
}

MiCheckReport verify_mi_bound(const GaussianMeanModel& model, const GaussianMeasure& prior,
                              double alpha, int n, const Vector& theta0, int replicates,
                              std::uint64_t seed, double posterior_alpha, int jobs) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("mi check: alpha in (0, 1)");
  if (replicates < 1 || n < 1) throw std::invalid_argument("mi check: need n, R >= 1");
  const double pa = posterior_alpha > 0.0 ? posterior_alpha : alpha;
  const double v = model.noise_sd;
  MiCheckReport rep;
  rep.mi = mutual_information_gaussian(model, prior, pa, n, theta0);
  rep.rhs = bound_mi(rep.mi, n, alpha).rhs;
  const auto marginal = posterior_marginal_gaussian(prior, pa, n, theta0, v);
  rep.decomposition_rhs = rep.mi + kl_gaussian_measures(marginal, prior);

  const auto count = static_cast<std::size_t>(replicates);
  std::vector<double> lhs(count), mi_terms(count), dec(count);
  const double rn_weight = alpha / (n * (1.0 - alpha));
  parallel_for(count, jobs, [&](std::size_t r) {
    CounterRng rng(seed, r);
    const Vector xbar = draw_gaussian_sample_mean(theta0, v, n, rng);
    const auto post = fractional_posterior_gaussian(prior, pa, n, xbar, v);
    lhs[r] = expected_renyi_under(post, alpha, theta0, v) -
             rn_weight * expected_rn_under(post, theta0, xbar, n, v);
    mi_terms[r] = kl_gaussian_measures(post, marginal);
    dec[r] = kl_gaussian_measures(post, prior);
  });
  const auto l = mean_and_se(lhs), m = mean_and_se(mi_terms), d = mean_and_se(dec);
  rep.lhs_mean = l.mean;
  rep.lhs_se = l.se;
  rep.mi_mc_mean = m.mean;
  rep.mi_mc_se = m.se;
  rep.decomposition_lhs_mean = d.mean;
  rep.decomposition_lhs_se = d.se;
  rep.holds = rep.lhs_mean <= rep.rhs + 3.0 * rep.lhs_se;
  rep.holds_strict = rep.lhs_mean <= rep.rhs;
  return rep;
}

nlohmann::json HighProbReport::to_json() const {
  return {{"level", level},
          {"quantile", quantile},
          {"rhs", rhs},
          {"violation_frequency", violation_frequency},
          {"replicates", replicates},
          {"low_confidence", low_confidence},
          {"holds", holds},
          {"bound", bound.to_json()},
          {"certificate", certificate.to_json()}};
}

HighProbReport verify_highprob_bound(const GaussianMeanModel& model, const GaussianMeasure& prior,
                                     double alpha, int n, const Vector& theta0, double delta,
                                     double eta, int replicates, std::uint64_t seed, int jobs) {
  if (replicates < 1 || n < 1) throw std::invalid_argument("high-probability check: need n, R >= 1");
  if (!(delta > 0.0 && eta > 0.0 && delta + eta < 1.0)) {
    throw std::invalid_argument("high-probability check: need delta, eta > 0 and delta + eta < 1");
  }
  HighProbReport rep;
  rep.replicates = replicates;
  rep.level = 1.0 - delta - eta;
  rep.certificate = certify_assumption3_gaussian(model, prior, theta0);
  rep.bound = bound_highprob(1.0 / alpha, rep.certificate.d_pi, *rep.certificate.d_pi_prime,
                             rep.certificate.kappa_pi, alpha, n, delta, eta);
  if (!rep.bound.valid) throw std::runtime_error("high-probability check: " + rep.bound.note);
  rep.rhs = rep.bound.rhs;
  const double v = model.noise_sd;
  std::vector<double> values(static_cast<std::size_t>(replicates));
  parallel_for(values.size(), jobs, [&](std::size_t r) {
    CounterRng rng(seed, r);
    const Vector xbar = draw_gaussian_sample_mean(theta0, v, n, rng);
    const auto post = fractional_posterior_gaussian(prior, alpha, n, xbar, v);
    values[r] = expected_kl_under(post, theta0, v);
  });
  const auto above = std::count_if(values.begin(), values.end(), [&](double x) { return x > rep.rhs; });
  rep.violation_frequency = static_cast<double>(above) / replicates;
  rep.quantile = sample_quantile(values, rep.level);
  rep.low_confidence = replicates < 10;
  rep.holds = rep.low_confidence || rep.quantile <= rep.rhs;
  return rep;
}

nlohmann::json MleReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"n", p.n},
                   {"mc_mean", p.mc_mean},
                   {"mc_se", p.mc_se},
                   {"bound_rhs", p.bound_rhs},
                   {"slack", p.slack},
                   {"lipschitz", p.lipschitz},
                   {"log_cover", p.log_cover},
                   {"m_lower", p.m_lower}});
  }
  return {{"points", pts},
          {"lhs_fit", fit_json(lhs_fit)},
          {"rhs_fit", fit_json(rhs_fit)},
          {"bound_holds", bound_holds},
          {"slack_increasing", slack_increasing}};
}

MleReport run_mle_experiment(const ModelSpec& model, const Vector& theta0, double half_width,
                             double alpha, const std::vector<int>& n_grid, int replicates,
                             std::uint64_t seed, int jobs) {
  if (replicates < 1 || n_grid.empty()) throw std::invalid_argument("mle experiment: empty run");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("mle experiment: alpha in (0, 1)");
  const auto* gauss = std::get_if<GaussianMeanModel>(&model);
  const auto* fam = std::get_if<ExpFamily1D>(&model);
  if (!gauss && !fam) throw std::invalid_argument("mle experiment: unsupported model");
  std::optional<CompactBox> box;
  double cover_half_width = half_width;
  if (gauss) {
    box = CompactBox(half_width, gauss->dim);
    if (!box->contains(theta0)) throw std::domain_error("mle experiment: theta0 outside the box");
  } else {
    fam->require_domain(theta0[0], "mle experiment theta0");
    cover_half_width = 0.5 * (fam->theta_hi - fam->theta_lo);
  }
  const int dim = gauss ? gauss->dim : 1;

  MleReport rep;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const int n = n_grid[g];
    const auto count = static_cast<std::size_t>(replicates);
    std::vector<double> err(count), lip(count);
    parallel_for(count, jobs, [&](std::size_t r) {
      if (gauss) {
        CounterRng rng(seed, stream_id(g, r));
        const Vector xbar = draw_gaussian_sample_mean(theta0, gauss->noise_sd, n, rng);
        const Vector th = mle_gaussian(*box, xbar);
        err[r] = (th - theta0).squaredNorm();
        lip[r] = (half_width + xbar.array().abs()).matrix().norm() / gauss->noise_var();
      } else {
        const auto s = sample(model, theta0, n, mix64(seed ^ stream_id(g, r)));
        const double tbar = s.data.col(0).mean();
        const double th = mle_expfam(*fam, tbar);
        err[r] = (th - theta0[0]) * (th - theta0[0]);
        lip[r] = std::max(std::fabs(fam->psi1(fam->theta_lo) - tbar),
                          std::fabs(fam->psi1(fam->theta_hi) - tbar));
      }
    });
    MlePoint pt;
    pt.n = n;
    const auto st = mean_and_se(err);
    pt.mc_mean = st.mean;
    pt.mc_se = st.se;
    pt.lipschitz = *std::max_element(lip.begin(), lip.end());
    pt.log_cover = covering_number_box(cover_half_width, dim, 1.0 / n).log_count;
    pt.m_lower = gauss ? alpha / (2.0 * gauss->noise_var()) : alpha * fam->strong_convexity / 2.0;
    const auto b = bound_mle(pt.m_lower, pt.lipschitz, pt.log_cover, alpha, n);
    pt.bound_rhs = b.rhs;
    pt.slack = b.rhs / pt.mc_mean;
    if (!(b.valid && pt.mc_mean <= pt.bound_rhs)) rep.bound_holds = false;
    if (!rep.points.empty() && !(pt.slack > rep.points.back().slack)) rep.slack_increasing = false;
    rep.points.push_back(pt);
  }
  std::vector<std::pair<double, double>> l, rr;
  for (const auto& p : rep.points) {
    l.emplace_back(p.n, p.mc_mean);
    rr.emplace_back(p.n, p.bound_rhs);
  }
  rep.lhs_fit = fit_or_empty(l);
  rep.rhs_fit = fit_or_empty(rr);
  return rep;
}

// ---------------------------------------------------------------------------

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string results_csv(const ExperimentResult& result) {
  std::string s = "n,mc_mean,mc_se,bound_rhs,slack\n";
  for (const auto& p : result.points) {
    s += std::to_string(p.n) + "," + format_real(p.mc_mean) + "," + format_real(p.mc_se) + "," +
         format_real(p.bound_rhs) + "," + format_real(p.slack) + "\n";
  }
  return s;
}

nlohmann::json results_json(const ExperimentResult& result) {
  nlohmann::json j;
  j["schema"] = 1;
  j["config"] = result.config;
  j["certificates"] = result.certificates;
  j["rate_fit"] = fit_json(result.rate_fit);
  j["bound_dominates"] = result.bound_dominates;
  nlohmann::json exact = nlohmann::json::array();
  for (const auto& p : result.points) exact.push_back({{"n", p.n}, {"exact_mean", p.exact_mean}});
  j["exact"] = exact;
  return j;
}

void emit_results(const ExperimentResult& result, const std::string& csv_path,
                  const std::string& json_path) {
  write_text_file(csv_path, results_csv(result));
  write_text_file(json_path, results_json(result).dump(2) + "\n");
}

std::vector<ExperimentPoint> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "n,mc_mean,mc_se,bound_rhs,slack") {
    throw std::runtime_error("results CSV: unexpected header");
  }
  std::vector<ExperimentPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw std::runtime_error("results CSV: expected 5 columns");
    ExperimentPoint p;
    p.n = std::stoi(cells[0]);
    p.mc_mean = std::strtod(cells[1].c_str(), nullptr);
    p.mc_se = std::strtod(cells[2].c_str(), nullptr);
    p.bound_rhs = std::strtod(cells[3].c_str(), nullptr);
    p.slack = std::strtod(cells[4].c_str(), nullptr);
    p.exact_mean = kNaN;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ExperimentPoint> read_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_results_csv(ss.str());
}

}  // namespace mibounds
