#include "mibounds/experiments.hpp"
#include "mibounds/posteriors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace mibounds;

namespace {
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_grid = {20, 40, 80};
  cfg.replicates = 300;
  cfg.seed = 17;
  return cfg;
}
}  // namespace

TEST_CASE("results do not depend on the number of worker threads") {
  auto cfg = small_config();
  cfg.jobs = 1;
  const auto a = run_contraction_experiment(cfg);
  cfg.jobs = 4;
  const auto b = run_contraction_experiment(cfg);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].mc_mean == b.points[i].mc_mean);
    CHECK(a.points[i].mc_se == b.points[i].mc_se);
  }
}

TEST_CASE("Monte Carlo agrees with the analytic expectation") {
  auto cfg = small_config();
  cfg.replicates = 4000;
  cfg.theta0 = scalar_param(0.8);
  const auto r = run_contraction_experiment(cfg);
  for (const auto& p : r.points) {
    CHECK(std::fabs(p.mc_mean - p.exact_mean) <= 4 * p.mc_se);
    CHECK(p.mc_mean <= p.bound_rhs);
    CHECK(p.slack == doctest::Approx(p.bound_rhs / p.mc_mean));
  }
  CHECK(r.bound_dominates);
  const auto prior = GaussianMeasure::isotropic(1, 0, 1);
  CHECK(exact_expected_posterior_kl(prior, 0.5, 100, Vector::Zero(1), 1.0) ==
        doctest::Approx(0.0146098).epsilon(1e-5));
}

TEST_CASE("variational route matches the closed form in the conjugate case") {
  auto cfg = small_config();
  cfg.replicates = 20;
  const auto a = run_contraction_experiment(cfg);
  cfg.route = PosteriorRoute::variational;
  const auto b = run_contraction_experiment(cfg);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(b.points[i].mc_mean == doctest::Approx(a.points[i].mc_mean).epsilon(1e-5));
  }
}

TEST_CASE("sequence model experiment") {
  ExperimentConfig cfg;
  cfg.model = GaussianSequenceModel(1.0, 1.0, 1);
  cfg.theta0 = Vector();
  cfg.n_grid = {25, 50, 100};
  cfg.replicates = 50;
  const auto r = run_contraction_experiment(cfg);
  CHECK(r.bound_dominates);
  CHECK(r.certificates.dump().find("d_pi") != std::string::npos);
  const Vector t = sequence_theta0_at(GaussianSequenceModel(1, 1, 1), Vector::Constant(2, 0.1), 5);
  CHECK(t.size() == 5);
  CHECK(t[4] == 0.0);
}

TEST_CASE("rate fit") {
  std::vector<std::pair<double, double>> pts;
  for (double n : {10., 20., 40., 80.}) pts.emplace_back(n, 3.0 / n);
  const auto f = fit_rate(pts);
  CHECK(f.slope == doctest::Approx(-1.0));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK_THROWS(fit_rate({{1, 1}, {2, 0.5}}));
}

TEST_CASE("configuration is validated") {
  auto cfg = small_config();
  cfg.alpha = 1.0;
  CHECK_THROWS(run_contraction_experiment(cfg));
  cfg = small_config();
  cfg.replicates = 0;
  CHECK_THROWS(run_contraction_experiment(cfg));
  cfg = small_config();
  cfg.theta0 = Vector::Zero(3);
  CHECK_THROWS(run_contraction_experiment(cfg));
}

TEST_CASE("CSV round trip and JSON sidecar") {
  const auto r = run_contraction_experiment(small_config());
  const auto dir = std::filesystem::temp_directory_path() / "mibounds_test_emit";
  std::filesystem::create_directories(dir);
  emit_results(r, (dir / "r.csv").string(), (dir / "r.json").string());
  const auto back = read_results_csv((dir / "r.csv").string());
  REQUIRE(back.size() == r.points.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].n == r.points[i].n);
    CHECK(back[i].mc_mean == r.points[i].mc_mean);
    CHECK(back[i].bound_rhs == r.points[i].bound_rhs);
  }
  CHECK(results_csv(r).rfind("n,mc_mean,mc_se,bound_rhs,slack\n", 0) == 0);
  CHECK(results_json(r)["schema"] == 1);
  CHECK(format_real(0.1) == "0.10000000000000001");
  std::filesystem::remove_all(dir);
}

TEST_CASE("mutual information check") {
  const auto rep = verify_mi_bound(GaussianMeanModel(1, 1), GaussianMeasure::isotropic(1, 0, 1), 0.5,
                                   1, Vector::Zero(1), 20000, 3, 1.0, 2);
  CHECK(rep.mi == doctest::Approx(0.202733).epsilon(1e-5));
  CHECK(rep.holds);
  CHECK(rep.lhs_mean == doctest::Approx(0.3125).epsilon(0.03));
  CHECK(rep.decomposition_lhs_mean == doctest::Approx(rep.decomposition_rhs).epsilon(0.03));
}

TEST_CASE("high probability check") {
  const auto rep = verify_highprob_bound(GaussianMeanModel(1, 1), GaussianMeasure::isotropic(1, 0, 1),
                                         0.5, 1000, Vector::Zero(1), 0.1, 0.1, 500, 1);
  CHECK(rep.level == doctest::Approx(0.8));
  CHECK(rep.rhs == doctest::Approx(0.10909).epsilon(1e-4));
  CHECK(rep.holds);
  CHECK_FALSE(rep.low_confidence);
  const auto tiny = verify_highprob_bound(GaussianMeanModel(1, 1),
                                          GaussianMeasure::isotropic(1, 0, 1), 0.5, 1000,
                                          Vector::Zero(1), 0.1, 0.1, 5, 1);
  CHECK(tiny.low_confidence);
}

TEST_CASE("MLE experiment") {
  const auto g = run_mle_experiment(GaussianMeanModel(1, 1), Vector::Zero(1), 3.0, 0.5,
                                    {100, 400, 1600}, 4000, 5);
  CHECK(g.bound_holds);
  CHECK(g.slack_increasing);
  for (const auto& p : g.points) CHECK(p.mc_mean * p.n == doctest::Approx(1.0).epsilon(0.1));
  const auto p = run_mle_experiment(poisson_family(0, 1), scalar_param(0.5), 3.0, 0.5,
                                    {100, 400, 1600}, 2000, 5);
  CHECK(p.bound_holds);
}
