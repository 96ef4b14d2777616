#include "mibounds/config.hpp"
#include "mibounds/models.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mibounds;

TEST_CASE("model validation") {
  CHECK_THROWS_AS(GaussianMeanModel(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianMeanModel(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianSequenceModel(0.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(poisson_family(1.0, 0.0), std::invalid_argument);
  CHECK_NOTHROW(bernoulli_family(-1, 1));
  CHECK_THROWS_AS(poisson_family(0, 1).require_domain(2.0, "t"), std::domain_error);
}

TEST_CASE("exponential family curvature constants") {
  const auto p = poisson_family(0, 1);
  CHECK(p.strong_convexity == doctest::Approx(1.0));
  CHECK(p.grad_lipschitz == doctest::Approx(std::exp(1.0)));
  CHECK(p.kappa() == doctest::Approx(std::exp(1.0)));
  const auto b = bernoulli_family(-1, 1);
  CHECK(b.grad_lipschitz == 0.25);
  CHECK(b.strong_convexity == doctest::Approx(std::exp(-1.0) / std::pow(1 + std::exp(-1.0), 2)));
}

TEST_CASE("densities normalize") {
  const auto p = poisson_family(0, 1);
  double s = 0;
  for (int k = 0; k < 60; ++k) s += std::exp(p.log_density(0.7, k));
  CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  const ModelSpec b = bernoulli_family(-1, 1);
  CHECK(std::exp(log_density(b, scalar_param(0.3), scalar_param(0))) +
            std::exp(log_density(b, scalar_param(0.3), scalar_param(1))) ==
        doctest::Approx(1.0));
  CHECK(std::isinf(log_density(b, scalar_param(0.3), scalar_param(2))));
}

TEST_CASE("sampling is deterministic per seed and matches the law") {
  const ModelSpec m = GaussianMeanModel(2, 2.0);
  Vector t0(2);
  t0 << 1.0, -1.0;
  const auto a = sample(m, t0, 50000, 3);
  const auto b = sample(m, t0, 50000, 3);
  CHECK(a.data == b.data);
  CHECK((a.mean() - t0).cwiseAbs().maxCoeff() < 0.04);
  const auto p = sample(poisson_family(0, 1), scalar_param(0.5), 50000, 1);
  CHECK(p.mean()[0] == doctest::Approx(std::exp(0.5)).epsilon(0.01));
  CHECK_THROWS(sample(m, Vector::Zero(3), 5, 1));
}

TEST_CASE("neg log likelihood ratio equals the Gaussian shortcut") {
  const GaussianMeanModel g(3, 1.5);
  const Vector t0 = Vector::Constant(3, 0.2);
  const Vector t = Vector::Constant(3, -0.4);
  const auto s = sample(g, t0, 40, 8);
  CHECK(neg_log_lik_ratio(g, t, t0, s) ==
        doctest::Approx(neg_log_lik_ratio_gaussian(t, t0, s.mean(), s.n, 1.5)).epsilon(1e-10));
  CHECK(neg_log_lik_ratio(g, t0, t0, s) == 0.0);
}

TEST_CASE("sequence model") {
  const GaussianSequenceModel m(1.0, 1.0, 50);
  const Vector t = smooth_sequence_theta0(m);
  CHECK(m.admits(t));
  CHECK(m.sobolev_norm_sq(t) < 0.99);
  CHECK(t[0] == doctest::Approx(std::sqrt(0.99 * 6 / (M_PI * M_PI))));
  CHECK(m.prior_variance(2) == doctest::Approx(0.125));
  CHECK_THROWS(sample(m, Vector::Constant(50, 1.0), 3, 1));
}

TEST_CASE("config parsing") {
  std::istringstream in("# comment\nfamily = gaussian\ndim = 3\n\ntheta0 = 1, 2,3 # tail\nv=2\n");
  const auto cfg = parse_config(in);
  CHECK(config_get(cfg, "family").value() == "gaussian");
  CHECK(config_int(cfg, "dim", 0) == 3);
  CHECK(config_real(cfg, "missing", 4.5) == 4.5);
  const auto mc = model_from_config(cfg);
  CHECK(std::get<GaussianMeanModel>(mc.model).noise_sd == 2.0);
  CHECK(mc.theta0[2] == 3.0);
  CHECK(parse_int_list("50,100, 200") == std::vector<long>{50, 100, 200});
  CHECK_THROWS(parse_real_list("1,x"));
  std::istringstream bad("novalue\n");
  CHECK_THROWS(parse_config(bad));
  std::istringstream seq("family = sequence\nb = 2\nn_trunc = 10\n");
  const auto s = model_from_config(parse_config(seq));
  CHECK(std::get<GaussianSequenceModel>(s.model).n_trunc == 10);
  CHECK(s.theta0.size() == 10);
  std::istringstream pois("family = poisson\n");
  CHECK(model_from_config(parse_config(pois)).theta0[0] == 0.5);
}
