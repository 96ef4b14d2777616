#include "mibounds/assumptions.hpp"
#include "mibounds/posteriors.hpp"

#include <doctest.h>

#include <cmath>

using namespace mibounds;

TEST_CASE("Gaussian dimension certificate") {
  const GaussianMeanModel m(1, 1.0);
  const auto c = certify_assumption2_gaussian(m, GaussianMeasure::isotropic(1, 0, 1), Vector::Zero(1));
  CHECK(c.d_pi == 0.5);
  CHECK(c.kappa_pi == 1.0);
  CHECK(c.empirical_sup <= c.d_pi + 1e-12);
  CHECK(c.termwise_sup.value() == doctest::Approx(0.5).epsilon(1e-6));
  const Vector t0 = Vector::Constant(2, 2.0);
  const auto c2 = certify_assumption2_gaussian(GaussianMeanModel(2, 1.0),
                                               GaussianMeasure::isotropic(2, 0, 1), t0);
  CHECK(c2.d_pi == doctest::Approx(1.0 + 8.0 / 8));
  CHECK(c2.empirical_sup < c2.d_pi);
  CHECK(std::fabs(c2.termwise_sup.value() - c2.d_pi) < 1e-6);
  const auto j = c2.to_json();
  CHECK(j["d_pi"].get<double>() == c2.d_pi);
  CHECK(j.contains("beta_grid"));
}

TEST_CASE("sup is monotone envelope of the grid values") {
  // beta E_{pi_-beta} KL at any beta is below d_pi
  const GaussianMeanModel m(1, 0.7);
  const auto prior = GaussianMeasure::isotropic(1, 0.3, 2.0);
  const Vector t0 = scalar_param(-1.0);
  const auto c = certify_assumption2_gaussian(m, prior, t0);
  for (double beta : log_space(1e-4, 1e7, 97)) {
    const auto loc = localized_prior_gaussian({beta, prior, t0}, 0.7);
    CHECK(beta * expected_kl_under(loc, t0, 0.7) <= c.d_pi + 1e-12);
  }
}

TEST_CASE("sequence certificate") {
  const GaussianSequenceModel m(1.0, 1.0, 200);
  const auto c = certify_assumption2_sequence(m, smooth_sequence_theta0(m));
  CHECK(c.kappa_pi == doctest::Approx(2.0 / 3));
  CHECK(c.d_pi == doctest::Approx(2.25));
  CHECK(c.empirical_sup <= c.d_pi);
}

TEST_CASE("assumption 3 and 4") {
  const GaussianMeanModel m(2, 2.0);
  const auto prior = GaussianMeasure::isotropic(2, 0, 1);
  const Vector t0 = Vector::Constant(2, 0.5);
  const auto c3 = certify_assumption3_gaussian(m, prior, t0);
  CHECK(c3.d_pi_prime.value() / c3.d_pi == (1 + 4 * 4.0) / 4.0);
  CHECK(c3.empirical_sup_prime.value() <= c3.d_pi_prime.value());
  const auto c4 = certify_assumption4_conjugate(m, prior, t0, 0.5, 100, MeanFieldFamily{2});
  CHECK(c4.d_pi == doctest::Approx(c3.d_pi));
}

TEST_CASE("uniform prior") {
  const ModelSpec g = GaussianMeanModel(1, 1.0);
  // for large beta, beta E KL -> 1/2 for a quadratic KL
  CHECK(uniform_localized_beta_kl(g, 1.0, 0.0, 1e6) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(uniform_localized_beta_kl(g, 1.0, 0.0, 1e-6) == doctest::Approx(1e-6 / 6).epsilon(1e-4));
  const auto c = certify_assumption2_uniform_1d(g, 1.0, 0.0);
  CHECK(c.d_pi == doctest::Approx(0.5));
  CHECK(c.method == "grid_sup");
  const auto p = certify_assumption2_uniform_1d(poisson_family(-1, 1), 0.5, 0.25);
  CHECK(p.d_pi >= 0.5);
  CHECK(p.d_pi <= std::pow(std::exp(2.0), 1.5) / 2);
}
