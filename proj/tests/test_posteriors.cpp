#include "mibounds/posteriors.hpp"
#include "mibounds/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace mibounds;

TEST_CASE("fractional posterior closed form") {
  const auto prior = GaussianMeasure::isotropic(1, 0.0, 1.0);
  const auto post = fractional_posterior_gaussian(prior, 0.5, 100, scalar_param(0.2), 1.0);
  CHECK(post.var_diag[0] == doctest::Approx(1.0 / 51));
  CHECK(post.mean[0] == doctest::Approx(50 * 0.2 / 51));
  // prior mean enters through its precision weight
  const GaussianMeasure shifted(scalar_param(1.0), scalar_param(4.0));
  const auto p2 = fractional_posterior_gaussian(shifted, 1.0, 3, scalar_param(0.0), 2.0);
  CHECK(p2.mean[0] == doctest::Approx((1.0 / 4) / (1.0 / 4 + 3.0 / 4)));
  CHECK_THROWS(fractional_posterior_gaussian(prior, 0.0, 10, scalar_param(0), 1));
  CHECK_THROWS(GaussianMeasure(Vector::Zero(2), Vector::Constant(2, -1.0)));
}

TEST_CASE("fractional posterior from a sample matches the sufficient statistic form") {
  const GaussianMeanModel m(2, 1.5);
  const auto prior = GaussianMeasure::isotropic(2, 0.3, 2.0);
  const auto s = sample(m, Vector::Constant(2, 1.0), 25, 4);
  const auto a = fractional_posterior_gaussian(m, prior, 0.7, s);
  const auto b = fractional_posterior_gaussian(prior, 0.7, 25, s.mean(), 1.5);
  CHECK((a.mean - b.mean).norm() < 1e-14);
  CHECK((a.var_diag - b.var_diag).norm() < 1e-14);
}

TEST_CASE("localized prior") {
  const auto base = GaussianMeasure::isotropic(2, 0.0, 1.0);
  const Vector t0 = Vector::Constant(2, 1.0);
  const auto same = localized_prior_gaussian({0.0, base, t0}, 1.0);
  CHECK(same.mean == base.mean);
  CHECK(same.var_diag == base.var_diag);
  const auto loc = localized_prior_gaussian({3.0, base, t0}, 1.0);
  CHECK(loc.var_diag[0] == doctest::Approx(0.25));
  CHECK(loc.mean[0] == doctest::Approx(0.75));
  // beta -> infinity concentrates at theta0
  const auto far = localized_prior_gaussian({1e9, base, t0}, 1.0);
  CHECK((far.mean - t0).norm() < 1e-8);
}

TEST_CASE("expectations under a Gaussian measure versus Monte Carlo") {
  const GaussianMeasure q(Vector::Constant(1, 0.4), Vector::Constant(1, 0.09));
  const Vector t0 = Vector::Zero(1);
  const double v = 1.3;
  CounterRng r(9);
  double kl = 0, vv = 0;
  const int R = 400000;
  for (int i = 0; i < R; ++i) {
    const double th = 0.4 + 0.3 * r.normal();
    kl += th * th / (2 * v * v);
    vv += th * th * (1 + 4 * v * v) / (2 * v * v * v * v);
  }
  CHECK(expected_kl_under(q, t0, v) == doctest::Approx(kl / R).epsilon(5e-3));
  CHECK(expected_v_under(q, t0, v) == doctest::Approx(vv / R).epsilon(5e-3));
  CHECK(expected_renyi_under(q, 0.3, t0, v) == doctest::Approx(0.3 * expected_kl_under(q, t0, v)));
  // E_rho r_n is the closed-form average of the shortcut formula
  const Vector xbar = scalar_param(0.1);
  const double want = 10 / (2 * v * v) * ((0.1 - 0.4) * (0.1 - 0.4) + 0.09 - 0.01);
  CHECK(expected_rn_under(q, t0, xbar, 10, v) == doctest::Approx(want));
}

TEST_CASE("KL between diagonal Gaussians") {
  const GaussianMeasure p(scalar_param(0.0), scalar_param(1.0));
  const GaussianMeasure q(scalar_param(1.0), scalar_param(2.0));
  CHECK(kl_gaussian_measures(p, p) == 0.0);
  CHECK(kl_gaussian_measures(p, q) == doctest::Approx(0.5 * (0.5 + 0.5 - 1 + std::log(2.0))));
}

TEST_CASE("mutual information closed form") {
  const GaussianMeanModel m(1, 1.0);
  const auto prior = GaussianMeasure::isotropic(1, 0.0, 1.0);
  CHECK(mutual_information_gaussian(m, prior, 1.0, 1, Vector::Zero(1)) ==
        doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-14));
  // decomposition E_S KL(rho||pi) = I + KL(E_S rho || pi)
  for (double a : {0.3, 1.0}) {
    for (double t : {0.0, 1.2}) {
      const Vector t0 = scalar_param(t);
      const double lhs = expected_posterior_kl_to_prior(prior, a, 7, t0, 1.0);
      const double rhs = mutual_information_gaussian(m, prior, a, 7, t0) +
                         kl_gaussian_measures(posterior_marginal_gaussian(prior, a, 7, t0, 1.0), prior);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("sequence prior") {
  const auto p = sequence_prior(GaussianSequenceModel(1.0, 1.0, 4));
  CHECK(p.dim() == 4);
  CHECK(p.var_diag[3] == doctest::Approx(std::pow(4.0, -3.0)));
}
