#include "mibounds/posteriors.hpp"
#include "mibounds/variational.hpp"

#include <doctest.h>

#include <cmath>

using namespace mibounds;

TEST_CASE("objective is minimized by the fractional posterior") {
  const GaussianMeanModel m(1, 1.0);
  const auto prior = GaussianMeasure::isotropic(1, 0.0, 1.0);
  const Vector t0 = scalar_param(0.5);
  const auto s = sample(m, t0, 30, 2);
  const auto exact = fractional_posterior_gaussian(m, prior, 0.5, s);
  const double best = variational_objective(m, prior, 0.5, s, t0, exact);
  for (double dm : {-0.05, 0.05}) {
    GaussianMeasure q = exact;
    q.mean[0] += dm;
    CHECK(variational_objective(m, prior, 0.5, s, t0, q) > best);
    q = exact;
    q.var_diag[0] *= 1 + dm;
    CHECK(variational_objective(m, prior, 0.5, s, t0, q) > best);
  }
  CHECK(variational_objective_gaussian(prior, 0.5, 30, s.mean(), t0, 1.0, exact) ==
        doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("solver recovers the conjugate posterior") {
  const auto prior = GaussianMeasure(Vector::Constant(3, 0.2), Vector::Constant(3, 0.5));
  Vector xbar(3);
  xbar << 1.0, -2.0, 0.3;
  const auto exact = fractional_posterior_gaussian(prior, 0.4, 50, xbar, 1.2);
  const auto sol =
      solve_variational_gaussian(prior, 0.4, 50, xbar, Vector::Zero(3), 1.2, MeanFieldFamily{3});
  CHECK(sol.converged);
  CHECK((sol.q.mean - exact.mean).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((sol.q.var_diag - exact.var_diag).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("box constraints are respected") {
  const auto prior = GaussianMeasure::isotropic(1, 0.0, 1.0);
  MeanFieldFamily fam{1};
  fam.mean_lo = scalar_param(-0.1);
  fam.mean_hi = scalar_param(0.1);
  const auto sol =
      solve_variational_gaussian(prior, 0.5, 100, scalar_param(2.0), Vector::Zero(1), 1.0, fam);
  CHECK(fam.contains(sol.q));
  CHECK(sol.q.mean[0] == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("exponential family route") {
  const auto fam = poisson_family(0, 1);
  const ModelSpec m = fam;
  const auto prior = GaussianMeasure::isotropic(1, 0.5, 0.04);
  const Vector t0 = scalar_param(0.5);
  const auto s = sample(m, t0, 200, 5);
  const auto sol = solve_variational(m, prior, 0.5, s, t0, MeanFieldFamily{1});
  CHECK(fam.contains(sol.q.mean[0]));
  CHECK(sol.q.var_diag[0] < 0.04);
  CHECK(sol.objective <= variational_objective(m, prior, 0.5, s, t0, prior));
}
