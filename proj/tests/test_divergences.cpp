#include "mibounds/divergences.hpp"

#include <doctest.h>

#include <cmath>

using namespace mibounds;

TEST_CASE("Gaussian closed forms and oracles") {
  CHECK(kl_gaussian(scalar_param(0), scalar_param(1), 1).value == 0.5);
  CHECK(renyi_gaussian(0.5, scalar_param(0), scalar_param(1), 1).value == 0.25);
  for (double v : {0.5, 1.0, 2.0}) {
    for (double d : {-1.5, 0.3, 2.0}) {
      CHECK(kl_gaussian(scalar_param(0.1), scalar_param(0.1 + d), v).value ==
            doctest::Approx(kl_oracle_gaussian(0.1, 0.1 + d, v).value).epsilon(1e-9));
      CHECK(renyi_gaussian(0.3, scalar_param(0.1), scalar_param(0.1 + d), v).value ==
            doctest::Approx(renyi_oracle_gaussian(0.3, 0.1, 0.1 + d, v).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("exponential family closed forms agree with oracles") {
  const auto p = poisson_family(0, 1);
  CHECK(kl_expfam(p, 0, 1).value == doctest::Approx(std::exp(1.0) - 2).epsilon(1e-14));
  for (const auto& fam : {p, bernoulli_family(-1, 1), gaussian_natural_family(1.3, -3, 3)}) {
    for (double t0 : {fam.theta_lo, 0.5 * (fam.theta_lo + fam.theta_hi)}) {
      for (double t : lin_space(fam.theta_lo, fam.theta_hi, 7)) {
        CHECK(std::fabs(kl_expfam(fam, t0, t).value - kl_oracle(fam, t0, t).value) < 1e-9);
        CHECK(std::fabs(renyi_expfam(fam, 0.4, t0, t).value -
                        renyi_oracle(fam, 0.4, t0, t).value) < 1e-8);
        CHECK(std::fabs(hellinger_sq(fam, scalar_param(t), scalar_param(t0)).value -
                        hellinger_oracle(fam, t, t0).value) < 1e-9);
      }
    }
  }
}

TEST_CASE("divergence invariants") {
  const ModelSpec fam = poisson_family(0, 1);
  const ModelSpec g = GaussianMeanModel(2, 1.0);
  Vector a(2), b(2);
  a << 0.1, -0.3;
  b << 0.7, 0.4;
  for (const auto& [m, x, y] : {std::tuple{fam, scalar_param(0.2), scalar_param(0.9)},
                                std::tuple{g, a, b}}) {
    CHECK(kl_divergence(m, x, x).value == 0.0);
    CHECK(renyi_divergence(m, 0.5, x, x).value == 0.0);
    double prev = 0;
    for (double al : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double r = renyi_divergence(m, al, x, y).value;
      CHECK(r >= 0.0);
      CHECK(r >= prev);  // nondecreasing in alpha
      CHECK(r <= kl_divergence(m, y, x).value + 1e-15);  // D_alpha(P_y||P_x) <= KL(P_y||P_x)
      prev = r;
      // D_alpha(Q||P) = alpha/(1-alpha) D_{1-alpha}(P||Q)
      const double swapped = renyi_divergence(m, al, y, x).value;
      const double mirrored = renyi_divergence(m, 1 - al, x, y).value;
      CHECK(swapped == doctest::Approx(al / (1 - al) * mirrored).epsilon(1e-12));
    }
    // H^2 = 2(1 - exp(-D_{1/2}/2)), bounded by 2
    const double h = hellinger_sq(m, x, y).value;
    CHECK(h == doctest::Approx(2 * (1 - std::exp(-renyi_divergence(m, 0.5, x, y).value / 2))));
    CHECK(h <= 2.0);
  }
}

TEST_CASE("Hellinger quadrature route") {
  const ModelSpec g = GaussianMeanModel(1, 1.0);
  const auto cf = hellinger_sq(g, scalar_param(0), scalar_param(1));
  const auto q = hellinger_sq(g, scalar_param(0), scalar_param(1), true);
  CHECK(q.method == DivergenceMethod::quadrature);
  CHECK(cf.value == doctest::Approx(q.value).epsilon(1e-10));
  CHECK(cf.value == doctest::Approx(2 * (1 - std::exp(-1.0 / 8))));
}

TEST_CASE("domain violations throw") {
  const auto p = poisson_family(0, 1);
  CHECK_THROWS_AS(kl_expfam(p, 0, 2), std::domain_error);
  CHECK_THROWS(renyi_expfam(p, 1.5, 0, 1));
}

TEST_CASE("c(alpha) certificates") {
  const auto g = certify_c_alpha(GaussianMeanModel(1, 1.0), 0.5);
  CHECK(g.c_alpha == 2.0);
  CHECK(g.worst_ratio == doctest::Approx(2.0));
  const auto p = certify_c_alpha(poisson_family(0, 1), 0.5);
  CHECK(p.c_alpha == doctest::Approx(2 * std::exp(1.0)));
  CHECK(p.worst_ratio <= p.c_alpha);
  CHECK(p.pairs_checked > 0);
}

TEST_CASE("Fisher information and local expansions") {
  const auto fi = fisher_info(poisson_family(0, 1), 0.5, 0.5);
  CHECK(fi.i0 == doctest::Approx(std::exp(0.5)));
  CHECK(fi.i_lo == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fi.i_hi == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(fi.i1_bound == doctest::Approx(std::exp(1.0)).epsilon(1e-4));
  const auto rep = fisher_expansion_check(poisson_family(0, 1), 0.5, lin_space(-0.5, 0.5, 21));
  CHECK(rep.sandwiches_hold());
  CHECK(rep.ratios.size() == 3);
  CHECK(std::fabs(rep.ratio_limit - 1.0) < 1e-3);
  // Gaussian: H^2 = 2(1 - e^{-D^2/8}) sits strictly below D^2/4.
  const auto g = fisher_expansion_check(GaussianMeanModel(1, 1.0), 0.0, {-0.2, 0.0, 0.2});
  CHECK(g.violations.size() == 2);
  CHECK(g.ratio_limit == doctest::Approx(1.0).epsilon(1e-6));
}
