#include "mibounds/bounds.hpp"
#include "mibounds/mle.hpp"

#include <doctest.h>

#include <cmath>

using namespace mibounds;

TEST_CASE("bound formulas reproduce worked values") {
  CHECK(bound_localized_opt(2, 1, 1, 0.5, 100).rhs == doctest::Approx(0.32));
  CHECK(bound_gaussian_kl(1, 0, 1, 0.5, 100).rhs == doctest::Approx(0.16));
  CHECK(bound_mi(0.202733, 1, 0.5).rhs == doctest::Approx(0.405466));
  CHECK(bound_gaussian_l2(1, 0, 1, 1, 0.5, 100).rhs == doctest::Approx(0.32));
  const auto hp = bound_highprob(2, 0.5, 2.5, 1, 0.5, 1000, 0.1, 0.1);
  CHECK(hp.valid);
  CHECK(hp.rhs == doctest::Approx(0.5 * std::pow(4.0 / 1.5, 2) * 3.0 / 1000 +
                                  4 * (10 + std::log(10.0)) / 500));
  CHECK(bound_mle(0.25, 1, std::log(600.0), 0.5, 100).rhs ==
        doctest::Approx((2 * 0.5 + 2 * std::log(600.0)) / (0.25 * 0.5) / 100 + 1e-4));
}

TEST_CASE("optimized localized bound dominates the general bound at beta = n(1-alpha)/(2c)") {
  for (double a : {0.2, 0.5, 0.8}) {
    for (double k : {0.5, 1.0}) {
      const double c = 1 / a, n = 300;
      const auto opt = bound_localized_opt(c, 1.7, k, a, n);
      const auto gen = bound_localized_general(c, 1.7, k, a, n * (1 - a) / (2 * c), n);
      // the optimized form drops the -beta in the numerator
      const double dropped = 1.7 * std::pow(2 * c / (n * (1 - a)), k);
      CHECK(opt.rhs >= gen.rhs);
      CHECK(opt.rhs == doctest::Approx(gen.rhs + dropped).epsilon(1e-12));
      CHECK(opt.ingredients.at("beta") == doctest::Approx(n * (1 - a) / (2 * c)));
    }
  }
}

TEST_CASE("bounds shrink with n and grow with the dimension constant") {
  double prev = INFINITY;
  for (double n : {10., 100., 1000.}) {
    const double r = bound_localized_opt(2, 1, 1, 0.5, n).rhs;
    CHECK(r < prev);
    prev = r;
  }
  CHECK(bound_localized_opt(2, 2, 1, 0.5, 100).rhs > bound_localized_opt(2, 1, 1, 0.5, 100).rhs);
}

TEST_CASE("invalid ingredients give invalid reports") {
  CHECK_FALSE(bound_mi(0.1, 10, 1.0).valid);
  CHECK(std::isnan(bound_mi(0.1, 10, 1.0).rhs));
  CHECK_FALSE(bound_localized_general(2, 1, 1, 0.5, 1e6, 100).valid);
  CHECK_FALSE(bound_highprob(2, 1, 1, 1, 0.5, 100, 0.0, 0.1).valid);
  CHECK_FALSE(bound_pacbayes_expectation(0.5, 0, 1, 1).valid);
  CHECK_FALSE(bound_mle(0, 1, 1, 0.5, 10).valid);
  CHECK(canonical_formula_id("thm31_opt") == formula::localized_opt);
  CHECK(canonical_formula_id("mle") == formula::mle);
  CHECK(canonical_formula_id("nope").empty());
  const auto j = bound_mi(0.2, 1, 0.5).to_json();
  CHECK(j["formula_id"] == "mi");
}

TEST_CASE("PAC-Bayes and localized forms") {
  CHECK(bound_pacbayes_expectation(0.5, 10, 2, 3).rhs == doctest::Approx((1 + 3) / 5.0));
  CHECK(bound_pacbayes_probability(0.5, 10, 2, 3, std::exp(-1.0)).rhs ==
        doctest::Approx((1 + 4) / 5.0));
  const double c = 2, a = 0.5, b = 10, n = 100;
  CHECK(bound_localized_expectation(c, a, b, n, 0.01, 0.5).rhs ==
        doctest::Approx(c * n / (n * (1 - a) - b * c) * ((a - b / n) * 0.01 + 0.5 / n)));
  CHECK(bound_localized_probability(c, a, b, n, 0.01, 0.04, 0.5, 0.1, 0.1).rhs >
        bound_localized_expectation(c, a, b, n, 0.01, 0.5).rhs);
}

TEST_CASE("covering numbers") {
  const auto c = covering_number_box(3.0, 1, 0.01);
  CHECK(c.per_axis == 300);
  CHECK(c.log_count == doctest::Approx(std::log(300.0)));
  CHECK(covering_number_box(1.0, 2, 10.0).count == 1.0);
  CHECK(std::isinf(covering_number_box(3, 200, 1e-3).count));
  CHECK(std::isfinite(covering_number_box(3, 200, 1e-3).log_count));
}

TEST_CASE("epsilon net covers the box") {
  const CompactBox box(1.0, 2);
  const auto net = build_net(box, 0.25);
  CHECK(static_cast<double>(net.centers.size()) == covering_number_box(1.0, 2, 0.25).count);
  CounterRng r(3);
  for (int i = 0; i < 2000; ++i) {
    Vector t(2);
    t << 2 * r.uniform() - 1, 2 * r.uniform() - 1;
    const auto [idx, c] = net_projection(net, t);
    CHECK((c - t).norm() <= net.eps + 1e-12);
    CHECK(idx < net.centers.size());
  }
  CHECK_THROWS_AS(build_net(CompactBox(1.0, 8), 1e-3), std::length_error);
}

TEST_CASE("net is no larger than a greedy cover by more than a constant factor") {
  // A greedy cover of a sampled cloud is a lower-bound oracle for the minimal cover.
  const CompactBox box(1.0, 1);
  const double eps = 0.05;
  const auto net = build_net(box, eps);
  std::vector<double> pts = lin_space(-1, 1, 4001);
  std::vector<double> centers;
  for (double x : pts) {
    bool covered = false;
    for (double c : centers) covered = covered || std::fabs(c - x) <= eps;
    if (!covered) centers.push_back(x + eps);
  }
  CHECK(static_cast<double>(net.centers.size()) >= static_cast<double>(centers.size()) - 1);
  CHECK(net.centers.size() <= 2 * centers.size());
}

TEST_CASE("maximum likelihood estimators") {
  const CompactBox box(3.0, 2);
  Vector x(2);
  x << 4.0, -0.5;
  const Vector th = mle_gaussian(box, x);
  CHECK(th[0] == 3.0);
  CHECK(th[1] == -0.5);
  const auto p = poisson_family(0, 1);
  CHECK(mle_expfam(p, std::exp(0.3)) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(mle_expfam(p, 100.0) == 1.0);
  CHECK(mle_expfam(p, 0.0) == 0.0);
}
