#include "mibounds/numerics.hpp"
#include "mibounds/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace mibounds;

TEST_CASE("counter rng is a pure function of seed, stream and position") {
  CounterRng a(5, 3), b(5, 3), c(5, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
  CHECK(stream_id(1, 2) != stream_id(2, 1));
}

TEST_CASE("rng moments") {
  CounterRng r(1);
  double s = 0, s2 = 0, u = 0, p = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    const double x = r.uniform();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    u += x;
    p += static_cast<double>(r.poisson(3.0));
  }
  CHECK(std::fabs(s / n) < 0.01);
  CHECK(std::fabs(s2 / n - 1) < 0.02);
  CHECK(std::fabs(u / n - 0.5) < 0.005);
  CHECK(std::fabs(p / n - 3.0) < 0.02);
}

TEST_CASE("adaptive simpson against closed forms") {
  const auto r = adaptive_simpson([](double x) { return std::exp(-x * x); }, -8, 8, 1e-12);
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-11));
  const std::vector<double> br{-10, -1, 0, 1, 10};
  const auto p = adaptive_simpson_panels([](double x) { return std::exp(-std::fabs(x)); }, br, 1e-12);
  CHECK(p.value == doctest::Approx(2 * (1 - std::exp(-10.0))).epsilon(1e-11));
}

TEST_CASE("gauss-hermite integrates polynomials exactly") {
  const auto& rule = gauss_hermite(20);
  CHECK(rule.weights.sum() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(expect_normal([](double x) { return x * x; }, 1.0, 2.0, rule) ==
        doctest::Approx(5.0).epsilon(1e-12));
  CHECK(expect_normal([](double x) { return x * x * x * x; }, 0.0, 1.0, rule) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("series summation") {
  const auto r = sum_series([](long k) { return std::pow(0.5, static_cast<double>(k)); }, 0,
                            std::numeric_limits<long>::max(), 1e-15);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-14));
  const auto f = sum_series([](long k) { return static_cast<double>(k); }, 1, 100);
  CHECK(f.value == 5050.0);
}

TEST_CASE("minimizers") {
  const auto g = golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, -1, 2, 1e-10);
  CHECK(g.x == doctest::Approx(0.3).epsilon(1e-8));
  const auto b = bracket_and_minimize([](double x) { return std::cosh(x - 7.0); }, 0.0, 0.5);
  CHECK(b.x == doctest::Approx(7.0).epsilon(1e-7));
  const auto c = bracket_and_minimize([](double x) { return x; }, 0.5, 0.1, 1e-10, 0.0, 1.0);
  CHECK(c.x >= 0.0);
  CHECK(c.x < 1e-6);
}

TEST_CASE("pairwise sum is order-stable and accurate") {
  std::vector<double> v(100000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(10000.0).epsilon(1e-14));
  const auto ms = mean_and_se(v);
  CHECK(ms.mean == doctest::Approx(0.1));
  CHECK(ms.se == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sample_quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(sample_quantile({1, 2, 3, 4, 5}, 0.8) == doctest::Approx(4.2));
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("grids") {
  const auto l = log_space(1e-3, 1e6, 200);
  CHECK(l.size() == 200);
  CHECK(l.front() == doctest::Approx(1e-3));
  CHECK(l.back() == doctest::Approx(1e6));
  const auto g = lin_space(-0.5, 0.5, 101);
  CHECK(g[50] == doctest::Approx(0.0));
}
