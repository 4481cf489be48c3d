#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tailsim/rng.hpp"
#include "tailsim/stats.hpp"

using namespace tailsim;

TEST_CASE("mean report") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  auto r = stats::mean_report(v, 42);
  CHECK(r.estimate == doctest::Approx(2.5));
  CHECK(r.n == 4);
  CHECK(r.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(r.ci_low == doctest::Approx(r.estimate - 1.96 * r.std_error));
  CHECK(r.ci_high == doctest::Approx(r.estimate + 1.96 * r.std_error));
  CHECK(r.seed == 42);
}

TEST_CASE("chi square survival function") {
  // dof = 2 is exponential: Q(x) = exp(-x/2)
  for (double x : {0.5, 1.0, 3.0, 8.0})
    CHECK(stats::chi_square_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-10));
  // classical table value: P(chi2_1 > 3.841) ~ 0.05
  CHECK(stats::chi_square_sf(3.841, 1.0) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(stats::chi_square_sf(18.307, 10.0) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("kolmogorov distribution") {
  // K(1.36) ~ 0.049 (the familiar 5% critical value)
  CHECK(stats::kolmogorov_sf(1.36) == doctest::Approx(0.049).epsilon(0.02));
  CHECK(stats::kolmogorov_sf(0.0) == 1.0);
  CHECK(stats::kolmogorov_sf(3.0) < 1e-6);
}

TEST_CASE("ks test calibration on uniforms") {
  // p-values of a correct null should rarely be tiny
  int rejections = 0;
  for (int rep = 0; rep < 50; ++rep) {
    auto gen = rng::substream(99, rep);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> sample(2000);
    for (auto& x : sample) x = u(gen);
    if (stats::ks_pvalue(stats::ks_statistic_uniform(sample), sample.size()) < 0.01) ++rejections;
  }
  CHECK(rejections <= 3);
}

TEST_CASE("two sample ks") {
  auto gen = rng::substream(7, 0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> a(3000), b(3000), c(3000);
  for (auto& x : a) x = z(gen);
  for (auto& x : b) x = z(gen);
  for (auto& x : c) x = z(gen) + 0.5;
  double same = stats::two_sample_ks_statistic(a, b);
  double diff = stats::two_sample_ks_statistic(a, c);
  CHECK(stats::two_sample_ks_pvalue(same, a.size(), b.size()) > 1e-3);
  CHECK(stats::two_sample_ks_pvalue(diff, a.size(), c.size()) < 1e-6);
}

TEST_CASE("chi square gof") {
  std::vector<double> obs{48, 52, 100};
  std::vector<double> exp{50, 50, 100};
  auto r = stats::chi_square_gof(obs, exp, 0);
  CHECK(r.dof == 2.0);
  CHECK(r.pvalue > 0.5);
  CHECK_THROWS_AS(stats::chi_square_gof(obs, std::vector<double>{50, 50, 0}, 0),
                  std::invalid_argument);
}

TEST_CASE("wilson interval") {
  auto w = stats::wilson_interval(50, 100);
  CHECK(w.low > 0.39);
  CHECK(w.high < 0.61);
  CHECK(w.low < 0.5);
  CHECK(w.high > 0.5);
}

TEST_CASE("paired check") {
  std::vector<double> a{1, 2, 3, 4, 5};
  std::vector<double> b{1.1, 2.1, 2.9, 4.0, 5.1};
  auto c = stats::paired_check(a, b, 1);
  CHECK(std::abs(c.zscore) < 3.0);
}

TEST_CASE("replicate is worker-count invariant") {
  auto f = [](std::size_t i, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(gen) + static_cast<double>(i) * 1e-9;
  };
  auto one = rng::replicate_doubles(5000, 123, 1, f);
  auto four = rng::replicate_doubles(5000, 123, 4, f);
  auto seven = rng::replicate_doubles(5000, 123, 7, f);
  CHECK(one == four);
  CHECK(one == seven);
}

TEST_CASE("replicate propagates exceptions") {
  CHECK_THROWS_AS(rng::replicate_doubles(1000, 1, 4,
                                         [](std::size_t i, std::mt19937_64&) -> double {
                                           if (i == 700) throw std::runtime_error("boom");
                                           return 0.0;
                                         }),
                  std::runtime_error);
}

TEST_CASE("named stream derivation separates streams") {
  CHECK(rng::derive(1, "a") != rng::derive(1, "b"));
  CHECK(rng::derive(1, "a") != rng::derive(2, "a"));
}
