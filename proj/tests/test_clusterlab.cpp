#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tailsim/clusterlab.hpp"
#include "tailsim/pathkit.hpp"
#include "tailsim/procsim.hpp"
#include "tailsim/rng.hpp"

using namespace tailsim;
using pathkit::Path;
using procsim::EtaLaw;
using procsim::JumpLaw;

namespace {
constexpr std::uint64_t kSeed = 0xb10c5;
}

TEST_CASE("block extraction") {
  Path p = Path::constant(0.0, 10.0, 3.0);
  auto blocks = clusterlab::extract_blocks(p, 2.0, 3.0);
  CHECK(blocks.blocks.size() == 5);
  CHECK(blocks.scaled_times.front() == doctest::Approx(0.2));
  CHECK(blocks.scaled_times.back() == doctest::Approx(1.0));
  for (const Path& b : blocks.blocks) {
    CHECK(b.window_start() == 0.0);  // recentred
    CHECK(b.scalar_value(1.0) == 1.0);  // constant path over its own scale
  }
  CHECK(blocks.discarded_fraction == 0.0);
  CHECK_THROWS_AS(clusterlab::extract_blocks(p, 20.0, 1.0), std::invalid_argument);

  // partition property: blocks tile the simulated path
  auto gen = rng::substream(kSeed, 0);
  Path shot = procsim::sim_shot_noise(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0), 10.0,
                                      gen)
                  .path;
  auto bl = clusterlab::extract_blocks(shot, 2.0, 1.0);
  for (std::size_t i = 0; i < bl.blocks.size(); ++i)
    for (double t = 0.0; t < 2.0; t += 0.037)
      CHECK(bl.blocks[i].scalar_value(t) == shot.scalar_value(t + 2.0 * double(i)));
}

TEST_CASE("cluster functionals") {
  auto Ke = clusterlab::K_exceedance();
  CHECK(Ke(Path::indicator(0, 1, 2.0)) == 1.0);
  CHECK(Ke(Path::indicator(0, 1, 0.5)) == 0.0);
  auto Kl = clusterlab::K_log();
  CHECK(Kl(Path::indicator(0, 2, std::exp(1.0))) == doctest::Approx(2.0));
  CHECK(Kl(Path::indicator(0, 2, 0.5)) == 0.0);
  clusterlab::check_shift_invariant(Kl, Path::indicator(0, 2, 3.0), kSeed);
  clusterlab::ClusterFunctional bad{"starts_late",
                                    [](const Path& p) { return p.window_start() > 0 ? 1.0 : 0.0; }};
  CHECK_THROWS_AS(clusterlab::check_shift_invariant(bad, Path::indicator(0, 1, 2.0), kSeed),
                  std::invalid_argument);
}

TEST_CASE("empirical cluster measure on shot noise") {
  auto model = procsim::make_shot_noise_model(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0));
  auto gen = rng::substream(kSeed, 1);
  double T = 20000.0;
  Path path = model->simulate(T, gen).path;
  double target = 68.0;
  double u = pathkit::occupation_quantile(path, 1.0 - target / T, 0.0, T);
  double marginal = clusterlab::empirical_exceedance_fraction(path, u);
  auto blocks = clusterlab::extract_blocks(path, 50.0, u);
  auto ke = clusterlab::empirical_cluster_measure(blocks, clusterlab::K_exceedance(), marginal,
                                                  kSeed);
  CHECK(std::abs(ke.estimate - 1.0) < 0.3);  // theta = 1 for mean-one sessions
  auto kl = clusterlab::empirical_cluster_measure(blocks, clusterlab::K_log(), marginal, kSeed);
  CHECK(std::abs(kl.estimate - 1.0 / 1.5) < 0.25);  // gamma = 1/alpha

  clusterlab::ClusterFunctional zero{"zero", [](const Path&) { return 0.0; }};
  CHECK(clusterlab::empirical_cluster_measure(blocks, zero, marginal, kSeed).estimate == 0.0);
  CHECK_THROWS_AS(clusterlab::empirical_cluster_measure(blocks, zero, 0.0, kSeed),
                  std::invalid_argument);

  // block-phase invariance: offsetting the grid by r_T/2 moves the
  // estimate by less than 3 joint standard errors
  auto shifted_blocks = clusterlab::extract_blocks(path, 50.0, u, 25.0);
  auto ke2 = clusterlab::empirical_cluster_measure(shifted_blocks, clusterlab::K_exceedance(),
                                                   marginal, kSeed);
  CHECK(std::abs(ke.estimate - ke2.estimate) <
        3.0 * std::sqrt(ke.std_error * ke.std_error + ke2.std_error * ke2.std_error) + 1e-6);
}

TEST_CASE("cluster measure homogeneity in the level") {
  // nu*(K_exceed_x) scales as x^{-alpha}: log-log slope near -alpha
  auto model = procsim::make_shot_noise_model(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0));
  auto gen = rng::substream(kSeed, 2);
  double T = 30000.0;
  Path path = model->simulate(T, gen).path;
  double u = pathkit::occupation_quantile(path, 1.0 - 300.0 / T, 0.0, T);
  double marginal = clusterlab::empirical_exceedance_fraction(path, u);
  auto blocks = clusterlab::extract_blocks(path, 50.0, u);
  std::vector<double> levels{1.0, 2.0, 4.0};
  std::vector<double> logs;
  for (double x : levels)
    logs.push_back(std::log(
        clusterlab::empirical_cluster_measure(blocks, clusterlab::K_exceed_level(x), marginal,
                                              kSeed)
            .estimate));
  double slope01 = (logs[1] - logs[0]) / std::log(2.0);
  double slope12 = (logs[2] - logs[1]) / std::log(2.0);
  CHECK(slope01 == doctest::Approx(-1.5).epsilon(0.25));
  CHECK(slope12 == doctest::Approx(-1.5).epsilon(0.3));
}

TEST_CASE("gamma variance functional") {
  // unit sessions: the integral reduces to the covered length, one
  auto law1 = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 1.0);
  auto r1 = clusterlab::gamma_variance_functional(law1, 4000, kSeed);
  CHECK(r1.estimate == 1.0);
  auto law2 = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 2.0);
  CHECK(clusterlab::gamma_variance_functional(law2, 4000, kSeed).estimate == 0.5);

  // self-consistency between the direct Monte Carlo and the scaled law
  auto law3 = procsim::shot_noise_tail_law(EtaLaw::uniform(0.0, 2.0), 1.5);
  auto a = clusterlab::gamma_variance_functional(law3, 100000, kSeed);
  auto b = clusterlab::gamma_variance_functional(law3, 100000, kSeed + 1);
  CHECK(std::abs(a.estimate - b.estimate) <
        3.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error));
}

TEST_CASE("anticlustering diagnostic") {
  auto model = procsim::make_shot_noise_model(EtaLaw::deterministic(1.0),
                                              JumpLaw::pareto(1.5, 1.0));
  double aT = model->scale_for(50.0);
  std::vector<double> grid{0.0, 0.5, 1.5, 2.5};
  auto table = clusterlab::anticlustering_diagnostic(*model, aT, 4.0, grid, 1.0, 400, kSeed,
                                                     600000);
  CHECK(table.estimate[0] == 1.0);  // the conditioning point itself exceeds
  // one-dependent sessions: separations beyond the session length are rare
  CHECK(table.estimate[2] < 0.2);
  CHECK(table.estimate[3] < 0.2);
  CHECK(table.estimate[1] >= table.estimate[2] - 0.05);

  // very large level empties the curve beyond the dependence range
  auto high = clusterlab::anticlustering_diagnostic(*model, aT, 4.0, {1.5, 2.5}, 50.0, 400, kSeed,
                                                    600000);
  CHECK(high.estimate[0] < 0.02);
  CHECK(high.estimate[1] < 0.02);

  // insufficient conditioning events surfaces as an error with the count
  CHECK_THROWS_WITH_AS(clusterlab::anticlustering_diagnostic(*model, aT * 500.0, 4.0, grid, 1.0,
                                                             400, kSeed, 3000),
                       doctest::Contains("insufficient"), std::runtime_error);
}

TEST_CASE("conditional tail paths converge to the tail law") {
  auto model = procsim::make_shot_noise_model(EtaLaw::deterministic(1.0),
                                              JumpLaw::pareto(1.5, 1.0));
  auto reports = clusterlab::conditional_tail_paths(*model, {8.0, 20.0}, 3.0, 400, kSeed);
  CHECK(reports.size() == 2);
  for (const auto& rep : reports) {
    CHECK(rep.accepted >= 400);
    CHECK(rep.pareto_ks_pvalue > 1e-4);
  }
  // the conditional exceedance length approaches the unit session length
  const auto& far = reports[1];
  for (const auto& cmp : far.panel)
    if (cmp.name == "capped_exceedance") {
      CHECK(cmp.law_mean == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(cmp.ensemble_mean == doctest::Approx(1.0).epsilon(0.1));
    }
  // convergence trend, softly: the far level is no worse than the near one
  CHECK(reports[1].max_abs_z <= reports[0].max_abs_z + 4.0);
}

TEST_CASE("cluster counts are Poisson") {
  auto model = procsim::make_shot_noise_model(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0));
  auto rep = clusterlab::cluster_count_poisson_test(*model, 1.0, 50.0, 1.0, 3000.0, 600, kSeed);
  CHECK(rep.chi2.pvalue > 1e-3);
  CHECK(rep.sample_mean == doctest::Approx(1.0).epsilon(0.2));
  CHECK(rep.times_uniform_ks_pvalue > 1e-3);
  CHECK(std::abs(rep.adjacent_count_corr_z) < 3.5);

  // homogeneity: raising the level by 2^{1/alpha} halves the mean
  auto rep2 = clusterlab::cluster_count_poisson_test(*model, 1.0, 50.0, std::pow(2.0, 1.0 / 1.5),
                                                     3000.0, 600, kSeed + 1);
  CHECK(rep2.sample_mean == doctest::Approx(0.5).epsilon(0.3));

  CHECK_THROWS_AS(clusterlab::cluster_count_poisson_test(*model, 1.0, 50.0, 100.0, 3000.0, 10,
                                                         kSeed),
                  std::invalid_argument);
}

TEST_CASE("running max law") {
  auto model = procsim::make_shot_noise_model(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0));
  std::vector<double> grid{0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  auto rep = clusterlab::running_max_law(*model, 1.0, 2000.0, grid, 1000, kSeed);
  CHECK(rep.sup_discrepancy < 0.06);
  // extremal index never exceeds the candidate
  CHECK(rep.theta_hat <= 1.0 + 3.0 * rep.theta_hat_se);

  // moving maxima: the identity is exact at finite T with the window mass
  auto m3 = procsim::make_max_stable_m3_model(EtaLaw::deterministic(1.0), 1.5, kSeed);
  double T = 10.0;
  double mass_factor = procsim::m3_window_mass(procsim::session_cluster_law(
                           EtaLaw::deterministic(1.0)), T) / T;
  auto exact = clusterlab::running_max_law(*m3, 1.0, T, grid, 4000, kSeed, 0, mass_factor);
  CHECK(exact.sup_discrepancy < 0.025);
}

TEST_CASE("tightness diagnostic") {
  // single-session paths: once delta is below the minimal gap the modulus
  // collapses
  auto model = procsim::make_shot_noise_model(EtaLaw::deterministic(1.0),
                                              JumpLaw::pareto(1.5, 1.0));
  auto table = clusterlab::tightness_diagnostic(*model, 0.0, 2.0, {0.05, 0.4, 1.9}, 2.0, 0.5,
                                                40000, kSeed);
  CHECK(table.estimate[0] <= table.estimate[2] + 0.1);
  CHECK(table.meta.at("marginal_exceedances") >= 20.0);
}
