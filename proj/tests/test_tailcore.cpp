#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tailsim/pathkit.hpp"
#include "tailsim/procsim.hpp"
#include "tailsim/rng.hpp"
#include "tailsim/tailcore.hpp"

using namespace tailsim;
using pathkit::Path;
using procsim::EtaLaw;
using tailcore::TailLaw;

namespace {
constexpr std::uint64_t kSeed = 0x7a11c0de;
}

TEST_CASE("pareto sampler") {
  CHECK_THROWS_AS(([] {
                    auto gen = rng::substream(1, 0);
                    tailcore::pareto_sample(0.0, gen);
                  })(),
                  std::invalid_argument);
  auto gen = rng::substream(kSeed, 0);
  std::size_t n = 1'000'000, gt2 = 0, gt3 = 0;
  double min = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    double x = tailcore::pareto_sample(1.0, gen);
    min = std::min(min, x);
    if (x > 2.0) ++gt2;
  }
  CHECK(min >= 1.0);  // support bound is exact
  CHECK(double(gt2) / double(n) == doctest::Approx(0.5).epsilon(0.004));
  for (std::size_t i = 0; i < n; ++i)
    if (tailcore::pareto_sample(2.0, gen) > 3.0) ++gt3;
  CHECK(double(gt3) / double(n) == doctest::Approx(1.0 / 9.0).epsilon(0.01));
}

TEST_CASE("tail law structural invariants") {
  Path decay_shape =
      procsim::discretize_shape([](double t) { return std::exp(-t); }, 0.0, 15.0, 0.01);
  for (auto law : {procsim::shot_noise_tail_law(EtaLaw::exponential(1.0), 1.5),
                   procsim::ma_tail_law(Path::indicator(0, 2), 0.7),
                   procsim::ma_tail_law(decay_shape, 0.5, 0.5)}) {
    auto gen = rng::substream(kSeed, 1);
    for (int i = 0; i < 2000; ++i) {
      Path theta = law.sample_theta(gen);
      CHECK(pathkit::vector_norm(theta.value(0.0), law.norm) == 1.0);  // exactly
      Path q = law.sample_q(gen);
      CHECK(pathkit::sup_norm(q, law.norm) == 1.0);  // exactly
      Path y = law.sample_y(gen);
      CHECK(pathkit::vector_norm(y.value(0.0), law.norm) > 1.0);
    }
    CHECK(tailcore::pareto_ks_pvalue(law, 100000, kSeed) > 1e-3);
    auto corr = tailcore::theta_independence_check(law, 100000, kSeed);
    CHECK(std::abs(corr.zscore) < 3.0);
  }
}

TEST_CASE("candidate via exceedance") {
  // deterministic sessions of length 2: every tail draw has exceedance 2
  auto law2 = procsim::shot_noise_tail_law(EtaLaw::deterministic(2.0), 1.5);
  auto rep = tailcore::candidate_via_exceedance(law2, 20000, kSeed);
  CHECK(rep.estimate == 0.5);
  CHECK(rep.std_error == 0.0);

  auto law_exp = procsim::shot_noise_tail_law(EtaLaw::exponential(1.0), 0.8);
  auto rep2 = tailcore::candidate_via_exceedance(law_exp, 100000, kSeed);
  CHECK(std::abs(rep2.estimate - 1.0) < 3.0 * rep2.std_error + 0.01);

  // fixed-length session of 4
  auto law4 = procsim::shot_noise_tail_law(EtaLaw::deterministic(4.0), 1.0);
  CHECK(tailcore::candidate_via_exceedance(law4, 5000, kSeed).estimate == 0.25);
}

TEST_CASE("candidate via theta and the two-estimator agreement") {
  auto unit = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 1.3);
  CHECK(tailcore::candidate_via_theta(unit, 5000, kSeed).estimate == 1.0);

  // exponential shape: theta = 1 / int exp(-alpha t) dt = alpha
  Path decay = procsim::discretize_shape([](double t) { return std::exp(-t); }, 0.0, 15.0, 4e-3);
  auto law_half = procsim::ma_tail_law(decay, 0.5);
  auto rep = tailcore::candidate_via_theta(law_half, 2000, kSeed);
  CHECK(rep.estimate == doctest::Approx(0.5).epsilon(3e-3));
  CHECK(rep.estimate == doctest::Approx(*law_half.theta_closed_form).epsilon(1e-12));

  // agreement between the two candidate estimators on one model
  auto law = procsim::shot_noise_tail_law(EtaLaw::uniform(0.0, 1.0), 1.5);
  auto a = tailcore::candidate_via_exceedance(law, 100000, kSeed);
  auto b = tailcore::candidate_via_theta(law, 100000, kSeed + 1);
  CHECK(std::abs(stats::z_between(a, b)) < 3.5);
}

TEST_CASE("q_from_theta importance sampler") {
  // unit sessions: the weight is identically one and Q recentres to 1_{[0,1)}
  auto unit = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 0.9);
  auto qt = tailcore::q_from_theta(unit.sample_theta, 0.9, 4000, kSeed);
  CHECK(qt.theta_hat.estimate == 1.0);
  CHECK(qt.theta_hat.std_error == 0.0);
  CHECK(qt.effective_sample_size == doctest::Approx(4000.0));
  auto gen = rng::substream(kSeed, 3);
  CHECK(qt.sample_q(gen) == Path::indicator(0, 1));

  // exponential shape at alpha = 2: theta-hat is the closed form 2
  Path decay = procsim::discretize_shape([](double t) { return std::exp(-t); }, 0.0, 15.0, 4e-3);
  auto law = procsim::ma_tail_law(decay, 2.0);
  auto qt2 = tailcore::q_from_theta(law.sample_theta, 2.0, 2000, kSeed);
  CHECK(qt2.theta_hat.estimate == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(qt2.theta_hat.estimate ==
        doctest::Approx(procsim::ma_theta_closed_form(decay, 2.0)).epsilon(1e-12));

  // degenerate single interval of length L at alpha = 1: weight = 1/L exactly
  auto single = [](std::mt19937_64&) { return Path::indicator(-1.0, 3.0); };  // L = 4
  auto qt3 = tailcore::q_from_theta(single, 1.0, 256, kSeed);
  CHECK(qt3.theta_hat.estimate == 0.25);
}

TEST_CASE("tail_from_q reproduces the analytic construction") {
  // unit shot-noise cluster process
  auto q_sampler = [](std::mt19937_64&) { return Path::indicator(0.0, 1.0); };
  tailcore::TailFromQOptions opts;
  opts.seed = kSeed;
  opts.pool_size = 2000;
  auto law = tailcore::tail_from_q(q_sampler, 1.5, 1.0, 1.0, opts);
  auto gen = rng::substream(kSeed, 4);
  std::vector<double> anchors;
  for (int i = 0; i < 50000; ++i) {
    Path y = law.sample_y(gen);
    CHECK(pathkit::vector_norm(y.value(0.0), law.norm) > 1.0);  // Y always covers zero
    CHECK(pathkit::exceedance(y, 1.0) == 1.0);                  // session length preserved
    anchors.push_back(-pathkit::infargmax(y));
  }
  // the shift T of the session is uniform on (0, 1): KS on the histogram
  double d = stats::ks_statistic_uniform(anchors);
  CHECK(stats::ks_pvalue(d, anchors.size()) > 1e-3);
  CHECK(tailcore::pareto_ks_pvalue(law, 50000, kSeed) > 1e-3);

  // a mismatched theta fails the normalization gate
  CHECK_THROWS_AS(tailcore::tail_from_q(q_sampler, 1.5, 1.4, 1.0, opts), std::invalid_argument);
}

TEST_CASE("spectral process normalization") {
  auto law = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 1.2);
  auto spec = tailcore::spectral_from_tail(law, 2.0);
  auto rep = tailcore::check_spectral_normalization(spec, 100000, kSeed);
  CHECK(std::abs(rep.estimate - 1.0) < 3.0 * rep.std_error);
  // no zero draws
  auto gen = rng::substream(kSeed, 5);
  for (int i = 0; i < 500; ++i) CHECK_FALSE(spec.sample_z(gen).is_zero());
}

TEST_CASE("time change formula") {
  auto law = procsim::shot_noise_tail_law(EtaLaw::exponential(1.0), 1.5);

  // H == 1, t = 0: both sides are the Pareto tail x^{-alpha}
  auto c0 = tailcore::check_time_change(law, tailcore::constant_functional(1.0), 0.0, 2.0, 100000,
                                        kSeed);
  CHECK(c0.lhs.estimate == doctest::Approx(std::pow(2.0, -1.5)).epsilon(0.02));
  CHECK(std::abs(c0.zscore) < 3.5);

  auto c1 = tailcore::check_time_change(law, tailcore::capped_exceedance_functional(1.0, 10.0),
                                        0.5, 2.0, 100000, kSeed);
  CHECK(std::abs(c1.zscore) < 3.5);

  // t beyond the support: both sides vanish
  auto far = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 1.5);
  auto c2 = tailcore::check_time_change(far, tailcore::constant_functional(1.0), 5.0, 1.0, 10000,
                                        kSeed);
  CHECK(c2.lhs.estimate == 0.0);
  CHECK(c2.rhs.estimate == 0.0);
}

TEST_CASE("tilt shift identity") {
  auto law = procsim::shot_noise_tail_law(EtaLaw::exponential(1.0), 1.2);
  auto spec = tailcore::spectral_from_tail(law, 3.0);

  auto c0 = tailcore::check_tilt_shift(spec, tailcore::constant_functional(1.0), 0.0, 50000,
                                       kSeed);
  CHECK(c0.lhs.estimate == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(c0.zscore) < 3.5);  // both sides estimate E||Z_0||^alpha on separate streams
  auto c1 = tailcore::check_tilt_shift(spec, tailcore::infargmax_indicator(0.0), 0.3, 100000,
                                       kSeed);
  CHECK(std::abs(c1.zscore) < 3.5);
  auto c2 = tailcore::check_tilt_shift(spec, tailcore::constant_functional(2.5), 0.7, 20000,
                                       kSeed);
  CHECK(std::abs(c2.lhs.estimate - 2.5 * c0.lhs.estimate / 1.0) < 0.25);

  // a non-homogeneous functional is rejected up front
  tailcore::PathFunctional bad{"sup", [](const Path& p) { return pathkit::sup_norm(p); }, 100.0};
  CHECK_THROWS_AS(tailcore::check_tilt_shift(spec, bad, 0.1, 1000, kSeed), std::invalid_argument);
}

TEST_CASE("tilted independence identity") {
  // deterministic sessions of length 2: both sides reduce to x^{-alpha} theta
  auto law = procsim::shot_noise_tail_law(EtaLaw::deterministic(2.0), 1.5);
  auto c = tailcore::check_independence_tilted(law, tailcore::constant_functional(1.0), 2.0,
                                               100000, kSeed);
  CHECK(c.rhs.estimate == doctest::Approx(std::pow(2.0, -1.5) * 0.5).epsilon(1e-9));
  CHECK(std::abs(c.zscore) < 3.5);

  // x near 1: both sides approach theta
  auto cx = tailcore::check_independence_tilted(law, tailcore::constant_functional(1.0), 1.0001,
                                                50000, kSeed);
  CHECK(cx.lhs.estimate == doctest::Approx(0.5).epsilon(0.02));

  auto law2 = procsim::shot_noise_tail_law(EtaLaw::exponential(1.0), 0.8);
  auto cs = tailcore::check_independence_tilted(law2, tailcore::exceedance_indicator(0.5, 1.0),
                                                3.0, 100000, kSeed);
  CHECK(std::abs(cs.zscore) < 3.5);

  CHECK_THROWS_AS(tailcore::check_independence_tilted(law, tailcore::constant_functional(1.0),
                                                      0.9, 100, kSeed),
                  std::invalid_argument);
}

TEST_CASE("forward identity") {
  // unit sessions, alpha = 1/2: both sides equal 1 in closed form
  auto unit = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 0.5);
  auto c = tailcore::check_forward_identity(unit, 1.0, 100000, kSeed);
  CHECK(c.lhs.estimate == doctest::Approx(1.0).epsilon(1e-9));  // theta (int Q)^alpha == 1
  CHECK(std::abs(c.rhs.estimate - 1.0) < 3.0 * c.rhs.std_error + 1e-6);
  CHECK(std::abs(c.zscore) < 3.5);

  // alpha = 1: both sides are theta E[int Q] = 1
  auto unit1 = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 1.0);
  auto c1 = tailcore::check_forward_identity(unit1, 1.0, 20000, kSeed);
  CHECK(c1.lhs.estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c1.rhs.estimate == doctest::Approx(1.0).epsilon(1e-9));

  // indicator shape of length 2 at alpha = 1/2: lhs = theta sqrt(2),
  // rhs = (1/2) E[zeta^{-1/2}] with zeta uniform(0,2); both equal 2^{-1/2}
  auto ma = procsim::ma_tail_law(Path::indicator(0, 2), 0.5);
  auto c2 = tailcore::check_forward_identity(ma, 0.5, 200000, kSeed);
  CHECK(c2.lhs.estimate == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(std::abs(c2.rhs.estimate - std::sqrt(0.5)) < 3.0 * c2.rhs.std_error + 1e-4);

  // signed variant with the positive-part convention: for a symmetric sign
  // both sides are exactly half their unsigned values
  auto sym = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 0.5, 0.5);
  auto cs = tailcore::check_forward_identity(sym, 1.0, 100000, kSeed, /*signed_mode=*/true);
  CHECK(cs.lhs.estimate == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(cs.rhs.estimate - 0.5) < 3.0 * cs.rhs.std_error + 1e-3);
  CHECK(std::abs(cs.zscore) < 3.5);
}

TEST_CASE("q normalization identity") {
  auto law = procsim::shot_noise_tail_law(EtaLaw::uniform(0.0, 1.0), 1.5);
  auto c = tailcore::check_q_normalization(law, 2.0, 100000, kSeed);
  CHECK(std::abs(c.zscore) < 3.5);
}

TEST_CASE("anchor density for the unit shot noise") {
  auto law = procsim::shot_noise_tail_law(EtaLaw::deterministic(1.0), 1.5);
  std::vector<double> grid;
  for (double t = -1.6; t <= 0.65; t += 0.05) grid.push_back(t);
  auto table = tailcore::anchor_density(law, tailcore::AnchorKind::first_exceedance, grid, 100000,
                                        kSeed);
  // the first-exceedance time is uniform on (-1, 0): density one inside,
  // zero outside
  for (std::size_t j = 0; j < table.t.size(); ++j) {
    double t = table.t[j];
    double expect = (t > -1.0 && t <= 0.0) ? 1.0 : 0.0;
    CHECK(std::abs(table.density[j] - expect) < 0.02);
  }
  CHECK(std::abs(table.trapezoid_mass - 1.0) < 0.05);
  CHECK(table.density_at_zero_minus == doctest::Approx(1.0).epsilon(0.02));
  CHECK(table.continuity_probability == 1.0);  // exceedance happens by an upward jump

  auto t0 = tailcore::anchor_density(law, tailcore::AnchorKind::infargmax, grid, 50000, kSeed);
  CHECK(std::abs(t0.trapezoid_mass - 1.0) < 0.05);
}

TEST_CASE("conditional candidate for shot noise") {
  auto det = [](std::mt19937_64&) { return 2.0; };
  CHECK(tailcore::candidate_conditional_shotnoise(det, 10000, kSeed).estimate == 0.5);

  EtaLaw exp1 = EtaLaw::exponential(1.0);
  auto r1 = tailcore::candidate_conditional_shotnoise(
      [exp1](std::mt19937_64& g) { return exp1.sample(g); }, 100000, kSeed);
  CHECK(std::abs(r1.estimate - 1.0) < 3.0 * r1.std_error + 1e-3);

  EtaLaw u01 = EtaLaw::uniform(0.0, 1.0);
  auto r2 = tailcore::candidate_conditional_shotnoise(
      [u01](std::mt19937_64& g) { return u01.sample(g); }, 100000, kSeed);
  CHECK(std::abs(r2.estimate - 2.0) < 3.0 * r2.std_error + 1e-2);
}
