// Microbenchmarks for the compute-bound Monte Carlo kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "tailsim/clusterlab.hpp"
#include "tailsim/pathkit.hpp"
#include "tailsim/procsim.hpp"
#include "tailsim/rng.hpp"
#include "tailsim/tailcore.hpp"

using namespace tailsim;
using pathkit::Path;
using procsim::EtaLaw;
using procsim::JumpLaw;

static void ShotNoiseWindow(benchmark::State& state) {
  auto gen = rng::substream(1, 0);
  double T = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto sp = procsim::sim_shot_noise(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0), T, gen);
    benchmark::DoNotOptimize(sp.path.piece_count());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(ShotNoiseWindow)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void PathExceedance(benchmark::State& state) {
  auto gen = rng::substream(2, 0);
  auto sp = procsim::sim_shot_noise(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0),
                                    static_cast<double>(state.range(0)), gen);
  for (auto _ : state) benchmark::DoNotOptimize(pathkit::exceedance(sp.path, 2.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(PathExceedance)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void TailDrawCandidate(benchmark::State& state) {
  auto law = procsim::shot_noise_tail_law(EtaLaw::exponential(1.0), 1.5);
  auto gen = rng::substream(3, 0);
  for (auto _ : state) {
    Path y = law.sample_y(gen);
    benchmark::DoNotOptimize(1.0 / pathkit::exceedance(y, 1.0));
  }
}
BENCHMARK(TailDrawCandidate);

static void MovingMaximaWindow(benchmark::State& state) {
  auto q = procsim::session_cluster_law(EtaLaw::deterministic(1.0));
  auto gen = rng::substream(4, 0);
  double T = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto sp = procsim::sim_max_stable_m3(q, 1.5, T, gen);
    benchmark::DoNotOptimize(sp.diagnostics["atoms"]);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(MovingMaximaWindow)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BlockExtraction(benchmark::State& state) {
  auto gen = rng::substream(5, 0);
  auto sp = procsim::sim_shot_noise(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0), 10000.0,
                                    gen);
  for (auto _ : state) {
    auto blocks = clusterlab::extract_blocks(sp.path, 50.0, 100.0);
    benchmark::DoNotOptimize(blocks.blocks.size());
  }
}
BENCHMARK(BlockExtraction);

static void ModulusWPrime(benchmark::State& state) {
  auto gen = rng::substream(6, 0);
  auto sp = procsim::sim_shot_noise(EtaLaw::exponential(1.0), JumpLaw::pareto(1.5, 1.0), 4.0, gen);
  for (auto _ : state)
    benchmark::DoNotOptimize(pathkit::modulus_w_prime(sp.path, 0.0, 4.0, 0.25));
}
BENCHMARK(ModulusWPrime);

BENCHMARK_MAIN();
