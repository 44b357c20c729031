#include <benchmark/benchmark.h>

#include "rsl/asymptotics.hpp"
#include "rsl/distributions.hpp"
#include "rsl/random.hpp"
#include "rsl/recursion.hpp"
#include "rsl/tailstats.hpp"

namespace {

using D = rsl::DistributionSpec;

D mm1() { return D::difference(D::exponential(2.0), D::exponential(1.0)); }
D sgamma_law() { return D::difference(D::tilted_pareto(1.0, 2.0, 1.0), D::exponential(1.0)); }

void BM_SampleMM1(benchmark::State& state) {
  const D law = mm1();
  rsl::RandomStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rsl::sample(law, rng));
}
BENCHMARK(BM_SampleMM1);

void BM_SampleTiltedPareto(benchmark::State& state) {
  const D law = sgamma_law();
  rsl::RandomStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rsl::sample(law, rng));
}
BENCHMARK(BM_SampleTiltedPareto);

void BM_MgfTiltedPareto(benchmark::State& state) {
  const D law = sgamma_law();
  double s = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rsl::mgf(law, s));
    s = s == 0.5 ? 0.75 : 0.5;
  }
}
BENCHMARK(BM_MgfTiltedPareto);

void BM_StationarySample(benchmark::State& state) {
  const rsl::RecursionConfig cfg{0.5, mm1(), 7};
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(rsl::stationary_sample(cfg, n, workers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StationarySample)->Args({1'000'000, 1})->Args({1'000'000, 8})->Unit(benchmark::kMillisecond);

void BM_TiltedTailEstimate(benchmark::State& state) {
  const D law = mm1();
  const auto s = rsl::stationary_sample(rsl::RecursionConfig{0.5, law, 7}, 200'000, 1);
  const double tilt_s = rsl::balanced_tilt(law, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(rsl::tail_via_representation(6.5, 0.5, law, s, tilt_s, 200'000, 9, 1));
  state.SetItemsProcessed(state.iterations() * 200'000);
}
BENCHMARK(BM_TiltedTailEstimate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
