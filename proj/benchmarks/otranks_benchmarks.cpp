#include <benchmark/benchmark.h>

#include "otranks/gof_tests.hpp"
#include "otranks/synthetic_data.hpp"
#include "otranks/transport_maps.hpp"

namespace {

using namespace otranks;

PointSet sample(std::size_t n) { return banana(n, 7); }

void BM_Cells2d(benchmark::State& state) {
  const auto pts = sample(static_cast<std::size_t>(state.range(0)));
  const auto fitted = fit(pts, ReferenceMeasure::cube(2));
  for (auto _ : state) benchmark::DoNotOptimize(cells_2d(fitted.potential(), fitted.reference()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Cells2d)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMillisecond)->Complexity();

void BM_FitExact2d(benchmark::State& state) {
  const auto pts = sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(pts, ReferenceMeasure::cube(2)));
}
BENCHMARK(BM_FitExact2d)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMillisecond);

void BM_FitMonteCarlo(benchmark::State& state) {
  const auto pts = sample(static_cast<std::size_t>(state.range(0)));
  SolverConfig cfg;
  cfg.backend = Backend::montecarlo;
  for (auto _ : state) benchmark::DoNotOptimize(fit(pts, ReferenceMeasure::cube(2), cfg));
}
BENCHMARK(BM_FitMonteCarlo)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RankOptimize(benchmark::State& state) {
  const auto fitted = fit(sample(static_cast<std::size_t>(state.range(0))), ReferenceMeasure::cube(2));
  RandomStream rng(1);
  for (auto _ : state) {
    const Vector y{rng.normal(), rng.normal()};
    benchmark::DoNotOptimize(rank(fitted, y));
  }
}
BENCHMARK(BM_RankOptimize)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_RankVertex(benchmark::State& state) {
  const auto fitted = fit(sample(static_cast<std::size_t>(state.range(0))), ReferenceMeasure::cube(2));
  RandomStream rng(1);
  for (auto _ : state) {
    const Vector y{rng.normal(), rng.normal()};
    benchmark::DoNotOptimize(rank(fitted, y, RankMode::exact_vertex));
  }
}
BENCHMARK(BM_RankVertex)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_TwoSampleStatistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = gauss_mixture_2s(1, n, 1), y = gauss_mixture_2s(1, n, 2);
  TwoSampleConfig cfg;
  cfg.permutations = 0;
  for (auto _ : state) benchmark::DoNotOptimize(two_sample_test(x, y, cfg));
}
BENCHMARK(BM_TwoSampleStatistic)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
