// Serial reference vs OpenMP kernels on the workloads that dominate a sweep:
// predicting at evaluation points and sampling an estimator on a grid.

#include <benchmark/benchmark.h>

#include "robustreg/batch.hpp"
#include "robustreg/dataset.hpp"
#include "robustreg/estimators.hpp"
#include "robustreg/projection.hpp"

using namespace robustreg;

namespace {

const Dataset& sample(std::size_t dim) {
  static const Dataset d1 = generate_synthetic(10000, 1, TargetFunction::sine1d(), {1.0}, 7);
  static const Dataset d2 = generate_synthetic(10000, 2, TargetFunction::sincos2d(), {1.0}, 7);
  return dim == 1 ? d1 : d2;
}

HuberEstimator huber(std::size_t dim) {
  return HuberEstimator(sample(dim), {dim == 1 ? 0.03 : 0.1, 1.0, 3.0}, Kernel::parse("triangular_shifted"));
}

void BM_PredictSerial(benchmark::State& state) {
  const auto est = huber(static_cast<std::size_t>(state.range(0)));
  const auto pts = PointSet::uniform(est.dim(), 1000, 11);
  for (auto _ : state) benchmark::DoNotOptimize(predict_serial(est, pts));
  state.SetItemsProcessed(state.iterations() * 1000);
}

void BM_PredictParallel(benchmark::State& state) {
  const auto est = huber(static_cast<std::size_t>(state.range(0)));
  const auto pts = PointSet::uniform(est.dim(), 1000, 11);
  for (auto _ : state) benchmark::DoNotOptimize(predict_parallel(est, pts));
  state.SetItemsProcessed(state.iterations() * 1000);
}

void BM_GridSerial(benchmark::State& state) {
  const auto est = huber(2);
  const auto grid = Grid::unit_cube(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sample_to_grid_serial(est, grid));
}

void BM_GridParallel(benchmark::State& state) {
  const auto est = huber(2);
  const auto grid = Grid::unit_cube(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sample_to_grid(est, grid));
}

}  // namespace

BENCHMARK(BM_PredictSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
