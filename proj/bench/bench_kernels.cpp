// Serial reference vs OpenMP kernels. Second argument is the thread count;
// 1 runs the serial path.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "cbtail/checkerboard.hpp"
#include "cbtail/copula_models.hpp"
#include "cbtail/empirical_copula.hpp"
#include "cbtail/multiplier_bootstrap.hpp"
#include "cbtail/rng.hpp"
#include "cbtail/sim_harness.hpp"
#include "cbtail/tail_estimation.hpp"

using namespace cbtail;

namespace {

EmpiricalCopula clayton_copula(std::size_t n) {
  Engine rng = make_stream(11, {0});
  return EmpiricalCopula(ranks(sample(CopulaModel::clayton(1.0), n, rng)));
}

void thread_args(benchmark::internal::Benchmark* b, std::initializer_list<long> sizes) {
  const long max_threads = omp_get_max_threads();
  for (long s : sizes) {
    b->Args({s, 1});
    if (max_threads > 1) b->Args({s, max_threads});
  }
}

void BM_BuildGrid(benchmark::State& state) {
  const auto copula = clayton_copula(4000);
  const EmpiricalCountTable table(copula);
  const int m = static_cast<int>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto grid = threads <= 1 ? build_grid_serial(table, m)
                             : build_grid_parallel(table, m, threads);
    benchmark::DoNotOptimize(grid);
  }
}
BENCHMARK(BM_BuildGrid)
    ->Apply([](auto* b) { thread_args(b, {256, 1024}); })
    ->Unit(benchmark::kMillisecond);

void BM_BootstrapPair(benchmark::State& state) {
  const std::size_t n = 2000;
  const TailEstimator est(clayton_copula(n), 44, 437, TailSide::Lower);
  const auto law = MultiplierLaw::standard_exponential();
  const std::size_t B = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  const StreamSeed seed{5, {}};
  for (auto _ : state) {
    auto pair = threads <= 1 ? bootstrap_pair_serial(est, law, B, seed)
                             : bootstrap_pair_parallel(est, law, B, seed, threads);
    benchmark::DoNotOptimize(pair);
  }
}
BENCHMARK(BM_BootstrapPair)
    ->Apply([](auto* b) { thread_args(b, {500}); })
    ->Unit(benchmark::kMillisecond);

void BM_RunCell(benchmark::State& state) {
  ExperimentConfig config;
  config.model = CopulaModel::clayton(1.0);
  config.ns = {2000};
  config.pairs = {{0.5, 0.8}};
  config.reps = static_cast<std::size_t>(state.range(0));
  config.B = 100;
  const Cell cell = experiment_cells(config).front();
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto run = run_cell(config, cell, threads, config.B);
    benchmark::DoNotOptimize(run);
  }
}
BENCHMARK(BM_RunCell)
    ->Apply([](auto* b) { thread_args(b, {40}); })
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
