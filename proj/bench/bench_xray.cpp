#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

#include "xrt/xray.hpp"

namespace {

using namespace xrt;

Grid source_grid(std::size_t n) { return Grid::cube(Side::source, 3, -2.0, 2.0, n); }

Grid target_grid(std::size_t n) {
  return Grid::box(Side::target, std::vector<double>{-2, -3, -3}, std::vector<double>{2, 3, 3},
                   std::vector<std::size_t>{n, n, n});
}

SampledField smooth(const Grid& g) {
  return SampledField::sample(g, [](std::span<const double> z) {
    double r2 = 0.0;
    for (double c : z) r2 += c * c;
    return std::exp(-r2);
  });
}

void BM_ApplyX_Serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampledField f = smooth(source_grid(n));
  const Grid tgt = target_grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(serial::apply_x(f, tgt, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tgt.size()));
}

void BM_ApplyX_OpenMP(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const SampledField f = smooth(source_grid(n));
  const Grid tgt = target_grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(apply_x(f, tgt, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tgt.size()));
}

void BM_ApplyXStar_Serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampledField g = smooth(target_grid(n));
  const Grid src = source_grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(serial::apply_x_star(g, src, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(src.size()));
}

void BM_ApplyXStar_OpenMP(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const SampledField g = smooth(target_grid(n));
  const Grid src = source_grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(apply_x_star(g, src, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(src.size()));
}

// Thread counts up to the machine's logical cores.
void ThreadSweep(benchmark::internal::Benchmark* b) {
  const int cores = omp_get_num_procs();
  for (int n : {16, 32, 48}) {
    for (int t = 1; t <= cores; t *= 2) b->Args({n, t});
    if ((cores & (cores - 1)) != 0) b->Args({n, cores});
  }
}

}  // namespace

BENCHMARK(BM_ApplyX_Serial)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyX_OpenMP)->Apply(ThreadSweep)->ArgNames({"n", "threads"})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ApplyXStar_Serial)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyXStar_OpenMP)->Apply(ThreadSweep)->ArgNames({"n", "threads"})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
