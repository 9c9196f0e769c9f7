#include <benchmark/benchmark.h>

#include "torus/minimizer.hpp"
#include "torus/spectral.hpp"

using namespace torus;

namespace {

void BM_GapSpectral1D(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 2 * N);
  const Configuration c = random_configuration(static_cast<std::size_t>(N), k.cell(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gap_spectral(k, c).gap);
}
BENCHMARK(BM_GapSpectral1D)->RangeMultiplier(4)->Range(4, 256);

void BM_GapSpectral2D(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const FourierKernel k = gaussian_kernel(1.0, Cell::triangular(), 4 * L + 2);
  const Configuration c = random_configuration(static_cast<std::size_t>(2 * L * L), k.cell(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gap_spectral(k, c).gap);
}
BENCHMARK(BM_GapSpectral2D)->Arg(3)->Arg(6)->Arg(9);

void BM_GapGradient2D(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const FourierKernel k = gaussian_kernel(1.0, Cell::triangular(), 4 * L + 2);
  const Configuration c = random_configuration(static_cast<std::size_t>(2 * L * L), k.cell(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(gap_gradient(k, c));
}
BENCHMARK(BM_GapGradient2D)->Arg(3)->Arg(6);

void BM_StructureFactorGrid(benchmark::State& state) {
  const int cap = static_cast<int>(state.range(0));
  const Configuration c = random_configuration(72, Cell::triangular(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(structure_factor_grid(c, cap).values.data());
}
BENCHMARK(BM_StructureFactorGrid)->Arg(8)->Arg(16)->Arg(32);

void BM_GapExtended(benchmark::State& state) {
  const unsigned digits = static_cast<unsigned>(state.range(0));
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 32);
  const ExtendedPrecision guard(digits);
  const ExtendedConfiguration c = equidistant_1d<Extended>(8);
  for (auto _ : state) benchmark::DoNotOptimize(gap_spectral(k, c));
}
BENCHMARK(BM_GapExtended)->Arg(50)->Arg(300);

void BM_Minimize1D(benchmark::State& state) {
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 32);
  MinimizeOptions o;
  o.starts = 4;
  for (auto _ : state) benchmark::DoNotOptimize(minimize(k, static_cast<int>(state.range(0)), Constraint::none, o).best_gap);
}
BENCHMARK(BM_Minimize1D)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
