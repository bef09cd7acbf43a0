#include <benchmark/benchmark.h>

#include "damplab/cyclic_tridiagonal.hpp"
#include "damplab/evolution.hpp"
#include "damplab/rng.hpp"
#include "damplab/stationary.hpp"

using namespace damplab;

namespace {

void BM_CyclicSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(1);
  cvec lo(n), di(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = rng.complex_normal();
    up[i] = rng.complex_normal();
    di[i] = 4.0 + rng.complex_normal();
  }
  const CyclicTridiagonalLU lu(lo, di, up);
  cvec b = complex_gaussian_vector(n, rng);
  for (auto _ : state) {
    lu.solve_in_place(b);
    benchmark::DoNotOptimize(b.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CyclicSolve)->RangeMultiplier(4)->Range(128, 32768)->Complexity(benchmark::oN);

void BM_ResolventNorm1d(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0));
  const CircleGrid grid(static_cast<std::size_t>(8 * state.range(0)), DiffScheme::Fd2);
  const auto p = DampingProfile::exact(kPi / 2, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_norm_1d(q, q * q, p, grid).norm);
}
BENCHMARK(BM_ResolventNorm1d)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

void BM_StrangStep(benchmark::State& state) {
  const CircleGrid grid(static_cast<std::size_t>(state.range(0)));
  const rvec W = sample_on_grid(DampingProfile::exact(kPi / 2, 0.0), grid);
  const StrangStepper st(grid, W, 0.05);
  WaveField f = WaveField::from(gaussian_strip(grid, 4, kPi / 8));
  for (auto _ : state) st.step(f);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StrangStep)->RangeMultiplier(2)->Range(64, 1024);

}  // namespace

BENCHMARK_MAIN();
