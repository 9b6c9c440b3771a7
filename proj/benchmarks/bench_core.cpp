#include <benchmark/benchmark.h>

#include <random>

#include "handsoff/handsoff_solver.hpp"
#include "handsoff/linalg.hpp"
#include "handsoff/lp_solver.hpp"
#include "handsoff/spectral.hpp"
#include "handsoff/turnpike.hpp"

namespace {

using namespace handsoff;

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = d(rng);
  }
  return a;
}

BoundaryProblem reference(double horizon, int spu = 200) {
  return BoundaryProblem{LtiSystem(Matrix{{1.0, 1.0}, {0.0, -1.0}}, Matrix{{1.0}, {1.0}}),
                         Vector{1.0, -2.0}, Vector{1.0, 0.0}, horizon, spu};
}

void BM_MatExp(benchmark::State& state) {
  const Matrix a = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(mat_exp(a));
}
BENCHMARK(BM_MatExp)->Arg(2)->Arg(8)->Arg(32);

void BM_SpectralSplit(benchmark::State& state) {
  const Matrix a = random_matrix(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_split(a));
}
BENCHMARK(BM_SpectralSplit)->Arg(2)->Arg(8)->Arg(32);

// Transcription LP of the reference problem, reused as a generic bounded LP.
void BM_SolveLp(benchmark::State& state) {
  const Transcription tr = transcribe(reference(static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(tr.lp));
  state.counters["vars"] = static_cast<double>(tr.lp.num_vars());
}
BENCHMARK(BM_SolveLp)->Arg(2)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SolveHandsOff(benchmark::State& state) {
  const BoundaryProblem bp = reference(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_handsoff(bp));
}
BENCHMARK(BM_SolveHandsOff)->Arg(2)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const std::vector<double> horizons{2.0, 4.0, 8.0, 16.0, 32.0};
  const BoundaryProblem bp = reference(2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_horizons(bp, horizons, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
