#include <benchmark/benchmark.h>

#include "ksphere/dynamics.hpp"
#include "ksphere/lanczos.hpp"
#include "ksphere/models.hpp"
#include "ksphere/random.hpp"

using namespace ksphere;

static void BM_BuildChain(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(42);
  const Liouvillian l(random_hermitian(d, rng));
  const OperatorState seed = random_traceless_hermitian(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(build_chain(l, seed));
  state.SetLabel("d=" + std::to_string(d));
}
BENCHMARK(BM_BuildChain)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static LanczosChain random_chain(int dim) {
  Rng rng(7);
  return LanczosChain::from_coefficients(random_coefficients(dim - 1, rng));
}

static void BM_EvolveOde(benchmark::State& state) {
  const LanczosChain c = random_chain(static_cast<int>(state.range(0)));
  const std::vector<double> grid = uniform_grid(10.0, 201);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_ode(c, grid));
}
BENCHMARK(BM_EvolveOde)->Arg(16)->Arg(128)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_EvolveSpectral(benchmark::State& state) {
  const LanczosChain c = random_chain(static_cast<int>(state.range(0)));
  const std::vector<double> grid = uniform_grid(10.0, 201);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_spectral(c, grid));
}
BENCHMARK(BM_EvolveSpectral)->Arg(16)->Arg(128)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_TruncateMeixner(benchmark::State& state) {
  const double horizon = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(model_chain(ModelSpec::meixner(1.0, 2.0), horizon));
  state.SetLabel("horizon=" + std::to_string(horizon));
}
BENCHMARK(BM_TruncateMeixner)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
