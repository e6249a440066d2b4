#include <benchmark/benchmark.h>

#include "nmc/coefficients.hpp"
#include "nmc/convergence.hpp"
#include "nmc/coupling.hpp"
#include "nmc/examples.hpp"
#include "nmc/spectral.hpp"

namespace {

const nmc::NonlinearKernelSpec& spec_for(int which) {
  static const auto e1 = nmc::examples::example1_spec(0.1);
  static const auto e2 = nmc::examples::example2_spec(0.1);
  return which == 1 ? e1 : e2;
}

void BM_BuildVHat(benchmark::State& state) {
  const auto& base = spec_for(static_cast<int>(state.range(0))).base();
  for (auto _ : state) benchmark::DoNotOptimize(nmc::build_v_hat(base));
}
BENCHMARK(BM_BuildVHat)->Arg(1)->Arg(2);

void BM_BuildVHatExact(benchmark::State& state) {
  const auto base = nmc::examples::example1_base_exact();
  for (auto _ : state) benchmark::DoNotOptimize(nmc::build_v_hat_exact(base));
}
BENCHMARK(BM_BuildVHatExact);

void BM_SpectralRadius(benchmark::State& state) {
  const auto op = nmc::build_v_hat(spec_for(static_cast<int>(state.range(0))).base());
  for (auto _ : state) benchmark::DoNotOptimize(nmc::spectral_radius(op.v_hat));
}
BENCHMARK(BM_SpectralRadius)->Arg(1)->Arg(2);

void BM_Eigenvalues(benchmark::State& state) {
  const auto op = nmc::build_v_hat(spec_for(static_cast<int>(state.range(0))).base());
  for (auto _ : state) benchmark::DoNotOptimize(nmc::eigenvalues(op.v_hat));
}
BENCHMARK(BM_Eigenvalues)->Arg(1)->Arg(2);

void BM_SimulateCoupled(benchmark::State& state) {
  const auto& base = spec_for(1).base();
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(nmc::simulate_coupled(base, nmc::dirac(0, 4), nmc::dirac(1, 4), 10, trials, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateCoupled)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_TvDecay(benchmark::State& state) {
  const auto& spec = spec_for(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nmc::tv_decay(spec, nmc::dirac(0, 6), nmc::dirac(5, 6), n));
}
BENCHMARK(BM_TvDecay)->Arg(50)->Arg(200);

void BM_AlphaNonlinear(benchmark::State& state) {
  const auto& spec = spec_for(2);
  for (auto _ : state) benchmark::DoNotOptimize(nmc::md_alpha_nonlinear(spec, 1, {}));
}
BENCHMARK(BM_AlphaNonlinear);

}  // namespace

BENCHMARK_MAIN();
