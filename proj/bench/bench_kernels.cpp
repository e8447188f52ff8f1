// Parallel kernels against their serial reference implementations.

#include <benchmark/benchmark.h>

#include "epsharm/energy.hpp"
#include "epsharm/profile.hpp"
#include "epsharm/sphere.hpp"

using namespace epsharm;

namespace {

MapField fd_test_map() {
  MapField u = lift_profile(Profile{2, {0.3, -0.2, 0.1}});
  u.mode = DerivMode::FiniteDifference;  // force the stencil path
  u.chart_jet = nullptr;
  return u;
}

void BM_SurfaceEnergyParallel(benchmark::State& state) {
  QuadratureGrid grid = build_grid(48, 96);
  MapField u = fd_test_map();
  for (auto _ : state)
    benchmark::DoNotOptimize(eps_energy(u, 0.05, grid, true).total);
}
BENCHMARK(BM_SurfaceEnergyParallel)->Unit(benchmark::kMillisecond);

void BM_SurfaceEnergySerial(benchmark::State& state) {
  QuadratureGrid grid = build_grid(48, 96);
  MapField u = fd_test_map();
  for (auto _ : state)
    benchmark::DoNotOptimize(eps_energy(u, 0.05, grid, false).total);
}
BENCHMARK(BM_SurfaceEnergySerial)->Unit(benchmark::kMillisecond);

void BM_SurfaceEnergyAnalyticJets(benchmark::State& state) {
  QuadratureGrid grid = build_grid(48, 96);
  MapField u = lift_profile(Profile{2, {0.3, -0.2, 0.1}});
  for (auto _ : state)
    benchmark::DoNotOptimize(eps_energy(u, 0.05, grid, true).total);
}
BENCHMARK(BM_SurfaceEnergyAnalyticJets)->Unit(benchmark::kMillisecond);

void BM_ReducedGradientParallel(benchmark::State& state) {
  Grid1D grid = build_profile_grid(4096);
  std::vector<double> coeffs{0.3, -0.2, 0.1, 0.05, -0.02, 0.01};
  for (auto _ : state)
    benchmark::DoNotOptimize(coeff_gradient(2, coeffs, 0.01, grid, true));
}
BENCHMARK(BM_ReducedGradientParallel)->Unit(benchmark::kMicrosecond);

void BM_ReducedGradientSerial(benchmark::State& state) {
  Grid1D grid = build_profile_grid(4096);
  std::vector<double> coeffs{0.3, -0.2, 0.1, 0.05, -0.02, 0.01};
  for (auto _ : state)
    benchmark::DoNotOptimize(coeff_gradient(2, coeffs, 0.01, grid, false));
}
BENCHMARK(BM_ReducedGradientSerial)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
