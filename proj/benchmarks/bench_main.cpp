#include <benchmark/benchmark.h>

#include "dampstring/discretization.hpp"
#include "dampstring/riesz.hpp"
#include "dampstring/spectral.hpp"
#include "dampstring/trace.hpp"

using namespace dampstring;

namespace {

DiscreteOperatorSet min_ops(int n) {
  return assemble(n, constant(1.0, CoefficientKind::Density), constant(1.0), BoundaryCondition::min());
}

void BM_EigenDiracDense(benchmark::State& state) {
  DiscreteOperatorSet ops = min_ops(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigen_dirac(ops, {false, EigenBackend::Dense}));
}
BENCHMARK(BM_EigenDiracDense)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_EigenDiracTridiagonal(benchmark::State& state) {
  DiscreteOperatorSet ops = min_ops(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigen_dirac(ops, {false, EigenBackend::Tridiagonal}));
}
BENCHMARK(BM_EigenDiracTridiagonal)->Arg(64)->Arg(256)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_TraceCoefficients(benchmark::State& state) {
  DiscreteOperatorSet ops = min_ops(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(series_coefficients(ops, 5));
}
BENCHMARK(BM_TraceCoefficients)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RieszResolution(benchmark::State& state) {
  DiscreteOperatorSet ops = min_ops(static_cast<int>(state.range(0)));
  Spectrum s = eigen_dirac(ops);
  ClusterRule rule;
  rule.spacing = 3.141592653589793;
  for (auto _ : state) {
    std::vector<RieszCluster> c = cluster_eigenvalues(s, rule);
    compute_projections(c, ops);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_RieszResolution)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
