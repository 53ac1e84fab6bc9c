#include <benchmark/benchmark.h>

#include "balayage/kernel.hpp"

using namespace balayage;

namespace {

void BM_SphereAssembly(benchmark::State& state) {
  KernelSpec k;
  auto set = std::make_shared<const DiscreteSet>(
      discretize(SetSpec{Sphere{{0, 0, 0}, 1.0}}, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_matrix(k, set));
  state.counters["panels"] = static_cast<double>(set->size());
}
BENCHMARK(BM_SphereAssembly)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RayAssembly(benchmark::State& state) {
  KernelSpec k;
  k.alpha = 1.5;
  k.dim = 2;
  const std::vector<double> radius{static_cast<double>(state.range(0))};
  auto set = std::make_shared<const DiscreteSet>(exhaustion(Ray{{1, 0}, {1, 0}}, radius, 8).front());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_matrix(k, set));
  state.counters["panels"] = static_cast<double>(set->size());
}
BENCHMARK(BM_RayAssembly)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
