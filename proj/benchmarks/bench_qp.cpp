#include <benchmark/benchmark.h>

#include "balayage/gauss.hpp"
#include "balayage/qp.hpp"
#include "balayage/workspace.hpp"

using namespace balayage;

namespace {

const Source kCharge{std::vector<PointCharge>{{{0, 0, 2}, 1.0}}};

Workspace sphere_workspace(int res) {
  return Workspace(KernelSpec{}, std::make_shared<const DiscreteSet>(discretize(SetSpec{Sphere{{0, 0, 0}, 1.0}}, res)));
}

void BM_ConeSweep(benchmark::State& state) {
  const auto ws = sphere_workspace(static_cast<int>(state.range(0)));
  const auto b = ws.linear_term(kCharge);
  for (auto _ : state) benchmark::DoNotOptimize(solve_cone(ws.matrix(), b));
  state.counters["panels"] = static_cast<double>(ws.size());
}
BENCHMARK(BM_ConeSweep)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SimplexGauss(benchmark::State& state) {
  const auto ws = sphere_workspace(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_gauss(kCharge, ws));
  state.counters["panels"] = static_cast<double>(ws.size());
}
BENCHMARK(BM_SimplexGauss)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
