#include <benchmark/benchmark.h>

#include <random>

#include "radner/oracle.hpp"
#include "radner/statics.hpp"
#include "radner/verification.hpp"
#include "reference.hpp"

using namespace radner;
using namespace radner::testing;

namespace {

const TrajectoryModel kModel = TrajectoryModel::twap(1.0, 0.1);

MarketSpec random_spec(int agents) {
  std::mt19937_64 rng(static_cast<unsigned>(agents));
  std::uniform_real_distribution<double> target(-300.0, 300.0);
  std::vector<double> targets(static_cast<std::size_t>(agents));
  for (double& t : targets) t = target(rng);
  return make_spec(targets, 0.05);
}

void BM_Solve(benchmark::State& state) {
  const auto spec = random_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec, kModel));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Solve)->RangeMultiplier(2)->Range(2, 256)->Complexity();

void BM_SolveTabulated(benchmark::State& state) {
  const TrajectoryModel model(1.0, TabulatedKappa{{0.2, 0.15, 0.1, 0.1, 0.15, 0.2}},
                              TabulatedGamma{{0.0, 0.3, 0.5, 0.65, 0.8, 0.9, 1.0}});
  const auto spec = random_spec(20);
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec, model));
}
BENCHMARK(BM_SolveTabulated);

void BM_FastRank(benchmark::State& state) {
  const auto spec = random_spec(static_cast<int>(state.range(0)));
  const auto a = relative_targets(spec.agents);
  for (auto _ : state) benchmark::DoNotOptimize(fast_rank(a));
}
BENCHMARK(BM_FastRank)->RangeMultiplier(4)->Range(4, 1024);

void BM_Verify(benchmark::State& state) {
  const auto s = solve(reference_spec(0.2), kModel);
  for (auto _ : state) benchmark::DoNotOptimize(run_all_checks(s, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Verify)->Arg(401)->Arg(2001);

void BM_Oracle(benchmark::State& state) {
  const auto s = solve(reference_spec(0.2), kModel);
  for (auto _ : state) benchmark::DoNotOptimize(deviation_oracle(s, 20, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Oracle)->Arg(200)->Arg(800);

void BM_LambdaSweep(benchmark::State& state) {
  const auto spec = reference_spec();
  const auto grid = lambda_grid(2.0, 200);
  for (auto _ : state) {
    const auto sweep = lambda_sweep(spec, kModel, grid);
    benchmark::DoNotOptimize(kink_points(sweep));
  }
}
BENCHMARK(BM_LambdaSweep);

}  // namespace

BENCHMARK_MAIN();
