#include <benchmark/benchmark.h>

#include <map>

#include "gridflex/bilinear.hpp"
#include "gridflex/contingency.hpp"
#include "gridflex/lpcore.hpp"
#include "gridflex/repression.hpp"
#include "gridflex/testdata.hpp"

namespace {

using namespace gridflex;

const Network& bundled(const std::string& name) {
  static std::map<std::string, Network> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, bundled_case(name).network).first;
  return it->second;
}

const char* const kCases[] = {"pjm5", "ieee24", "ieee118_stressed"};

void BM_FixedBetaCut(benchmark::State& state) {
  const Network& net = bundled(kCases[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_beta({net, 0.0, Direction::Max}).objective);
  state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_FixedBetaCut)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void BM_SmartCut(benchmark::State& state) {
  const Network& net = bundled(kCases[state.range(0)]);
  const double cap = state.range(0) == 2 ? 0.15 : 0.2;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_mfacts({net, 0.0, Direction::Max, {StrategyKind::Smart, cap}}, {}).objective);
  state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_SmartCut)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_BudgetedCut(benchmark::State& state) {
  const Network& net = bundled("pjm5");
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_mfacts({net, 0.0, Direction::Max, {StrategyKind::Smart, 0.2}, 0.5}, {}).objective);
}
BENCHMARK(BM_BudgetedCut)->Unit(benchmark::kMillisecond);

void BM_Oracle5Bus(benchmark::State& state) {
  const Network& net = bundled("pjm5");
  for (auto _ : state)
    benchmark::DoNotOptimize(brute_force_oracle({net, 0.0, Direction::Max, {StrategyKind::Inductive, 0.2}}, 5).objective);
}
BENCHMARK(BM_Oracle5Bus)->Unit(benchmark::kMillisecond);

void BM_Repression(benchmark::State& state) {
  const Network& net = bundled("pjm5");
  const auto kind = static_cast<StrategyKind>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_repression(net, {kind, 0.2}, AlphaGrid::uniform(), {}).total_lr);
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_Repression)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_RtsContingency(benchmark::State& state) {
  const Network& net = bundled("ieee24");
  SolverSettings s;
  s.threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(n_minus_1(net, {StrategyKind::Base, StrategyKind::Smart}, {0.2}, AlphaGrid::uniform(), s));
}
BENCHMARK(BM_RtsContingency)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
