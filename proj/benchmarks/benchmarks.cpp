#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "carefree/adjuster.hpp"
#include "carefree/counterexample.hpp"
#include "carefree/experiment.hpp"
#include "carefree/testing.hpp"

namespace {

using namespace carefree;

void BM_Ebh(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> draw(0.05);
  std::vector<double> values(k);
  for (auto& v : values) v = draw(rng);
  const EVector e(values);
  for (auto _ : state) benchmark::DoNotOptimize(ebh(e, 0.05));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(k));
}
BENCHMARK(BM_Ebh)->Arg(2)->Arg(50)->Arg(200);

void BM_CounterexampleReplications(benchmark::State& state) {
  const CounterexampleConfig cfg{0.05, 1000, 20000, 3};
  for (auto _ : state) benchmark::DoNotOptimize(run_counterexample(cfg, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.reps));
}
BENCHMARK(BM_CounterexampleReplications)->Unit(benchmark::kMillisecond);

void BM_SampleReplication(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.hypotheses = static_cast<std::size_t>(state.range(0));
  cfg.horizon = 500;
  const CorrelationMatrix corr = generate_correlation(cfg.hypotheses, cfg.corr_seed);
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_replication(cfg, corr, rep++));
}
BENCHMARK(BM_SampleReplication)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_CheckAdmissible(benchmark::State& state) {
  const Adjuster adj = state.range(0) == 1 ? Adjuster::a1() : Adjuster::a2();
  for (auto _ : state) benchmark::DoNotOptimize(check_admissible(adj));
}
BENCHMARK(BM_CheckAdmissible)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
