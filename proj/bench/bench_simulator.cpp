// Serial reference estimators vs the OpenMP kernels on the same configs.

#include <benchmark/benchmark.h>

#include "vanet/simulator.hpp"

namespace {

vanet::SimConfig link_config(std::int64_t trials) {
  const vanet::MarkovLink link(0.02, 0.02, 0.01);
  return {.fleet_size = 10, .link = link, .horizon = 2500, .trials = trials, .seed = 7};
}

vanet::SimConfig existence_config(std::int64_t trials) {
  const vanet::MarkovLink link(0.05, 0.05, 0.01);
  return {.fleet_size = 10, .link = link, .horizon = 32, .trials = trials, .seed = 7};
}

const vanet::ClusterSpec kCluster{2, 2, 10};

void BM_LinkDurationReference(benchmark::State& state) {
  const auto config = link_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vanet::reference::estimate_link_duration(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LinkDurationParallel(benchmark::State& state) {
  const auto config = link_config(state.range(0));
  const vanet::Parallelism par{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(vanet::estimate_link_duration(config, par));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ClusterExistenceReference(benchmark::State& state) {
  const auto config = existence_config(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        vanet::reference::estimate_cluster_existence(config, kCluster, 15, 15, 30));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ClusterExistenceParallel(benchmark::State& state) {
  const auto config = existence_config(state.range(0));
  const vanet::Parallelism par{static_cast<int>(state.range(1))};
  for (auto _ : state)
    benchmark::DoNotOptimize(vanet::estimate_cluster_existence(config, kCluster, 15, 15, 30, par));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_LinkDurationReference)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinkDurationParallel)->Args({200, 1})->Args({200, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusterExistenceReference)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusterExistenceParallel)
    ->Args({20000, 1})
    ->Args({20000, 4})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
