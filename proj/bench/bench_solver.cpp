#include <benchmark/benchmark.h>

#include "schedrl/experiment.hpp"
#include "schedrl/solver.hpp"

using namespace schedrl;

namespace {

const TaskSystem& instance() {
  static const TaskSystem sys = [] {
    InstanceSpec spec;
    spec.seed = 3;
    spec.target_min = 64;
    return generate_instances(spec, 1).front();
  }();
  return sys;
}

const StateClassSpace& space() {
  static const StateClassSpace s = enumerate_classes(instance());
  return s;
}

void BM_GaussSeidel(benchmark::State& state) {
  for (auto _ : state) {
    auto v = value_iteration(space(), instance().pmfs(), DiscountFactor(0.95));
    benchmark::DoNotOptimize(v.values.data());
  }
  state.counters["classes"] = static_cast<double>(space().size());
}
BENCHMARK(BM_GaussSeidel)->Unit(benchmark::kMillisecond);

void BM_JacobiParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto v = value_iteration_parallel(space(), instance().pmfs(), DiscountFactor(0.95), {}, nullptr, threads);
    benchmark::DoNotOptimize(v.values.data());
  }
}
BENCHMARK(BM_JacobiParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.strategies = parse_strategy_list("exploit,egreedy:1.0,balanced:10");
  config.epochs = 500;
  return config;
}

const std::vector<TaskSystem>& batch() {
  static const std::vector<TaskSystem> b = [] {
    InstanceSpec spec;
    spec.seed = 9;
    spec.target_max = 16;
    return generate_instances(spec, 8);
  }();
  return b;
}

void BM_ExperimentSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(batch(), small_config()).curves.size());
}
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);

void BM_ExperimentParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(batch(), small_config(), workers).curves.size());
}
BENCHMARK(BM_ExperimentParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
