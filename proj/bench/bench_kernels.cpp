#include <benchmark/benchmark.h>

#include "learn/kernels.hpp"

using namespace learn;

namespace {

void BM_ShareCheckSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_share_sets_serial(1, static_cast<std::size_t>(state.range(0)), 8));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ShareCheckParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_share_sets_parallel(1, static_cast<std::size_t>(state.range(0)), 8));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

const std::vector<SharePoint>& two_known() {
  static const std::vector<SharePoint> pts = {{{1}, {5}, {}}, {{2}, {11}, {}}};
  return pts;
}

void BM_HistogramSerial(benchmark::State& state) {
  PrimeField f(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(secret_histogram_serial(f, 3, two_known()));
}

void BM_HistogramParallel(benchmark::State& state) {
  PrimeField f(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(secret_histogram_parallel(f, 3, two_known()));
}

std::vector<RunConfig> sweep_configs() {
  std::vector<RunConfig> configs;
  for (Scheme s : {Scheme::None, Scheme::EncOnly, Scheme::Onion, Scheme::Learn, Scheme::LearnHardened}) {
    RunConfig c;
    c.scheme = s;
    c.cycles = 5000;
    configs.push_back(c);
  }
  return configs;
}

void BM_SweepSerial(benchmark::State& state) {
  auto configs = sweep_configs();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(configs));
}

void BM_SweepParallel(benchmark::State& state) {
  auto configs = sweep_configs();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_parallel(configs));
}

}  // namespace

BENCHMARK(BM_ShareCheckSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_ShareCheckParallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_HistogramSerial)->Arg(61)->Arg(101);
BENCHMARK(BM_HistogramParallel)->Arg(61)->Arg(101);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
