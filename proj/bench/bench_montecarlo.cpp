#include "bangbang/harness.hpp"
#include "bangbang/oscillator.hpp"

#include <benchmark/benchmark.h>

using namespace bangbang;

namespace {

MonteCarloConfig batch(int n) {
  MonteCarloConfig c;
  c.n = n;
  c.seed = 11;
  return c;
}

void BM_OscillatorSerial(benchmark::State& state) {
  const OscillatorProblem prob;
  const GuessDomain dom = GuessDomain::oscillator_default();
  const MonteCarloConfig cfg = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(prob, dom, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OscillatorParallel(benchmark::State& state) {
  const OscillatorProblem prob;
  const GuessDomain dom = GuessDomain::oscillator_default();
  const MonteCarloConfig cfg = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_batch_parallel(prob, dom, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_OscillatorSerial)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OscillatorParallel)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
