#include <benchmark/benchmark.h>
#include <omp.h>

#include "clca/config.hpp"
#include "clca/sweep.hpp"

namespace {

const clca::NetworkModel& model() {
    static const clca::NetworkModel m = *clca::load_config(CLCA_DEFAULT_CONFIG).model;
    return m;
}

clca::SweepPlan plan() {
    clca::SweepPlan p;
    p.v_grid = {150.0, 750.0};
    p.seeds = {1, 2};
    p.algos = {clca::Algorithm::clca, clca::Algorithm::neely};
    p.slots = 500;
    return p;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto p = plan();
    for (auto _ : state) benchmark::DoNotOptimize(clca::run_sweep_serial(model(), p));
    state.SetItemsProcessed(state.iterations() * 8 * p.slots);
}

void BM_SweepParallel(benchmark::State& state) {
    const auto p = plan();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(clca::run_sweep_parallel(model(), p, threads));
    state.SetItemsProcessed(state.iterations() * 8 * p.slots);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
