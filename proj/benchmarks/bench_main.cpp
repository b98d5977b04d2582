#include <benchmark/benchmark.h>

#include "wfshape/attack.hpp"
#include "wfshape/baselines.hpp"
#include "wfshape/regulator.hpp"
#include "wfshape/synth.hpp"

using namespace wfshape;

namespace {

// A page of roughly `packets` packets laid out as three surges.
Trace page(std::size_t packets) {
    SynthProfile p;
    p.class_id = "bench";
    p.surge_sizes = {packets / 2, packets / 3, packets - packets / 2 - packets / 3};
    p.surge_times = {0.0, 3.0, 9.0};
    return generate(p, 1, 1).traces.front();
}

void BM_Regulator(benchmark::State& state) {
    const auto trace = page(static_cast<std::size_t>(state.range(0)));
    const auto params = regulator_heavy();
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(apply_regulator(trace, params, seed++));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Regulator)->Arg(500)->Arg(2000)->Arg(8000);

void BM_Front(benchmark::State& state) {
    const auto trace = page(static_cast<std::size_t>(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(apply_front(trace, front_2500(), seed++));
}
BENCHMARK(BM_Front)->Arg(2000);

void BM_Tamaraw(benchmark::State& state) {
    const auto trace = page(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(apply_tamaraw(trace, tamaraw_default()));
}
BENCHMARK(BM_Tamaraw)->Arg(2000);

void BM_Features(benchmark::State& state) {
    const auto trace = page(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(extract_features(trace));
}
BENCHMARK(BM_Features)->Arg(2000);

void BM_ClosedWorld(benchmark::State& state) {
    const auto ds = generate(separable_profiles(10), static_cast<std::size_t>(state.range(0)), 1);
    EvalOptions opts;
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_closed_world(ds, std::nullopt, opts));
}
BENCHMARK(BM_ClosedWorld)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
