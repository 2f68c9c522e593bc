#include <benchmark/benchmark.h>

#include "m3sim/meta_model.hpp"
#include "m3sim/multi_model.hpp"
#include "m3sim/rng.hpp"
#include "m3sim/simulation.hpp"
#include "m3sim/synth.hpp"

using namespace m3sim;

namespace {

TimeSeries noisy_series(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    TimeSeries s{0, 30, std::vector<double>(n), Unit::Watt};
    for (double& v : s.values) v = rng.uniform(100, 1000);
    return s;
}

MultiModel members(std::size_t k, std::size_t n) {
    std::vector<MemberSeries> raw;
    for (std::size_t j = 0; j < k; ++j) raw.push_back({"M" + std::to_string(j), noisy_series(n, j)});
    return assemble(std::move(raw), Metric::Power, {1});
}

}  // namespace

static void BM_Window(benchmark::State& state) {
    const auto s = noisy_series(201600, 1);
    const auto m = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(window(s, {m}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_Window)->Arg(1)->Arg(10)->Arg(100);

static void BM_MetaAggregate(benchmark::State& state) {
    const auto mm = members(8, 201600);
    const auto agg = state.range(0) == 0 ? MetaAgg::Mean : MetaAgg::Median;
    for (auto _ : state) benchmark::DoNotOptimize(build_meta_model(mm, {agg, std::nullopt}));
    state.SetItemsProcessed(state.iterations() * 8 * 201600);
    state.SetLabel(agg == MetaAgg::Mean ? "mean" : "median");
}
BENCHMARK(BM_MetaAggregate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_EvaluatePower(benchmark::State& state) {
    const auto tl = simulate_timeline(reference_scenario(20160, 30, 16, 3));
    const auto model = builtin_archive().at(state.range(0) == 0 ? "M3" : "M18").spec;
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_power(tl, model));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tl.samples));
}
BENCHMARK(BM_EvaluatePower)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SimulateTimeline(benchmark::State& state) {
    const auto scenario = reference_scenario(static_cast<std::size_t>(state.range(0)), 30, 16, 3);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_timeline(scenario));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateTimeline)->Arg(20160)->Arg(201600)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
