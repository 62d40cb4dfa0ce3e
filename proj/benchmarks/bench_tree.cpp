#include <benchmark/benchmark.h>

#include "rbt/workloads.hpp"

using namespace rbt;

namespace {

TreeConfig config(benchmark::State& state, SelfAdjustMode mode = SelfAdjustMode::None) {
    TreeConfig c;
    c.block_capacity = static_cast<std::size_t>(state.range(1));
    c.fanout = static_cast<std::size_t>(state.range(2));
    c.selfadjust_mode = mode;
    return c;
}

// Wall time is secondary; the counters carry the model's cost (block I/Os).
void record(benchmark::State& state, const MetricsRecord& m) {
    state.counters["ios"] = static_cast<double>(m.reads + m.writes);
    state.counters["height"] = static_cast<double>(m.height);
    if (m.ratio) state.counters["ratio"] = *m.ratio;
}

void BM_InsertFlush(benchmark::State& state) {
    const TreeConfig c = config(state);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) record(state, run_insert_only(c, n).metrics);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Sort(benchmark::State& state) {
    const TreeConfig c = config(state);
    const auto keys = random_keys(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        const SortRun run = run_sort(c, keys);
        if (!run.sorted_and_complete) state.SkipWithError("sort verification failed");
        record(state, run.metrics);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ZipfSearch(benchmark::State& state, SelfAdjustMode mode) {
    const TreeConfig c = config(state, mode);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        const ZipfRun run = run_zipf_search(c, n, 10 * n);
        record(state, run.metrics);
        state.counters["hot_depth"] = run.hot_mean_depth;
        state.counters["mean_depth"] = run.overall_mean_depth;
    }
}

}  // namespace

BENCHMARK(BM_InsertFlush)
    ->ArgsProduct({{1 << 12, 1 << 14, 1 << 16}, {32}, {8}})
    ->Args({100000, 64, 16})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sort)->ArgsProduct({{1000, 10000, 100000}, {64}, {16}})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ZipfSearch, none, SelfAdjustMode::None)->Args({10000, 16, 16})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ZipfSearch, rerandomize, SelfAdjustMode::Rerandomize)
    ->Args({10000, 16, 16})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ZipfSearch, counter, SelfAdjustMode::Counter)->Args({10000, 16, 16})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
