#include <benchmark/benchmark.h>

#include "girglab/girg.hpp"

using namespace girglab;

static void BM_BuildGraph(benchmark::State& state) {
    girg::GirgParams p;
    p.n = state.range(0);
    p.d = static_cast<int>(state.range(1));
    p.tau = static_cast<double>(state.range(2)) / 100.0;
    p.k = 1.0;
    std::size_t edges = 0;
    for (auto _ : state) {
        p.seed++;
        const auto g = girg::build_graph(p);
        edges = g.edge_count();
        benchmark::DoNotOptimize(edges);
    }
    state.counters["edges"] = static_cast<double>(edges);
    state.SetItemsProcessed(state.iterations() * p.n);
}
BENCHMARK(BM_BuildGraph)
    ->Args({10000, 2, 300})
    ->Args({100000, 2, 300})
    ->Args({100000, 2, 215})
    ->Args({100000, 3, 250})
    ->Unit(benchmark::kMillisecond);

static void BM_SampleVertices(benchmark::State& state) {
    girg::GirgParams p;
    p.n = state.range(0);
    for (auto _ : state) {
        const CounterRng root(++p.seed);
        benchmark::DoNotOptimize(girg::sample_weights(p, root).data());
        benchmark::DoNotOptimize(girg::sample_positions(p, root).data());
    }
    state.SetItemsProcessed(state.iterations() * p.n);
}
BENCHMARK(BM_SampleVertices)->Arg(100000)->Unit(benchmark::kMillisecond);
