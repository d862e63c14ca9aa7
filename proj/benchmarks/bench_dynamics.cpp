#include <benchmark/benchmark.h>

#include "girglab/dynamics.hpp"
#include "girglab/girg.hpp"

using namespace girglab;

static void BM_RunUntilStable(benchmark::State& state) {
    girg::GirgParams p;
    p.n = state.range(0);
    p.tau = 2.5;
    p.k = girg::calibrate_k(20.0, 2, p.tau);
    p.seed = 7;
    const auto g = girg::build_graph(p);
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto conf = dynamics::init_opinions(g, dynamics::UniformRandom{0.5, ++seed});
        CounterRng rng(seed);
        const auto st = dynamics::run_until_stable(g, conf, rng);
        steps += st.steps_taken;
    }
    state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_RunUntilStable)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_SquareSurvivalRun(benchmark::State& state) {
    girg::GirgParams p;
    p.n = 10000;
    p.tau = 2.15;
    p.k = girg::calibrate_k(20.0, 2, p.tau);
    p.seed = 3;
    const auto g = girg::build_graph(p);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto conf = dynamics::init_opinions(g, dynamics::Square{static_cast<double>(state.range(0))});
        CounterRng rng(++seed);
        benchmark::DoNotOptimize(dynamics::run_until_stable(g, conf, rng).survived);
    }
}
BENCHMARK(BM_SquareSurvivalRun)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_LargestBlueComponent(benchmark::State& state) {
    girg::GirgParams p;
    p.n = 100000;
    p.k = 2.0;
    p.seed = 5;
    const auto g = girg::build_graph(p);
    const auto conf = dynamics::init_opinions(g, dynamics::UniformRandom{0.6, 1});
    for (auto _ : state)
        benchmark::DoNotOptimize(dynamics::largest_blue_component(g, conf));
}
BENCHMARK(BM_LargestBlueComponent)->Unit(benchmark::kMillisecond);
