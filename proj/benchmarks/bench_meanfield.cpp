#include <benchmark/benchmark.h>

#include <cmath>

#include "girglab/experiments.hpp"
#include "girglab/meanfield.hpp"
#include "girglab/theory.hpp"

using namespace girglab;
using namespace girglab::meanfield;

namespace {
double k_test() { return 1.2 * theory::k_min(2, 3.0); }
}

static void BM_HalfspaceOperatorBuild(benchmark::State& state) {
    const auto p = halfspace_params(2, 3.0, k_test(), 1000.0, static_cast<std::size_t>(state.range(0)),
                                    static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        const UpdateOperator op(p, Geometry::halfspace());
        benchmark::DoNotOptimize(op.value_error());
    }
}
BENCHMARK(BM_HalfspaceOperatorBuild)->Args({32, 257})->Args({64, 512})->Unit(benchmark::kMillisecond);

static void BM_HalfspaceApply(benchmark::State& state) {
    const auto p = halfspace_params(2, 3.0, k_test());
    const UpdateOperator op(p, Geometry::halfspace());
    Profile f = Profile::halfspace_indicator(p);
    for (auto _ : state) {
        f = op.apply(f);
        benchmark::DoNotOptimize(f.values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.values().size()));
}
BENCHMARK(BM_HalfspaceApply)->Unit(benchmark::kMillisecond);

static void BM_RadialOperatorBuild(benchmark::State& state) {
    const double r = static_cast<double>(state.range(0));
    const double W = std::pow(r, 0.25);
    const auto p = radial_params(3.0, k_test(), W, r, 0.5, std::sqrt(k_test()) * W + 20.0, 12);
    for (auto _ : state) {
        const UpdateOperator op(p, Geometry::radial(r));
        benchmark::DoNotOptimize(op.value_error());
    }
}
BENCHMARK(BM_RadialOperatorBuild)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_PointwiseAdvantage(benchmark::State& state) {
    const auto p = halfspace_params(2, 3.0, k_test(), 1000.0, 32, 257);
    const Profile f = Profile::halfspace_indicator(p);
    double z = 0.0;
    for (auto _ : state) {
        z = z > 20.0 ? -20.0 : z + 0.37;
        benchmark::DoNotOptimize(advantage_halfspace(f, 3.0, z).mu);
    }
}
BENCHMARK(BM_PointwiseAdvantage)->Unit(benchmark::kMicrosecond);

static void BM_DeltaStar(benchmark::State& state) {
    double y = 1.8;
    for (auto _ : state) {
        y = y > 20.0 ? 1.8 : y * 1.01;
        benchmark::DoNotOptimize(theory::solve_delta_star(y));
    }
}
BENCHMARK(BM_DeltaStar)->Unit(benchmark::kMicrosecond);

static void BM_LogisticFit(benchmark::State& state) {
    experiments::SurvivalCurve c{2.5, 1.0, {}};
    const int survived[] = {0, 0, 1, 3, 7, 12, 16, 19, 20, 20};
    for (int i = 0; i < 10; ++i)
        c.points.push_back({4.0 + 4.0 * i, survived[i], 20, 0, survived[i] / 20.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(experiments::fit_logistic(c).s0);
}
BENCHMARK(BM_LogisticFit)->Unit(benchmark::kMicrosecond);
