#include <benchmark/benchmark.h>

// the distro's benchmark_main archive carries LTO objects from another gcc build
BENCHMARK_MAIN();
