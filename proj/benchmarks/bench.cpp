#include <benchmark/benchmark.h>

#include "qalg/factor.hpp"

using namespace qalg;

static void BM_gf_mul(benchmark::State& state) {
    GFContext f(static_cast<unsigned>(state.range(0)));
    uint64_t a = 0x5a5a5a5a & f.mask(), b = 0x3c3c3c3c & f.mask();
    if (!a) a = 1;
    if (!b) b = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(a = f.mul(a, b));
    }
}
BENCHMARK(BM_gf_mul)->Arg(1)->Arg(8)->Arg(16)->Arg(32);

static void BM_poly_factor(benchmark::State& state) {
    GFContext f(4);
    Rng rng(17);
    Poly p = random_monic(f, static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(poly_factor(p, 7));
    }
}
BENCHMARK(BM_poly_factor)->Arg(8)->Arg(24)->Arg(48);

BENCHMARK_MAIN();
