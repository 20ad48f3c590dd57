#include <benchmark/benchmark.h>

#include "tllab/commutator_model.hpp"
#include "tllab/fiber_oracle.hpp"
#include "tllab/gram_recursion.hpp"
#include "tllab/jones_wenzl.hpp"

using namespace tllab;

// Fresh cache per iteration so the whole recursion is timed.
static void BM_JonesWenzl(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        JWCache cache(ScalarContext::from_N(3));
        benchmark::DoNotOptimize(cache.get(n).size());
    }
}
BENCHMARK(BM_JonesWenzl)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_ComposeJW(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ScalarContext ctx = ScalarContext::from_N(3);
    const tl::Element& p = jw(n, ctx);
    for (auto _ : state) benchmark::DoNotOptimize(tl::compose(p, p, ctx).size());
}
BENCHMARK(BM_ComposeJW)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_Realize(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const tl::Element& p = jw(n, ScalarContext::from_N(3));
    for (auto _ : state) benchmark::DoNotOptimize(realize(p, 3).entries.data());
}
BENCHMARK(BM_Realize)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_GramRecursive(benchmark::State& state) {
    const int n_max = static_cast<int>(state.range(0));
    const double q = q_from_N(7);
    for (auto _ : state) benchmark::DoNotOptimize(gram_recursive(3, 0.5, q, n_max).size());
}
BENCHMARK(BM_GramRecursive)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_RieszMargin(benchmark::State& state) {
    const double q = q_from_N(7);
    for (auto _ : state) benchmark::DoNotOptimize(riesz_margin(2, 1.0, q, 40).margin);
}
BENCHMARK(BM_RieszMargin)->Unit(benchmark::kMillisecond);

static void BM_MoveTables(benchmark::State& state) {
    const int p_max = static_cast<int>(state.range(0));
    const RecCoeffParams params = RecCoeffParams::from_root(2, 1);
    const double q = q_from_N(7);
    for (auto _ : state) benchmark::DoNotOptimize(fg_tables(2, 4, p_max, params, q).f_diag.size());
}
BENCHMARK(BM_MoveTables)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_PhiDirect(benchmark::State& state) {
    const int p_max = static_cast<int>(state.range(0));
    const RecCoeffParams params = RecCoeffParams::from_root(2, 1);
    const double q = q_from_N(7);
    for (auto _ : state) benchmark::DoNotOptimize(phi_table_direct(2, 4, p_max, params, q).rows.size());
}
BENCHMARK(BM_PhiDirect)->Arg(20)->Arg(60)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
