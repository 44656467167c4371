// Oracle vs spanning-tree strategies on small corpus graphs. The oracle
// enumerates r^h1 weightings per sample and interpolates, so it falls behind
// the Laurent strategy quickly as h1 and the charge degree grow; these
// benchmarks make that gap measurable release over release.

#include "drcalc/invariant.hpp"

#include <benchmark/benchmark.h>

using namespace drcalc;

namespace {

EvalConfig nocache() {
    EvalConfig cfg;
    cfg.use_cache = false;
    return cfg;
}

const StableGraph kLoop{{{1, {1}}}, {{0, 0}}};
const StableGraph kTwoBanana{{{1, {}}, {0, {1}}}, {{0, 1}, {0, 1}}};
const StableGraph kThreeBanana{{{0, {1}}, {0, {2}}}, {{0, 1}, {0, 1}, {0, 1}}};
const StableGraph kLoopTail{{{1, {}}, {1, {1}}}, {{0, 0}, {0, 1}}};

void bench_graph(benchmark::State& state, const StableGraph& G, int mode) {
    EvalConfig cfg = nocache();
    for (auto _ : state) {
        GraphInvariant r = mode == 0   ? cg_oracle(G, cfg)
                           : mode == 1 ? cg_zagier(G, ZagierStrategy::Laurent, cfg)
                                       : cg_zagier(G, ZagierStrategy::Division, cfg);
        benchmark::DoNotOptimize(r.value);
    }
}

} // namespace

BENCHMARK_CAPTURE(bench_graph, loop_oracle, kLoop, 0);
BENCHMARK_CAPTURE(bench_graph, loop_laurent, kLoop, 1);
BENCHMARK_CAPTURE(bench_graph, loop_division, kLoop, 2);
BENCHMARK_CAPTURE(bench_graph, two_banana_oracle, kTwoBanana, 0);
BENCHMARK_CAPTURE(bench_graph, two_banana_laurent, kTwoBanana, 1);
BENCHMARK_CAPTURE(bench_graph, two_banana_division, kTwoBanana, 2);
BENCHMARK_CAPTURE(bench_graph, loop_tail_oracle, kLoopTail, 0);
BENCHMARK_CAPTURE(bench_graph, loop_tail_laurent, kLoopTail, 1);
BENCHMARK_CAPTURE(bench_graph, loop_tail_division, kLoopTail, 2);
BENCHMARK_CAPTURE(bench_graph, three_banana_oracle, kThreeBanana, 0);
BENCHMARK_CAPTURE(bench_graph, three_banana_laurent, kThreeBanana, 1);
BENCHMARK_CAPTURE(bench_graph, three_banana_division, kThreeBanana, 2);

BENCHMARK_MAIN();
