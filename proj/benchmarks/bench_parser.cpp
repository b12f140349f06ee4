#include <benchmark/benchmark.h>

#include "mcdist/dss/parser.hpp"
#include "mcdist/dss/rpn.hpp"
#include "mcdist/dss/serialize.hpp"
#include "synthetic_feeder.hpp"

using namespace mcdist;

static void BM_ParseFeeder(benchmark::State& state) {
    const std::string text = bench::synthetic_feeder(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dss::parse_text(text));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseFeeder)->Arg(10)->Arg(100)->Arg(1000);

static void BM_SerializeFeeder(benchmark::State& state) {
    const auto model = dss::parse_text(bench::synthetic_feeder(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(dss::to_dss(model));
}
BENCHMARK(BM_SerializeFeeder)->Arg(100)->Arg(1000);

static void BM_Rpn(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(dss::parse_rpn("(2 3 * 4.5 + sqrt 7 inv /)"));
}
BENCHMARK(BM_Rpn);

BENCHMARK_MAIN();
