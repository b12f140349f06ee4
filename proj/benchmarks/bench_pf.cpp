#include <benchmark/benchmark.h>

#include "mcdist/dss/parser.hpp"
#include "mcdist/network/from_dss.hpp"
#include "mcdist/pf/bfs.hpp"
#include "mcdist/pf/newton.hpp"
#include "synthetic_feeder.hpp"

using namespace mcdist;

namespace {

network::Network feeder(benchmark::State& state) {
    return network::from_dss(dss::parse_text(bench::synthetic_feeder(static_cast<int>(state.range(0)))));
}

}  // namespace

static void BM_Newton(benchmark::State& state) {
    const auto net = feeder(state);
    for (auto _ : state) benchmark::DoNotOptimize(pf::solve_newton(net));
}
BENCHMARK(BM_Newton)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Bfs(benchmark::State& state) {
    const auto net = feeder(state);
    for (auto _ : state) benchmark::DoNotOptimize(pf::solve_bfs(net));
}
BENCHMARK(BM_Bfs)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Jacobian(benchmark::State& state) {
    const auto net = feeder(state);
    const pf::NewtonSystem sys(net);
    const auto x = sys.flat_start();
    for (auto _ : state) benchmark::DoNotOptimize(sys.jacobian(x));
}
BENCHMARK(BM_Jacobian)->Arg(100)->Arg(500);

BENCHMARK_MAIN();
