#include <random>

#include <benchmark/benchmark.h>

#include "mcdist/dss/parser.hpp"
#include "mcdist/formulations/formulations.hpp"
#include "mcdist/lp/lp.hpp"
#include "mcdist/network/from_dss.hpp"
#include "synthetic_feeder.hpp"

using namespace mcdist;

// Dense feasible box LP: A x = A x0, 0 <= x <= 10.
static lp::LpProblem random_lp(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), start(0.0, 10.0);
    std::vector<double> x0(cols);
    for (auto& v : x0) v = start(rng);
    lp::LpProblem p;
    p.num_vars = cols;
    p.num_rows = rows;
    for (int i = 0; i < rows; ++i) {
        double b = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double a = coef(rng);
            p.entries.push_back({i, j, a});
            b += a * x0[j];
        }
        p.senses.push_back(ir::Sense::Eq);
        p.rhs.push_back(b);
    }
    for (int j = 0; j < cols; ++j) {
        p.lb.push_back(0.0);
        p.ub.push_back(10.0);
        p.cost.push_back(coef(rng));
    }
    return p;
}

static void BM_RandomLp(benchmark::State& state) {
    const int rows = static_cast<int>(state.range(0));
    const auto p = random_lp(rows, 3 * rows / 2, 1);
    for (auto _ : state) benchmark::DoNotOptimize(lp::solve_lp(p));
}
BENCHMARK(BM_RandomLp)->Arg(8)->Arg(40)->Arg(120)->Unit(benchmark::kMillisecond);

static void BM_LinDistFlow(benchmark::State& state) {
    const auto net = network::from_dss(dss::parse_text(bench::synthetic_feeder(static_cast<int>(state.range(0)))));
    const auto model = formulations::build_opf_lindistflow(net);
    for (auto _ : state) benchmark::DoNotOptimize(lp::solve_lp(model));
}
BENCHMARK(BM_LinDistFlow)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
