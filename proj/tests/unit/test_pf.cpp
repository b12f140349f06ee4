#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mcdist/common/errors.hpp"
#include "mcdist/pf/bfs.hpp"
#include "mcdist/pf/compare.hpp"
#include "mcdist/pf/load_models.hpp"
#include "mcdist/pf/newton.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mcdist;
using namespace mcdist::pf;
using mcdist::test::jacobian_error;
using mcdist::test::load;

namespace {

/// U <- 1 - z conj(S / U) for the single-phase two-bus case.
Complex two_bus_fixed_point() {
    const Complex z(0.01, 0.01), s(0.1, 0.05);
    Complex u(1.0, 0.0);
    for (int k = 0; k < 200; ++k) u = 1.0 - z * std::conj(s / u);
    return u;
}

/// Largest per-phase complex power mismatch, computed from the terminal
/// currents stored in a solution rather than from the solver's residual.
double kcl_power_mismatch(const network::Network& net, const PfSolution& sol) {
    std::map<std::pair<std::string, int>, Complex> out;  // current leaving each bus phase
    auto add = [&](const std::string& bus, int p, Complex i) { out[{bus, p}] += i; };
    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const auto& f = sol.branches.at(br.id);
        for (std::size_t k = 0; k < br.size(); ++k) {
            add(br.f_bus, br.f_conn[k], f.i_fr[k]);
            add(br.t_bus, br.t_conn[k], f.i_to[k]);
        }
    }
    for (const auto& tr : net.transformers) {
        const auto& f = sol.transformers.at(tr.id);
        for (std::size_t k = 0; k < tr.size(); ++k) {
            add(tr.f_bus, tr.f_conn[k], f.i_f[k]);
            add(tr.t_bus, tr.t_conn[k], f.i_t[k]);
        }
    }
    for (const auto& sh : net.shunts) {
        for (std::size_t k = 0; k < sh.conn.size(); ++k) {
            Complex i = 0.0;
            for (std::size_t l = 0; l < sh.conn.size(); ++l) {
                i += sh.y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * sol.voltage(sh.bus, sh.conn[l]);
            }
            add(sh.bus, sh.conn[k], i);
        }
    }
    for (const auto& ld : net.loads) {
        const auto& i = sol.load_currents.at(ld.id);
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            add(ld.bus, ld.elements[k].p, i[k]);
            if (ld.elements[k].delta()) add(ld.bus, ld.elements[k].q, -i[k]);
        }
    }
    for (const auto& g : net.generators) {
        const auto& i = sol.generator_currents.at(g.id);
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            add(g.bus, g.elements[k].p, -i[k]);
            if (g.elements[k].delta()) add(g.bus, g.elements[k].q, i[k]);
        }
    }
    double worst = 0.0;
    for (const auto& [key, i] : out) worst = std::max(worst, std::abs(sol.voltage(key.first, key.second) * std::conj(i)));
    return worst;
}

}  // namespace

TEST(Newton, ZeroLoadConvergesToSlackPhasors) {
    auto net = load("zero_load.dss");
    auto sol = solve_newton(net);
    ASSERT_TRUE(sol.converged);
    EXPECT_LE(sol.iterations, 2);
    const auto& slack = net.slack();
    for (const auto& b : net.buses) {
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            EXPECT_LT(std::abs(sol.voltage(b.id, b.phases[k]) - slack.v_set[k]), 1e-12);
        }
    }
    for (const auto& [id, f] : sol.branches) {
        for (auto i : f.i_series) EXPECT_LT(std::abs(i), 1e-12);
    }
}

TEST(Newton, TwoBusMatchesFixedPoint) {
    auto sol = solve_newton(load("two_bus.dss"));
    ASSERT_TRUE(sol.converged);
    EXPECT_LT(std::abs(sol.voltage("load", 0) - two_bus_fixed_point()), 1e-10);
}

TEST(Newton, SlackPhasorsAreExact) {
    for (const auto& name : test::all_feeders()) {
        auto net = load(name);
        auto sol = solve_newton(net);
        const auto& s = net.slack();
        for (std::size_t k = 0; k < s.phases.size(); ++k) EXPECT_EQ(sol.voltage(s.id, s.phases[k]), s.v_set[k]) << name;
    }
}

TEST(Newton, KclPowerMismatchAtConvergence) {
    for (const auto& name : test::all_feeders()) {
        auto net = load(name);
        auto sol = solve_newton(net);
        ASSERT_TRUE(sol.converged) << name;
        EXPECT_LE(sol.max_residual, 1e-10) << name;
        EXPECT_LE(kcl_power_mismatch(net, sol), 1e-8) << name;
    }
}

TEST(Newton, ConstantImpedanceNetworksSolveInTwoIterations) {
    for (const auto& name : {"unbalanced3.dss", "mini13.dss", "delta_dy.dss", "floating.dss", "meshed.dss"}) {
        auto net = load(name);
        for (auto& ld : net.loads) ld.zip = {1.0, 0.0, 0.0};
        auto sol = solve_newton(net);
        ASSERT_TRUE(sol.converged) << name;
        EXPECT_LE(sol.iterations, 2) << name;
    }
}

TEST(Newton, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (const auto& name : {"unbalanced3.dss", "sample_feeder.dss", "delta_dy.dss", "floating.dss"}) {
        auto net = load(name);
        NewtonSystem sys(net);
        for (int trial = 0; trial < 3; ++trial) {
            RVector x = sys.flat_start();
            for (int i = 0; i < x.size(); ++i) x(i) += u(rng);
            EXPECT_LE(jacobian_error(sys, x), 1e-5) << name;
        }
    }
}

TEST(Newton, IterationLimitIsReportedNotThrown) {
    auto net = load("mini13.dss");
    NewtonOptions opts;
    opts.max_iterations = 1;
    auto sol = solve_newton(net, opts);
    EXPECT_FALSE(sol.converged);
    EXPECT_FALSE(sol.diagnostics.empty());
}

TEST(Newton, SingularJacobianNamesAnEquation) {
    auto net = network::from_dss(dss::parse_text(
        "New Circuit.c basekv=12.47 bus1=s\n"
        "New Line.l1 bus1=s bus2=b phases=3 r1=0.1 x1=0.2 r0=0.3 x0=0.6 c1=0 c0=0\n"
        "New Line.sw1 bus1=b bus2=c switch=yes\n"
        "New Line.sw2 bus1=b bus2=c switch=yes\n"
        "New Load.ld bus1=c kw=100 kvar=10 kv=12.47"));
    auto sol = solve_newton(net);
    EXPECT_FALSE(sol.converged);
    ASSERT_FALSE(sol.diagnostics.empty());
    EXPECT_NE(sol.diagnostics[0].find("singular Jacobian at equation"), std::string::npos) << sol.diagnostics[0];
}

TEST(Newton, ProvidedStartIsUsed) {
    auto net = load("unbalanced3.dss");
    auto first = solve_newton(net);
    NewtonOptions opts;
    opts.start = StartMode::Provided;
    opts.initial = first;
    auto again = solve_newton(net, opts);
    EXPECT_TRUE(again.converged);
    EXPECT_LE(again.iterations, 1);
}

TEST(Bfs, ZeroLoad) {
    auto net = load("zero_load.dss");
    auto sol = solve_bfs(net);
    ASSERT_TRUE(sol.converged);
    for (const auto& b : net.buses) {
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            EXPECT_LT(std::abs(sol.voltage(b.id, b.phases[k]) - net.slack().v_set[k]), 1e-14);
        }
    }
}

TEST(Bfs, TwoBusAgreesWithNewtonAndOracle) {
    auto net = load("two_bus.dss");
    auto b = solve_bfs(net);
    auto n = solve_newton(net);
    ASSERT_TRUE(b.converged);
    EXPECT_LT(std::abs(b.voltage("load", 0) - two_bus_fixed_point()), 1e-10);
    EXPECT_LE(compare_delta(n, b), 1e-10);
}

TEST(Bfs, ImpedanceLoadOnSingleBranchTakesOneSweep) {
    auto net = network::from_dss(dss::parse_text(
        "New Circuit.c basekv=1 phases=1 bus1=s.1\n"
        "New Line.l bus1=s.1 bus2=b.1 phases=1 rmatrix=[0.01] xmatrix=[0.02] cmatrix=[0]\n"
        "New Load.z bus1=b.1 phases=1 kv=1 kw=200 kvar=50 model=2"));
    auto sol = solve_bfs(net);
    EXPECT_TRUE(sol.converged);
    EXPECT_EQ(sol.iterations, 1);
    // linear divider: U = 1 / (1 + z y) with y = conj(S)
    const Complex z(0.01, 0.02), y = std::conj(Complex(0.2, 0.05));
    EXPECT_LT(std::abs(sol.voltage("b", 0) - 1.0 / (1.0 + z * y)), 1e-13);
}

TEST(Bfs, AgreesWithNewtonOnRadialFeeders) {
    for (const auto& name : test::ratio_radial_feeders()) {
        auto net = load(name);
        auto a = solve_newton(net);
        auto b = solve_bfs(net);
        ASSERT_TRUE(a.converged && b.converged) << name;
        EXPECT_LE(compare_delta(a, b, floating_buses(net)), 1e-8) << name;
    }
}

TEST(Bfs, UnbalancedMutualCoupling) {
    auto net = load("unbalanced3.dss");
    EXPECT_LE(compare_delta(solve_newton(net), solve_bfs(net)), 1e-8);
}

TEST(Bfs, MeshedIsRejected) { EXPECT_THROW(solve_bfs(load("meshed.dss")), UnsupportedError); }

TEST(Bfs, WyeDeltaSecondaryIsRejected) { EXPECT_THROW(solve_bfs(load("floating.dss")), UnsupportedError); }

TEST(Compare, IdenticalIsZero) {
    auto sol = solve_newton(load("sample_feeder.dss"));
    EXPECT_EQ(compare_delta(sol, sol), 0.0);
}

TEST(Compare, ScaledPhase) {
    auto a = solve_newton(load("sample_feeder.dss"));
    auto b = a;
    b.voltages["b3"][1] *= 1.001;
    auto rep = compare_report(b, a);
    EXPECT_NEAR(rep.delta, 1e-3, 1e-12);
    ASSERT_FALSE(rep.entries.empty());
    EXPECT_EQ(rep.entries[0].bus, "b3");
    EXPECT_EQ(rep.entries[0].tag, "b");
}

TEST(Compare, MismatchedSetsThrow) {
    auto a = solve_newton(load("sample_feeder.dss"));
    auto b = a;
    b.voltages.erase("b3");
    EXPECT_THROW(compare_delta(a, b), ModelError);
}

TEST(Compare, FloatingBusUsesPhaseToPhase) {
    auto net = load("floating.dss");
    auto a = solve_newton(net);
    auto b = a;
    for (auto& [p, v] : b.voltages["lv"]) v += Complex(0.2, -0.1);
    EXPECT_GT(compare_delta(a, b), 1e-3);
    EXPECT_LT(compare_delta(a, b, {"lv"}), 1e-14);
    EXPECT_EQ(floating_buses(net), (std::set<std::string>{"lv"}));
}

TEST(Solution, JsonRoundTripKeepsVoltages) {
    auto net = load("mini13.dss");
    auto sol = solve_newton(net);
    auto back = pf_from_json(to_json(net, sol));
    EXPECT_EQ(back.voltages, sol.voltages);
    EXPECT_EQ(back.converged, sol.converged);
    EXPECT_EQ(back.iterations, sol.iterations);
}

TEST(LoadModels, LowVoltageGuardIsContinuous) {
    const network::Zip p{0.0, 0.0, 1.0};
    const Complex s(0.2, 0.1);
    auto above = zip_current(Complex(kLowVoltageGuard * (1 + 1e-9), 0), s, 1.0, p);
    auto below = zip_current(Complex(kLowVoltageGuard * (1 - 1e-9), 0), s, 1.0, p);
    EXPECT_NEAR(std::abs(above.i - below.i), 0.0, 1e-6);
    auto origin = zip_current(Complex(0, 0), s, 1.0, p);
    EXPECT_EQ(origin.i, Complex(0, 0));
}

TEST(LoadModels, ZipPowerScaling) {
    const network::Zip zip{0.2, 0.3, 0.5};
    const double m = 0.95;
    auto c = zip_current(Complex(m, 0), Complex(1.0, 0.5), 1.0, zip);
    const Complex s = Complex(m, 0) * std::conj(c.i);
    const double f = 0.2 * m * m + 0.3 * m + 0.5;
    EXPECT_NEAR(s.real(), 1.0 * f, 1e-14);
    EXPECT_NEAR(s.imag(), 0.5 * f, 1e-14);
    EXPECT_NEAR(zip_factor(m, 1.0, zip), f, 1e-15);
}
