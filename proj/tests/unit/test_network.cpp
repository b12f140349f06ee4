#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mcdist/common/errors.hpp"
#include "mcdist/network/json.hpp"
#include "mcdist/network/kron.hpp"
#include "mcdist/network/topology.hpp"
#include "mcdist/network/validate.hpp"
#include "test_support.hpp"

using namespace mcdist;
using namespace mcdist::network;
using mcdist::test::load;

namespace {

network::Network from_text(const std::string& text) { return from_dss(dss::parse_text(text)); }

const Branch& branch(const Network& net, const std::string& id) {
    for (const auto& b : net.branches) {
        if (b.id == id) return b;
    }
    throw std::runtime_error("no branch " + id);
}

CMatrix random_complex(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    }
    return m;
}

}  // namespace

TEST(Kron, DiagonalKeepsDiagonal) {
    CMatrix z = CMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) z(i, i) = Complex(i + 1.0, 0.5 * i);
    CMatrix r = kron_reduce(z, {0, 1, 2});
    ASSERT_EQ(r.rows(), 3);
    EXPECT_LT((r - z.topLeftCorner(3, 3)).norm(), 1e-15);
}

TEST(Kron, TwoByTwoSchurComplement) {
    const Complex zs(0.3, 0.9), zm(0.1, 0.4);
    CMatrix z(2, 2);
    z << zs, zm, zm, zs;
    CMatrix r = kron_reduce(z, {0});
    EXPECT_LT(std::abs(r(0, 0) - (zs - zm * zm / zs)), 1e-15);
}

TEST(Kron, KeepAllIsIdentity) {
    std::mt19937_64 rng(1);
    CMatrix z = random_complex(rng, 4);
    EXPECT_EQ(kron_reduce(z, {0, 1, 2, 3}), z);
}

TEST(Kron, TwoStepsEqualOneStep) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        CMatrix a = random_complex(rng, 5);
        // symmetric, diagonally dominated: every principal block is invertible
        CMatrix z = a * a.transpose() + CMatrix::Identity(5, 5) * Complex(10.0, 5.0);
        CMatrix one = kron_reduce(z, {0, 1, 2});
        CMatrix two = kron_reduce(kron_reduce(z, {0, 1, 2, 3}), {0, 1, 2});
        EXPECT_LT((one - two).norm(), 1e-12 * one.norm());
    }
}

TEST(Kron, SingularEliminatedBlock) {
    CMatrix z = CMatrix::Identity(2, 2);
    z(1, 1) = 0.0;
    EXPECT_THROW(kron_reduce(z, {0}), ModelError);
}

TEST(Kron, FourWireLineIsReduced) {
    auto net = from_text(
        "New Circuit.c basekv=12.47 bus1=s\n"
        "New Line.l bus1=s.1.2.3.0 bus2=b.1.2.3.0 phases=4 rmatrix=[0.3|0.1 0.3|0.1 0.1 0.3|0.1 0.1 0.1 0.5] "
        "xmatrix=[0.6|0.2 0.6|0.2 0.2 0.6|0.2 0.2 0.2 0.9] cmatrix=[0|0 0|0 0 0|0 0 0 0]");
    const Branch& br = branch(net, "line.l");
    ASSERT_EQ(br.size(), 3u);
    CMatrix z(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double r = i == j ? (i == 3 ? 0.5 : 0.3) : 0.1;
            const double x = i == j ? (i == 3 ? 0.9 : 0.6) : 0.2;
            z(i, j) = Complex(r, x);
        }
    }
    const double zbase = std::pow(12470.0 / std::sqrt(3.0), 2) / 1e6;
    CMatrix want = kron_reduce(z, {0, 1, 2}) / zbase;
    EXPECT_LT((br.z - want).norm(), 1e-12);
}

TEST(PerUnit, LineResistance) {
    auto net = from_text(
        "New Circuit.c basekv=2.4 phases=1 bus1=s.1\n"
        "New Line.l bus1=s.1 bus2=b.1 phases=1 rmatrix=[0.09] xmatrix=[0] cmatrix=[0] length=1");
    EXPECT_NEAR(branch(net, "line.l").z(0, 0).real(), 0.015625, 1e-15);
}

TEST(PerUnit, RoundTripRecoversOhms) {
    auto net = load("mini13.dss");
    const Branch& br = branch(net, "line.650632");
    const double zbase = net.bus("650").vbase * net.bus("650").vbase / net.sbase;
    // 2000 ft of the 601 code; phase a self impedance in ohms per mile
    const double miles = 2000.0 / 5280.0;
    EXPECT_NEAR(br.z(0, 0).real() * zbase / miles, 0.3465, 1e-12 * 0.3465);
    EXPECT_NEAR(br.z(0, 0).imag() * zbase / miles, 1.0179, 1e-12 * 1.0179);
}

TEST(PerUnit, ZeroLoadIsValid) {
    auto net = from_text(
        "New Circuit.c basekv=12.47 bus1=s\n"
        "New Load.z bus1=s kw=0 kvar=0");
    ASSERT_EQ(net.loads.size(), 1u);
    for (auto s : net.loads[0].s_nom) EXPECT_EQ(s, Complex(0, 0));
}

TEST(PerUnit, CapacitorAdmittance) {
    auto net = load("mini13.dss");
    const Shunt* cap = nullptr;
    for (const auto& s : net.shunts) {
        if (s.id == "capacitor.cap1") cap = &s;
    }
    ASSERT_NE(cap, nullptr);
    // 100 kvar per phase at rated voltage, 1 MVA base
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(cap->y(k, k).imag(), 0.1, 1e-12);
    EXPECT_NEAR(std::abs(cap->y(0, 1)), 0.0, 1e-15);
}

TEST(PerUnit, ChargingSplitEqually) {
    auto net = load("mini13.dss");
    const Branch& br = branch(net, "line.650632");
    EXPECT_GT(br.y_fr.norm(), 0.0);
    EXPECT_EQ(br.y_fr, br.y_to);
    EXPECT_EQ(br.z, br.z.transpose());
}

TEST(FromDss, SlackPhasors) {
    auto net = from_text("New Circuit.c basekv=12.47 pu=1.05 angle=10 bus1=s");
    const Bus& s = net.slack();
    ASSERT_EQ(s.v_set.size(), 3u);
    const double deg = kPi / 180.0;
    EXPECT_LT(std::abs(s.v_set[0] - std::polar(1.05, 10 * deg)), 1e-15);
    EXPECT_LT(std::abs(s.v_set[1] - std::polar(1.05, -110 * deg)), 1e-15);
    EXPECT_LT(std::abs(s.v_set[2] - std::polar(1.05, 130 * deg)), 1e-15);
}

TEST(FromDss, BasesPropagateThroughTransformers) {
    auto net = load("feeder4.dss");
    EXPECT_NEAR(net.bus("n2").vbase, 12470.0 / std::sqrt(3.0), 1e-9);
    EXPECT_NEAR(net.bus("n3").vbase, 4160.0 / std::sqrt(3.0), 1e-9);
    EXPECT_NEAR(net.bus("n4").vbase, 4160.0 / std::sqrt(3.0), 1e-9);
}

TEST(FromDss, Feeder4Counts) {
    auto net = load("feeder4.dss");
    int buses = 0, branches = 0;
    for (const auto& b : net.buses) buses += b.internal ? 0 : 1;
    for (const auto& b : net.branches) branches += b.internal ? 0 : 1;
    EXPECT_EQ(buses, 4);
    EXPECT_EQ(branches, 3);
    EXPECT_EQ(net.transformers.size(), 1u);
    EXPECT_EQ(net.slack().id, "sourcebus");
    EXPECT_EQ(net.loads.size(), 3u);
}

TEST(FromDss, OpenSwitchIsZeroImpedanceAndOutOfService) {
    auto net = load("feeder4.dss");
    const Branch& sw = branch(net, "line.l3");
    EXPECT_TRUE(sw.is_switch);
    EXPECT_FALSE(sw.status);
    EXPECT_EQ(sw.z.norm(), 0.0);
    EXPECT_FALSE(find_cycle(net).has_value());
}

TEST(FromDss, Errors) {
    EXPECT_THROW(from_text("New Circuit.c basekv=12.47 bus1=s\nNew Line.l bus1=s bus2=b linecode=nope"), ModelError);
    EXPECT_THROW(from_text("New Circuit.c basekv=12.47 bus1=s\nNew Load.x bus1=island kw=1"), ModelError);
    EXPECT_THROW(from_text("New Circuit.c basekv=0 bus1=s"), ModelError);
    EXPECT_THROW(from_text("New Load.x bus1=s kw=1"), ModelError);
    EXPECT_THROW(from_text("New Circuit.c basekv=12.47 bus1=s\n"
                           "New Transformer.t windings=3 buses=[s a b] kvs=[12.47 4.16 0.48]"),
                 UnsupportedError);
    EXPECT_THROW(from_text("New Circuit.c basekv=12.47 bus1=s\n"
                           "New Load.x bus1=s.1.2 phases=2 conn=delta kw=1"),
                 UnsupportedError);
}

TEST(Transformer, YyIdentityRatio) {
    TransformerSpec spec;
    spec.id = "t";
    spec.bus_primary = "p";
    spec.bus_secondary = "s";
    spec.conn_primary = spec.conn_secondary = {0, 1, 2};
    spec.kv_primary = spec.kv_secondary = 12.47;
    spec.r_percent = spec.x_percent = 0.0;
    const double vb = 12470.0 / std::sqrt(3.0);
    auto parts = decompose_transformer(spec, vb, vb, 1e6);
    EXPECT_LT((parts.ideal.t - CMatrix::Identity(3, 3)).norm(), 1e-15);
    EXPECT_EQ(parts.leakage.z.norm(), 0.0);
    EXPECT_FALSE(parts.magnetizing.has_value());
}

TEST(Transformer, DyShiftsPositiveSequenceThirtyDegrees) {
    TransformerSpec spec;
    spec.id = "t";
    spec.bus_primary = "p";
    spec.bus_secondary = "s";
    spec.conn_primary = spec.conn_secondary = {0, 1, 2};
    spec.config_primary = Connection::Delta;
    spec.kv_primary = 12.47;
    spec.kv_secondary = 4.16;
    const double vp = 12470.0 / std::sqrt(3.0), vs = 4160.0 / std::sqrt(3.0);
    auto parts = decompose_transformer(spec, vp, vs, 1e6);
    // the wye secondary is the dependent side: U_s = T U_x
    EXPECT_EQ(parts.ideal.f_bus, "s");
    const Complex alpha = std::polar(1.0, 2.0 * kPi / 3.0);
    CVector u(3);
    u << 1.0, alpha * alpha, alpha;
    CVector us = parts.ideal.t * u;
    EXPECT_NEAR(std::abs(us(0)), 1.0, 1e-12);
    EXPECT_NEAR(std::arg(us(0)) * 180.0 / kPi, 30.0, 1e-10);
}

TEST(Transformer, LeakageBaseChange) {
    TransformerSpec spec;
    spec.id = "t";
    spec.phases = 1;
    spec.bus_primary = "p";
    spec.bus_secondary = "s";
    spec.conn_primary = spec.conn_secondary = {0};
    spec.kv_primary = spec.kv_secondary = 7.2;
    spec.kva = 100.0;
    spec.r_percent = 1.0;
    spec.x_percent = 0.0;
    auto parts = decompose_transformer(spec, 7200.0, 7200.0, 1e6);
    EXPECT_NEAR(parts.leakage.z(0, 0).real(), 0.1, 1e-15);

    // three-phase rating is shared by the phases of a per-phase base
    spec.phases = 3;
    spec.conn_primary = spec.conn_secondary = {0, 1, 2};
    spec.kv_primary = spec.kv_secondary = 12.47;
    auto three = decompose_transformer(spec, 12470.0 / std::sqrt(3.0), 12470.0 / std::sqrt(3.0), 1e6);
    EXPECT_NEAR(three.leakage.z(0, 0).real(), 0.3, 1e-14);
}

TEST(Transformer, IdealPartConservesPower) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (auto [p, s] : {std::pair{Connection::Wye, Connection::Wye}, std::pair{Connection::Delta, Connection::Wye},
                        std::pair{Connection::Wye, Connection::Delta}}) {
        TransformerSpec spec;
        spec.id = "t";
        spec.bus_primary = "p";
        spec.bus_secondary = "s";
        spec.conn_primary = spec.conn_secondary = {0, 1, 2};
        spec.config_primary = p;
        spec.config_secondary = s;
        spec.kv_secondary = 4.16;
        spec.tap_primary = 1.025;
        auto tr = decompose_transformer(spec, 7199.56, 2401.77, 1e6).ideal;
        for (int trial = 0; trial < 20; ++trial) {
            CVector ut(3), ift(3);
            for (int k = 0; k < 3; ++k) {
                ut(k) = Complex(g(rng), g(rng));
                ift(k) = Complex(g(rng), g(rng));
            }
            CVector uf = tr.t * ut;
            CVector itf = -tr.t.adjoint() * ift;
            const Complex balance = uf.dot(ift) + ut.dot(itf);
            EXPECT_LT(std::abs(balance), 1e-12);
        }
    }
}

TEST(Validate, BundledFixturesHaveNoErrors) {
    for (const auto& name : test::all_feeders()) {
        auto diags = validate(load(name));
        EXPECT_FALSE(has_errors(diags)) << name;
    }
    EXPECT_TRUE(validate(load("two_bus.dss")).empty());
}

TEST(Validate, FloatingBusIsAWarning) {
    auto net = load("floating.dss");
    EXPECT_TRUE(net.bus("lv").floating);
    auto diags = validate(net);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].severity, Severity::Warning);
    EXPECT_EQ(diags[0].component, "lv");
}

TEST(Validate, MissingBusNamesTheBranch) {
    auto net = load("two_bus.dss");
    net.branches[0].t_bus = "nowhere";
    auto diags = validate(net);
    int naming = 0;
    for (const auto& d : diags) naming += d.component == "line.l1" ? 1 : 0;
    EXPECT_EQ(naming, 1);
}

TEST(Validate, MultipleSlack) {
    auto net = load("two_bus.dss");
    net.buses[1].type = BusType::Slack;
    net.buses[1].v_set = {Complex(1, 0)};
    net.index();
    bool found = false;
    for (const auto& d : validate(net)) found = found || d.rule == "multiple slack";
    EXPECT_TRUE(found);
}

TEST(Topology, MeshedCycleIsNamed) {
    auto net = load("meshed.dss");
    auto cycle = find_cycle(net);
    ASSERT_TRUE(cycle.has_value());
    EXPECT_EQ(cycle->size(), 3u);
    try {
        require_radial(net, "test");
        FAIL();
    } catch (const UnsupportedError& e) {
        EXPECT_NE(std::string(e.what()).find("radial required"), std::string::npos);
    }
}

TEST(Topology, TreeReachesEveryBus) {
    for (const auto& name : test::ratio_radial_feeders()) {
        auto net = load(name);
        auto tree = build_tree(net);
        EXPECT_EQ(tree.order.size(), net.buses.size()) << name;
    }
}

TEST(Json, SchemaAndComplexPairs) {
    auto text = to_json(load("two_bus.dss"));
    EXPECT_NE(text.find("\"mcdist.network/1\""), std::string::npos);
    EXPECT_NE(text.find("line.l1"), std::string::npos);
}

TEST(Periods, ParseSeries) {
    auto p = periods_from_json(test::read_file(test::fixture("periods2.json")));
    ASSERT_EQ(p.periods.size(), 2u);
    EXPECT_EQ(p.delta_t_hours, 1.0);
    EXPECT_EQ(p.periods[1].cost_scale, 3.0);
    EXPECT_EQ(p.periods[1].gen_scale, 1.0);
    EXPECT_THROW(periods_from_json("{\"periods\": 3}"), ModelError);
}
