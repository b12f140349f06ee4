#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/formulations.hpp"
#include "mcdist/formulations/names.hpp"
#include "mcdist/ir/residuals.hpp"
#include "mcdist/lp/lp.hpp"
#include "mcdist/pf/newton.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mcdist;
using namespace mcdist::formulations;
using mcdist::test::load;
using mcdist::test::worst_rotated_gap;

namespace {

std::set<std::string> component_ids(const network::Network& net) {
    std::set<std::string> ids;
    for (const auto& b : net.buses) ids.insert("bus." + b.id);
    for (const auto& c : net.branches) ids.insert(c.id);
    for (const auto& c : net.transformers) ids.insert(c.id);
    for (const auto& c : net.shunts) ids.insert(c.id);
    for (const auto& c : net.loads) ids.insert(c.id);
    for (const auto& c : net.generators) ids.insert(c.id);
    for (const auto& c : net.storages) ids.insert(c.id);
    return ids;
}

std::string label_component(const std::string& label) {
    const auto open = label.find('(');
    const auto end = label.find_first_of(",)", open);
    return label.substr(open + 1, end - open - 1);
}

void expect_labels_name_components(const ir::MathModel& m, const network::Network& net, const std::string& name) {
    const auto ids = component_ids(net);
    for (const auto& c : m.constraints) EXPECT_TRUE(ids.count(label_component(c.label))) << name << " " << c.label;
}

lp::LpResult solve_lindistflow(const network::Network& net) {
    auto res = lp::solve_lp(build_opf_lindistflow(net));
    EXPECT_EQ(res.status, lp::LpStatus::Optimal) << res.message;
    return res;
}

}  // namespace

TEST(Ivr, NewtonSolutionSatisfiesModel) {
    for (const auto& name : test::all_feeders()) {
        auto net = load(name);
        auto sol = pf::solve_newton(net);
        ASSERT_TRUE(sol.converged) << name;
        auto m = build_pf_ivr(net);
        auto r = ir::evaluate_residuals(m, pf::to_ivr_assignment(net, sol));
        EXPECT_LE(r.max, 1e-8) << name << " " << r.worst_label;
        expect_labels_name_components(m, net, name);
    }
}

TEST(Ivr, TwoBusFixedPointOracle) {
    auto net = load("two_bus.dss");
    const Complex z(0.01, 0.01), s(0.1, 0.05);
    Complex u(1.0, 0.0);
    for (int k = 0; k < 200; ++k) u = 1.0 - z * std::conj(s / u);

    pf::PfSolution sol;
    sol.converged = true;
    sol.voltages["src"][0] = 1.0;
    sol.voltages["load"][0] = u;
    for (const auto& br : net.branches) sol.branches[br.id].i_series = {(1.0 - u) / z};
    pf::complete_solution(net, sol);
    auto r = ir::evaluate_residuals(build_pf_ivr(net), pf::to_ivr_assignment(net, sol));
    EXPECT_LE(r.max, 1e-12) << r.worst_label;
}

TEST(Ivr, ZeroLoadFlatStart) {
    auto net = load("zero_load.dss");
    auto sol = pf::solve_newton(net);
    auto r = ir::evaluate_residuals(build_pf_ivr(net), pf::to_ivr_assignment(net, sol));
    EXPECT_LE(r.max, 1e-14);
}

TEST(Ivr, DeltaLoadEntersTwoBalanceRows) {
    auto net = load("sample_feeder.dss");
    auto m = build_pf_ivr(net);
    const int cdr = m.var(names::var("cdr", "load.ld3", "ab"));
    int rows = 0;
    for (const auto& c : m.constraints) {
        const auto* lin = std::get_if<ir::LinearConstraint>(&c.body);
        if (!lin || ir::label_family(c.label) != "kcl_re") continue;
        for (const auto& t : lin->expr.terms) {
            if (t.var == cdr) {
                ++rows;
                EXPECT_EQ(std::abs(t.coef), 1.0);
            }
        }
    }
    EXPECT_EQ(rows, 2);
}

TEST(Acr, NewtonSolutionSatisfiesModel) {
    for (const auto& name : test::all_feeders()) {
        auto net = load(name);
        auto sol = pf::solve_newton(net);
        auto m = build_opf_acr(net);
        auto r = ir::evaluate_residuals(m, to_acr_assignment(net, sol));
        EXPECT_LE(r.max, 1e-8) << name << " " << r.worst_label;
        expect_labels_name_components(m, net, name);
    }
}

TEST(Acr, ObjectiveIsFuelCost) {
    auto net = load("cheap_gen.dss");
    auto m = build_opf_acr(net);
    EXPECT_FALSE(m.objective.linear.terms.empty());
}

TEST(SocBfm, LiftedPowerFlowIsContained) {
    for (const auto& name : test::ratio_radial_feeders()) {
        auto net = load(name);
        auto sol = pf::solve_newton(net);
        auto m = build_opf_socbfm(net);
        auto a = lift_solution(net, sol);
        auto r = ir::evaluate_residuals(m, a);
        EXPECT_LE(r.max, 1e-8) << name << " " << r.worst_label;
        expect_labels_name_components(m, net, name);

        // rank-one lift: every 2x2 minor cone holds with equality
        const auto x = ir::values_for(m, a);
        for (const auto* family : {"soc_w", "soc_s", "soc_l"}) {
            EXPECT_LE(worst_rotated_gap(m, x, family), 1e-10) << name << " " << family;
        }
    }
}

TEST(SocBfm, ConicFormAcceptsTheSamePoint) {
    auto net = load("mini13.dss");
    auto a = lift_solution(net, pf::solve_newton(net));
    auto rotated = build_opf_socbfm(net);
    auto conic = build_opf_socbfm(net, {.conic = true});
    ASSERT_EQ(rotated.constraints.size(), conic.constraints.size());
    for (std::size_t k = 0; k < conic.constraints.size(); ++k) {
        EXPECT_EQ(rotated.constraints[k].label, conic.constraints[k].label);
        EXPECT_FALSE(std::holds_alternative<ir::RotatedSocConstraint>(conic.constraints[k].body));
    }
    EXPECT_LE(ir::evaluate_residuals(conic, a).max, 1e-8);
}

TEST(SocBfm, ZeroLoadLift) {
    auto net = load("zero_load.dss");
    auto m = build_opf_socbfm(net);
    auto a = lift_solution(net, pf::solve_newton(net));
    for (const auto& [name, v] : a) {
        if (name.rfind("l(", 0) == 0 || name.rfind("sr(", 0) == 0 || name.rfind("si(", 0) == 0) {
            EXPECT_LT(std::abs(v), 1e-20) << name;
        }
    }
    EXPECT_LE(ir::evaluate_residuals(m, a).max, 1e-12);
}

TEST(SocBfm, RejectsMeshedAndWindingChanges) {
    EXPECT_THROW(build_opf_socbfm(load("meshed.dss")), UnsupportedError);
    EXPECT_THROW(build_opf_socbfm(load("delta_dy.dss")), UnsupportedError);
    EXPECT_THROW(build_opf_socbfm(load("floating.dss")), UnsupportedError);
}

TEST(SocBfm, LiftNeedsConvergedSolution) {
    auto net = load("two_bus.dss");
    pf::PfSolution sol;
    EXPECT_THROW(lift_solution(net, sol), ModelError);
}

TEST(LinDistFlow, ZeroLoadKeepsSlackVoltage) {
    auto net = load("zero_load.dss");
    auto res = solve_lindistflow(net);
    for (const auto& b : net.buses) {
        for (int p : b.phases) {
            EXPECT_NEAR(res.assignment.at(names::bus("w", b.id, names::phase_tag(p))), 1.0, 1e-9) << b.id;
        }
    }
}

TEST(LinDistFlow, TwoBusVoltageDrop) {
    auto net = load("two_bus.dss");
    auto res = solve_lindistflow(net);
    const double w1 = res.assignment.at(names::bus("w", "src", "a"));
    const double w2 = res.assignment.at(names::bus("w", "load", "a"));
    EXPECT_NEAR(w1, 1.0, 1e-12);
    EXPECT_NEAR(w2, w1 - 2.0 * (0.01 * 0.1 + 0.01 * 0.05), 1e-10);
}

TEST(LinDistFlow, StorageEnergyBookkeeping) {
    auto net = load("storage2.dss");
    net.periods = network::periods_from_json(test::read_file(test::fixture("periods2.json")));
    auto res = solve_lindistflow(net);
    const auto& st = net.storages.at(0);
    const auto& a = res.assignment;
    double prev = st.energy_init;
    for (std::size_t t = 0; t < net.periods->periods.size(); ++t) {
        const int ti = static_cast<int>(t);
        const double sc = a.at(names::var("sc", st.id, "", ti));
        const double sd = a.at(names::var("sd", st.id, "", ti));
        const double e = a.at(names::var("se", st.id, "", ti));
        const double dt = net.periods->delta_t_hours;
        EXPECT_NEAR(e, prev + st.eff_charge * sc * dt - sd * dt / st.eff_discharge, 1e-9);
        EXPECT_GE(e, -1e-9);
        EXPECT_LE(e, st.energy_max + 1e-9);
        prev = e;
    }
    // charging happens in the cheap period
    EXPECT_GT(a.at(names::var("sc", st.id, "", 0)), 1e-6);
    EXPECT_GT(a.at(names::var("sd", st.id, "", 1)), 1e-6);
}

TEST(LinDistFlow, QuadraticCostNeedsSegments) {
    auto net = load("cheap_gen.dss");
    net.generators.back().c2 = 1.0;
    EXPECT_THROW(build_opf_lindistflow(net), UnsupportedError);
    auto m = build_opf_lindistflow(net, {.pwl_segments = 4});
    EXPECT_TRUE(m.is_linear());
}

TEST(LinDistFlow, CloseToPowerFlowOnLightLoad) {
    auto net = load("light_load.dss");
    auto sol = pf::solve_newton(net);
    auto res = solve_lindistflow(net);
    for (const auto& b : net.buses) {
        for (int p : b.phases) {
            const double vm = std::sqrt(res.assignment.at(names::bus("w", b.id, names::phase_tag(p))));
            EXPECT_NEAR(vm, std::abs(sol.voltage(b.id, p)), 1e-4) << b.id;
        }
    }
}

TEST(LinDistFlow, RejectsWindingChanges) {
    EXPECT_THROW(build_opf_lindistflow(load("delta_dy.dss")), UnsupportedError);
    EXPECT_THROW(build_opf_lindistflow(load("meshed.dss")), UnsupportedError);
}

TEST(LinDistFlow, LabelsNameComponents) {
    auto net = load("storage2.dss");
    net.periods = network::periods_from_json(test::read_file(test::fixture("periods2.json")));
    expect_labels_name_components(build_opf_lindistflow(net), net, "storage2");
}

TEST(Tags, ParseFormulation) {
    EXPECT_EQ(parse_formulation("SocBfm"), FormulationTag::SOC_BFM);
    EXPECT_EQ(parse_formulation("lindistflow"), FormulationTag::LINDISTFLOW);
    EXPECT_THROW(parse_formulation("dcp"), UnsupportedError);
}
