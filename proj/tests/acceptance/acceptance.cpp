// One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcdist/common/errors.hpp"
#include "mcdist/dss/matrix.hpp"
#include "mcdist/dss/rpn.hpp"
#include "mcdist/dss/serialize.hpp"
#include "mcdist/formulations/formulations.hpp"
#include "mcdist/formulations/names.hpp"
#include "mcdist/ir/residuals.hpp"
#include "mcdist/lp/lp.hpp"
#include "mcdist/pf/bfs.hpp"
#include "mcdist/pf/compare.hpp"
#include "oracles.hpp"
#include "run_cli.hpp"
#include "test_support.hpp"

using namespace mcdist;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Collects the worst value of a metric and the case that produced it.
struct Worst {
    double value = 0.0;
    std::string where;
    void update(double v, const std::string& w) {
        if (!(v <= value)) {
            value = v;
            where = w;
        }
    }
    std::string str() const {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.3e (%s)", value, where.c_str());
        return buf;
    }
};

std::vector<std::string> sweep_feeders() {
    auto names = test::ratio_radial_feeders();
    names.push_back("delta_dy.dss");
    return names;
}

Outcome newton_vs_sweep() {
    Worst delta;
    for (const auto& name : sweep_feeders()) {
        auto net = test::load(name);
        auto a = pf::solve_newton(net);
        auto b = pf::solve_bfs(net);
        if (!a.converged || !b.converged) return {false, name + " did not converge"};
        delta.update(pf::compare_delta(a, b, pf::floating_buses(net)), name);
    }
    return {delta.value <= 1e-8, "worst delta " + delta.str()};
}

Outcome soc_containment() {
    Worst residual, minor;
    for (const auto& name : test::ratio_radial_feeders()) {
        auto net = test::load(name);
        auto m = formulations::build_opf_socbfm(net);
        auto a = formulations::lift_solution(net, pf::solve_newton(net));
        auto r = ir::evaluate_residuals(m, a);
        residual.update(r.max, name + " " + r.worst_label);
        const auto x = ir::values_for(m, a);
        for (const char* family : {"soc_w", "soc_s", "soc_l"}) minor.update(test::worst_rotated_gap(m, x, family), name + " " + family);
    }
    return {residual.value <= 1e-8 && minor.value <= 1e-10,
            "max residual " + residual.str() + ", minor gap " + minor.str()};
}

Outcome ivr_into_acr() {
    Worst residual;
    for (const auto& name : test::all_feeders()) {
        auto net = test::load(name);
        auto sol = pf::solve_newton(net);
        if (!sol.converged) return {false, name + " did not converge"};
        // the Newton iterate is an IVR solution
        const double ivr = ir::evaluate_residuals(formulations::build_pf_ivr(net), pf::to_ivr_assignment(net, sol)).max;
        if (ivr > 1e-8) return {false, name + " is not an IVR solution"};
        auto r = ir::evaluate_residuals(formulations::build_opf_acr(net), formulations::to_acr_assignment(net, sol));
        residual.update(r.max, name + " " + r.worst_label);
    }
    return {residual.value <= 1e-8, "max ACR residual " + residual.str()};
}

Outcome cone_forms_agree() {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> noise(0.0, 1.0);
    Worst identity;
    long disagreements = 0, checked = 0;
    for (const auto& name : test::ratio_radial_feeders()) {
        auto net = test::load(name);
        auto m = formulations::build_opf_socbfm(net);
        const auto base = ir::values_for(m, formulations::lift_solution(net, pf::solve_newton(net)));
        std::vector<const ir::Constraint*> cones;
        for (const auto& c : m.constraints)
            if (std::holds_alternative<ir::RotatedSocConstraint>(c.body)) cones.push_back(&c);
        for (int sample = 0; sample < 1000; ++sample) {
            auto x = base;
            for (auto& v : x) v += 0.05 * (1.0 + std::abs(v)) * noise(rng);
            for (const auto* c : cones) {
                const auto& rot = std::get<ir::RotatedSocConstraint>(c->body);
                const auto norm = ir::rotated_soc_to_soc(rot);
                const double x1 = ir::evaluate(rot.x1, x), x2 = ir::evaluate(rot.x2, x);
                double sq = 0.0, nsq = 0.0;
                for (const auto& a : rot.args) sq += std::pow(ir::evaluate(a, x), 2);
                for (const auto& a : norm.args) nsq += std::pow(ir::evaluate(a, x), 2);
                const double bound = ir::evaluate(norm.bound, x);
                // ||(2a, x1 - x2)||^2 - (x1 + x2)^2 == 4 (|a|^2 - x1 x2)
                const double scale = 1.0 + bound * bound + nsq;
                identity.update(std::abs((nsq - bound * bound) - 4.0 * (sq - x1 * x2)) / scale, name + " " + c->label);
                const double margin = x1 * x2 - sq;
                if (std::abs(margin) <= 1e-9 * scale) continue;
                const bool in_rot = ir::residual(*c, x) <= 1e-12;
                const bool in_norm = ir::residual({c->label, norm}, x) <= 1e-12;
                ++checked;
                if (in_rot != in_norm) ++disagreements;
            }
        }
    }
    return {disagreements == 0 && identity.value <= 1e-12,
            std::to_string(checked) + " memberships, " + std::to_string(disagreements) +
                " disagreements, identity error " + identity.str()};
}

Outcome parser_properties() {
    std::mt19937_64 rng(0);
    Worst rpn;
    for (int i = 0; i < 1000; ++i) {
        auto e = test::random_expr(rng, 4);
        const double want = test::Infix(e.infix).run();
        rpn.update(std::abs(dss::parse_rpn("(" + e.rpn + ")") - want) / std::max(1.0, std::abs(want)), e.rpn);
    }

    int mirror_fail = 0;
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 4;
        std::string text = "[";
        std::vector<std::vector<double>> lower(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i) text += " | ";
            for (std::size_t j = 0; j <= i; ++j) {
                lower[i].push_back(u(rng));
                text += dss::format_number(lower[i][j]) + " ";
            }
        }
        auto m = dss::parse_matrix(text + "]", n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (m(i, j) != (i >= j ? lower[i][j] : lower[j][i])) ++mirror_fail;
    }

    std::string round_trip_fail;
    for (const auto& name : test::all_feeders()) {
        auto model = dss::parse_file(test::fixture(name));
        auto again = dss::parse_text(dss::to_dss(model));
        if (!(model == again) || dss::to_dss(again) != dss::to_dss(model)) round_trip_fail += name + " ";
    }

    bool cycle = false;
    try {
        dss::parse_file(test::fixture("redirect/cycle_a.dss"));
    } catch (const ParseError& e) {
        cycle = std::string(e.what()).find("redirect cycle") != std::string::npos;
    }
    const bool pass = rpn.value <= 1e-12 && mirror_fail == 0 && round_trip_fail.empty() && cycle;
    return {pass, "rpn error " + rpn.str() + ", mirror failures " + std::to_string(mirror_fail) + ", round trip " +
                      (round_trip_fail.empty() ? std::string("ok") : "failed: " + round_trip_fail) +
                      ", cycle " + (cycle ? "detected" : "missed")};
}

Outcome jacobian_check() {
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    Worst err;
    for (const auto& name : test::all_feeders()) {
        auto net = test::load(name);
        pf::NewtonSystem sys(net);
        for (int trial = 0; trial < 20; ++trial) {
            RVector x = sys.flat_start();
            for (int i = 0; i < x.size(); ++i) x(i) += u(rng);
            err.update(test::jacobian_error(sys, x), name + " state " + std::to_string(trial));
        }
    }
    return {err.value <= 1e-5, "worst relative error " + err.str()};
}

Outcome lp_brute_force() {
    std::mt19937_64 rng(2024);
    Worst gap, duality;
    for (int trial = 0; trial < 200; ++trial) {
        const auto in = test::random_box_lp(rng, 8, 12);
        const double expected = test::brute_force(in);
        auto r = lp::solve_lp(in.problem());
        if (r.status != lp::LpStatus::Optimal) return {false, "instance " + std::to_string(trial) + " " + r.message};
        gap.update(std::abs(r.objective - expected) / std::max(1.0, std::abs(expected)), "instance " + std::to_string(trial));
        duality.update(std::abs(r.objective - r.dual_objective), "instance " + std::to_string(trial));
    }
    return {gap.value <= 1e-7 && duality.value <= 1e-6, "objective error " + gap.str() + ", duality gap " + duality.str()};
}

struct StorageRun {
    double charged = 0.0, discharged = 0.0, e_init = 0.0, e_final = 0.0, bookkeeping = 0.0;
};

StorageRun run_storage(double efficiency) {
    auto net = test::load("storage2.dss");
    net.periods = network::periods_from_json(test::read_file(test::fixture("periods2.json")));
    auto& st = net.storages.at(0);
    st.eff_charge = st.eff_discharge = efficiency;
    auto r = lp::solve_lp(formulations::build_opf_lindistflow(net));
    if (r.status != lp::LpStatus::Optimal) throw std::runtime_error("storage OPF: " + r.message);
    const double dt = net.periods->delta_t_hours;
    StorageRun out;
    out.e_init = out.e_final = st.energy_init;
    double prev = st.energy_init;
    for (int t = 0; t < static_cast<int>(net.periods->periods.size()); ++t) {
        const double sc = r.assignment.at(formulations::names::var("sc", st.id, "", t));
        const double sd = r.assignment.at(formulations::names::var("sd", st.id, "", t));
        const double e = r.assignment.at(formulations::names::var("se", st.id, "", t));
        out.bookkeeping = std::max(out.bookkeeping, std::abs(e - prev - st.eff_charge * sc * dt + sd * dt / st.eff_discharge));
        out.charged += sc * dt;
        out.discharged += sd * dt;
        prev = out.e_final = e;
    }
    return out;
}

Outcome storage_energy() {
    const auto unit = run_storage(1.0);
    // net dispatch zero => trajectory closes
    const double net_dispatch = unit.charged - unit.discharged;
    const double closure = std::abs((unit.e_final - unit.e_init) - net_dispatch);
    const bool unit_ok = closure <= 1e-10 && unit.bookkeeping <= 1e-10 &&
                         (std::abs(net_dispatch) > 1e-10 || std::abs(unit.e_final - unit.e_init) <= 1e-10);

    const auto lossy = run_storage(0.9);
    const double loss = lossy.charged - lossy.discharged - (lossy.e_final - lossy.e_init);
    const double expected = (1.0 - 0.9 * 0.9) * lossy.charged;
    const bool closes = std::abs(lossy.e_final - lossy.e_init) <= 1e-10;
    const double loss_err = std::abs(loss - expected);
    const bool lossy_ok = closes && lossy.charged > 1e-6 && loss_err <= 1e-8;

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "unit: closure %.1e, net dispatch %.1e; eta 0.9: throughput %.6f, loss %.6f vs %.6f (err %.1e)",
                  closure, net_dispatch, lossy.charged, loss, expected, loss_err);
    return {unit_ok && lossy_ok, buf};
}

Outcome lindistflow_light_load() {
    auto net = test::load("light_load.dss");
    auto sol = pf::solve_newton(net);
    auto r = lp::solve_lp(formulations::build_opf_lindistflow(net));
    if (r.status != lp::LpStatus::Optimal) return {false, r.message};
    Worst rel;
    for (const auto& b : net.buses) {
        for (int p : b.phases) {
            const std::string tag = formulations::names::phase_tag(p);
            const double vm = std::sqrt(r.assignment.at(formulations::names::bus("w", b.id, tag)));
            const double exact = std::abs(sol.voltage(b.id, p));
            rel.update(std::abs(vm - exact) / exact, b.id + "." + tag);
        }
    }
    return {rel.value <= 0.02, "worst relative difference " + rel.str()};
}

std::string strip_timings(const std::string& report) {
    if (report.empty()) return report;
    try {
        auto j = nlohmann::ordered_json::parse(report);
        j.erase("timings_ms");
        return j.dump();
    } catch (const std::exception&) {
        return report;
    }
}

Outcome cli_determinism() {
    const auto dir = test::scratch_dir("determinism");
    const auto f = [](const std::string& n) { return test::fixture(n); };
    const std::string sol_a = (dir / "newton.json").string(), sol_b = (dir / "bfs.json").string();
    // seed the compare inputs first
    test::run_cli("pf " + f("unbalanced3.dss") + " --out " + sol_a);
    test::run_cli("pf " + f("unbalanced3.dss") + " --method bfs --out " + sol_b);

    struct Case {
        std::string args;
        std::string out;  // output file, if any
    };
    const std::vector<Case> cases = {
        {"parse " + f("sample_feeder.dss"), ""},
        {"parse " + f("mini13.dss") + " --to dss", ""},
        {"parse " + f("mini13.dss") + " --to network", ""},
        {"parse " + f("redirect/master.dss") + " --out " + (dir / "parse.json").string(), (dir / "parse.json").string()},
        {"pf " + f("mini13.dss"), ""},
        {"pf " + f("mini13.dss") + " --method bfs --out " + (dir / "pf.json").string(), (dir / "pf.json").string()},
        {"pf " + f("floating.dss"), ""},
        {"opf " + f("cheap_gen.dss"), ""},
        {"opf " + f("storage2.dss") + " --periods " + f("periods2.json") + " --out " + (dir / "opf.json").string(),
         (dir / "opf.json").string()},
        {"opf " + f("infeasible_vmin.dss"), ""},
        {"export " + f("mini13.dss") + " --form ivr", ""},
        {"export " + f("mini13.dss") + " --form acr", ""},
        {"export " + f("mini13.dss") + " --form socbfm --conic", ""},
        {"export " + f("storage2.dss") + " --form lindistflow --periods " + f("periods2.json") + " --out " +
             (dir / "model.json").string(),
         (dir / "model.json").string()},
        {"compare " + sol_a + " " + sol_b, ""},
        {"pf " + f("meshed.dss") + " --method bfs", ""},
    };
    std::string failed;
    for (const auto& c : cases) {
        std::string outputs[2], files[2], reports[2];
        int codes[2];
        for (int run = 0; run < 2; ++run) {
            auto r = test::run_cli("--seed 0 --json " + c.args);
            outputs[run] = r.out;
            reports[run] = strip_timings(r.err);
            codes[run] = r.code;
            if (!c.out.empty()) {
                files[run] = test::slurp(c.out);
                fs::remove(c.out);
            }
        }
        if (outputs[0] != outputs[1] || files[0] != files[1] || reports[0] != reports[1] || codes[0] != codes[1])
            failed += "[" + c.args + "] ";
    }
    return {failed.empty(), std::to_string(cases.size()) + " commands x2 with --seed 0" +
                                (failed.empty() ? std::string(", stdout/files/reports identical") : ", differ: " + failed)};
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> run;
        double budget_ms;  // wall-clock limit, 0 for none
    };
    const std::vector<Criterion> criteria = {
        {"Newton vs backward-forward sweep on radial fixtures", newton_vs_sweep, 5000},
        {"SOC-BFM contains lifted power-flow solutions", soc_containment, 2000},
        {"IVR solutions satisfy the ACR model", ivr_into_acr, 0},
        {"rotated and norm cone forms agree", cone_forms_agree, 0},
        {"parser properties", parser_properties, 1000},
        {"Newton Jacobian vs central differences", jacobian_check, 0},
        {"simplex vs vertex enumeration", lp_brute_force, 10000},
        {"multi-period storage energy balance", storage_energy, 0},
        {"LinDistFlow on the light-load feeder", lindistflow_light_load, 0},
        {"CLI determinism", cli_determinism, 0},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (criteria[k].budget_ms > 0 && ms > criteria[k].budget_ms) {
            o.pass = false;
            o.detail += ", over the " + std::to_string(static_cast<int>(criteria[k].budget_ms)) + " ms budget";
        }
        std::printf("%s %2zu %s: %s [%.0f ms]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name.c_str(),
                    o.detail.c_str(), ms);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
