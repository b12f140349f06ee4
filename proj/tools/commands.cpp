#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mcdist/common/errors.hpp"
#include "mcdist/dss/parser.hpp"
#include "mcdist/dss/serialize.hpp"
#include "mcdist/formulations/formulations.hpp"
#include "mcdist/formulations/names.hpp"
#include "mcdist/ir/io.hpp"
#include "mcdist/lp/lp.hpp"
#include "mcdist/network/from_dss.hpp"
#include "mcdist/network/json.hpp"
#include "mcdist/network/validate.hpp"
#include "mcdist/pf/bfs.hpp"
#include "mcdist/pf/compare.hpp"
#include "mcdist/pf/newton.hpp"

namespace mcdist::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;
namespace names = formulations::names;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(Context& ctx, const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        ctx.out << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw ModelError("cannot write '" + out_path + "'");
    f << text;
    ctx.log << "wrote " << out_path << "\n";
}

std::string sci(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

dss::DssDataModel load_dss(Context& ctx, const std::string& file) {
    if (!fs::exists(file)) throw ModelError("cannot read '" + file + "'");
    ctx.report.add_input(file);
    StageTimer t(ctx.report, "parse");
    return dss::parse_file(file);
}

network::Network load_network(Context& ctx, const std::string& file) {
    auto model = load_dss(ctx, file);
    StageTimer t(ctx.report, "convert");
    network::FromDssOptions opts;
    opts.sbase = ctx.global.sbase;
    network::Network net = network::from_dss(model, opts);
    for (const auto& w : net.warnings) {
        ctx.report.warn(w);
        ctx.log << "warning: " << w << "\n";
    }
    std::string errors;
    for (const auto& d : network::validate(net)) {
        std::string text = d.component + ": " + d.message;
        if (d.severity == network::Severity::Error) {
            errors += (errors.empty() ? "" : "; ") + text;
        } else {
            ctx.report.warn(text);
            ctx.log << "warning: " << text << "\n";
        }
    }
    if (!errors.empty()) throw ModelError("invalid network: " + errors);
    return net;
}

void attach_periods(Context& ctx, network::Network& net, const std::string& file) {
    if (file.empty()) return;
    if (!fs::exists(file)) throw ModelError("cannot read '" + file + "'");
    ctx.report.add_input(file);
    net.periods = network::periods_from_json(read_text(file));
}

int period_count(const network::Network& net) {
    return net.periods ? static_cast<int>(net.periods->periods.size()) : 0;
}

/// Period indices as used in variable names; -1 for a single-period model.
std::vector<int> period_indices(const network::Network& net) {
    const int n = period_count(net);
    if (n == 0) return {-1};
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = t;
    return out;
}

}  // namespace

int cmd_parse(Context& ctx, const ParseArgs& args) {
    if (args.to == "network") {
        auto net = load_network(ctx, args.file);
        emit(ctx, network::to_json(net), args.out);
        ctx.report.result()["buses"] = net.buses.size();
        ctx.report.result()["branches"] = net.branches.size();
        ctx.report.result()["transformers"] = net.transformers.size();
        return kOk;
    }
    auto model = load_dss(ctx, args.file);
    for (const auto& w : model.warnings) {
        ctx.report.warn(w);
        ctx.log << "warning: " << w << "\n";
    }
    if (args.to == "json") {
        emit(ctx, dss::to_json(model), args.out);
    } else if (args.to == "dss") {
        emit(ctx, dss::to_dss(model), args.out);
    } else {
        throw UnsupportedError("parse: unknown output format '" + args.to + "'");
    }
    ordered_json counts = ordered_json::object();
    for (const auto& [cls, objs] : model.objects) counts[cls] = objs.size();
    ctx.report.result()["objects"] = counts;
    return kOk;
}

int cmd_pf(Context& ctx, const PfArgs& args) {
    auto net = load_network(ctx, args.file);
    pf::PfSolution sol;
    {
        StageTimer t(ctx.report, "solve");
        if (args.method == "newton") {
            pf::NewtonOptions opts;
            if (args.tol) opts.tolerance = *args.tol;
            if (args.max_iter) opts.max_iterations = *args.max_iter;
            sol = pf::solve_newton(net, opts);
        } else if (args.method == "bfs") {
            pf::BfsOptions opts;
            if (args.tol) opts.tolerance = *args.tol;
            if (args.max_iter) opts.max_iterations = *args.max_iter;
            sol = pf::solve_bfs(net, opts);
        } else {
            throw UnsupportedError("pf: unknown method '" + args.method + "' (newton or bfs)");
        }
    }
    auto& r = ctx.report.result();
    r["method"] = sol.method;
    r["converged"] = sol.converged;
    r["iterations"] = sol.iterations;
    r["max_residual"] = number_or_null(sol.max_residual);
    for (const auto& d : sol.diagnostics) {
        ctx.report.warn(d);
        ctx.log << "diagnostic: " << d << "\n";
    }
    ctx.log << sol.method << ": " << (sol.converged ? "converged" : "did not converge") << " after "
            << sol.iterations << " iterations, max residual " << sci(sol.max_residual, 3) << "\n";
    emit(ctx, pf::to_json(net, sol), args.out);
    return sol.converged ? kOk : kSolveFailed;
}

int cmd_opf(Context& ctx, const OpfArgs& args) {
    if (formulations::parse_formulation(args.form) != formulations::FormulationTag::LINDISTFLOW) {
        throw UnsupportedError("opf: only lindistflow is solved natively; use 'export' for " + args.form);
    }
    auto net = load_network(ctx, args.file);
    attach_periods(ctx, net, args.periods);

    ir::MathModel model;
    {
        StageTimer t(ctx.report, "build");
        formulations::LinDistFlowOptions opts;
        opts.pwl_segments = args.pwl;
        model = formulations::build_opf_lindistflow(net, opts);
    }
    lp::LpResult res;
    {
        StageTimer t(ctx.report, "solve");
        res = lp::solve_lp(model);
    }

    auto& r = ctx.report.result();
    r["formulation"] = model.formulation;
    r["status"] = lp::to_string(res.status);
    r["iterations"] = res.iterations;
    r["variables"] = model.variables.size();
    r["constraints"] = model.constraints.size();

    if (res.status == lp::LpStatus::Infeasible) {
        // rank rows by certificate weight so the binding limits show first
        auto problem = lp::extract(model);
        std::vector<int> rows;
        for (int i = 0; i < problem.num_rows; ++i) {
            if (std::abs(res.farkas[static_cast<std::size_t>(i)]) > 1e-12) rows.push_back(i);
        }
        std::stable_sort(rows.begin(), rows.end(), [&](int a, int b) {
            return std::abs(res.farkas[static_cast<std::size_t>(a)]) > std::abs(res.farkas[static_cast<std::size_t>(b)]);
        });
        ordered_json top = ordered_json::array();
        ctx.log << "infeasible: Farkas certificate over " << rows.size() << " rows, gap " << sci(res.farkas_gap, 3)
                << "\n";
        for (std::size_t k = 0; k < rows.size() && k < 8; ++k) {
            const int i = rows[k];
            const double y = res.farkas[static_cast<std::size_t>(i)];
            ctx.log << "  " << problem.row_labels[static_cast<std::size_t>(i)] << "  y=" << sci(y, 3) << "\n";
            top.push_back({{"row", problem.row_labels[static_cast<std::size_t>(i)]}, {"y", y}});
        }
        r["farkas"] = {{"gap", res.farkas_gap}, {"rows", rows.size()}, {"top", top}};
        return kSolveFailed;
    }
    if (res.status != lp::LpStatus::Optimal) {
        ctx.log << "opf: " << lp::to_string(res.status) << ": " << res.message << "\n";
        return kSolveFailed;
    }

    ordered_json doc;
    doc["schema"] = "mcdist.dispatch/1";
    doc["formulation"] = model.formulation;
    doc["status"] = lp::to_string(res.status);
    doc["objective"] = res.objective;
    doc["periods"] = period_count(net);

    double complementarity = 0.0;
    ordered_json storage = ordered_json::object();
    for (const auto& st : net.storages) {
        ordered_json e = ordered_json::array(), c = ordered_json::array(), d = ordered_json::array();
        for (int t : period_indices(net)) {
            const double sc = res.assignment.at(names::var("sc", st.id, "", t));
            const double sd = res.assignment.at(names::var("sd", st.id, "", t));
            e.push_back(res.assignment.at(names::var("se", st.id, "", t)));
            c.push_back(sc);
            d.push_back(sd);
            complementarity = std::max(complementarity, std::min(sc, sd));
        }
        storage[st.id] = {{"energy_init", st.energy_init}, {"energy", e}, {"charge", c}, {"discharge", d}};
    }
    doc["storage"] = storage;
    doc["complementarity_violation"] = complementarity;
    doc["values"] = res.assignment;

    r["objective"] = res.objective;
    r["dual_gap"] = res.objective - res.dual_objective;
    r["complementarity_violation"] = complementarity;
    ctx.log << "opf: optimal, objective " << sci(res.objective, 9) << " after " << res.iterations
            << " pivots; storage complementarity violation " << sci(complementarity, 3) << "\n";
    emit(ctx, doc.dump(1) + "\n", args.out);
    return kOk;
}

int cmd_export(Context& ctx, const ExportArgs& args) {
    const auto tag = formulations::parse_formulation(args.form);
    auto net = load_network(ctx, args.file);
    attach_periods(ctx, net, args.periods);

    ir::MathModel model;
    {
        StageTimer t(ctx.report, "build");
        switch (tag) {
            case formulations::FormulationTag::IVR: model = formulations::build_pf_ivr(net); break;
            case formulations::FormulationTag::ACR: model = formulations::build_opf_acr(net); break;
            case formulations::FormulationTag::SOC_BFM: {
                formulations::SocOptions opts;
                opts.conic = args.conic;
                model = formulations::build_opf_socbfm(net, opts);
                break;
            }
            case formulations::FormulationTag::LINDISTFLOW: {
                formulations::LinDistFlowOptions opts;
                opts.pwl_segments = args.pwl;
                model = formulations::build_opf_lindistflow(net, opts);
                break;
            }
        }
    }
    auto counts = model.constraint_counts();
    auto& r = ctx.report.result();
    r["formulation"] = model.formulation;
    r["variables"] = model.variables.size();
    r["constraints"] = model.constraints.size();
    r["by_family"] = counts;
    ctx.log << model.formulation << ": " << model.variables.size() << " variables, " << model.constraints.size()
            << " constraints\n";
    for (const auto& [family, n] : counts) ctx.log << "  " << family << " " << n << "\n";
    emit(ctx, ir::export_model(model), args.out);
    return kOk;
}

int cmd_compare(Context& ctx, const CompareArgs& args) {
    pf::PfSolution a, b;
    for (const auto* path : {&args.a, &args.b}) {
        if (!fs::exists(*path)) throw ModelError("cannot read '" + *path + "'");
        ctx.report.add_input(*path);
    }
    {
        StageTimer t(ctx.report, "parse");
        a = pf::pf_from_json(read_text(args.a));
        b = pf::pf_from_json(read_text(args.b));
    }
    std::set<std::string> floating(args.floating.begin(), args.floating.end());
    pf::DeltaReport rep = pf::compare_report(a, b, floating);

    // one line per bus: its worst phase or phase pair
    std::vector<const pf::DeltaEntry*> worst;
    std::set<std::string> seen;
    for (const auto& e : rep.entries) {
        if (seen.insert(e.bus).second) worst.push_back(&e);
    }

    std::ostringstream text;
    text << "delta " << sci(rep.delta, 12) << "\n";
    text << "tolerance " << sci(args.tol, 3) << "\n";
    ordered_json offenders = ordered_json::array();
    for (std::size_t k = 0; k < worst.size() && static_cast<int>(k) < args.top; ++k) {
        const auto& e = *worst[k];
        text << e.bus << " " << e.tag << " " << sci(e.magnitude_a, 12) << " " << sci(e.magnitude_b, 12) << " "
             << sci(e.relative, 3) << "\n";
        offenders.push_back({{"bus", e.bus}, {"tag", e.tag}, {"relative", e.relative}});
    }
    auto& r = ctx.report.result();
    r["delta"] = rep.delta;
    r["tolerance"] = args.tol;
    r["worst"] = offenders;
    emit(ctx, text.str(), "");
    return rep.delta <= args.tol ? kOk : kAboveTolerance;
}

}  // namespace mcdist::cli
