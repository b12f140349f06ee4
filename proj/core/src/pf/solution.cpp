#include "mcdist/pf/solution.hpp"

#include <cmath>

#include <json.hpp>

#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/names.hpp"
#include "mcdist/ir/io.hpp"
#include "mcdist/pf/load_models.hpp"

namespace mcdist::pf {

namespace names = formulations::names;

Complex PfSolution::voltage(const std::string& bus, int phase) const {
    auto b = voltages.find(bus);
    if (b == voltages.end()) throw ModelError("solution has no voltages for bus " + bus);
    auto p = b->second.find(phase);
    if (p == b->second.end()) {
        throw ModelError("solution has no voltage for bus " + bus + " phase " + std::string(1, phase_letter(phase)));
    }
    return p->second;
}

namespace {

CVector conductor_voltages(const PfSolution& sol, const std::string& bus, const std::vector<int>& conn) {
    CVector u(static_cast<Eigen::Index>(conn.size()));
    for (std::size_t k = 0; k < conn.size(); ++k) u[static_cast<Eigen::Index>(k)] = sol.voltage(bus, conn[k]);
    return u;
}

std::vector<Complex> to_std(const CVector& v) { return {v.data(), v.data() + v.size()}; }

Complex element_voltage_of(const PfSolution& sol, const std::string& bus, const network::Element& e) {
    return element_voltage(e, sol.voltage(bus, e.p), e.delta() ? sol.voltage(bus, e.q) : Complex());
}

}  // namespace

void complete_solution(const network::Network& net, PfSolution& sol) {
    // currents leaving each bus phase, excluding sources
    std::map<std::pair<std::string, int>, Complex> leaving;

    for (const auto& br : net.branches) {
        if (!br.status) continue;
        BranchFlow& flow = sol.branches.at(br.id);
        const CVector ui = conductor_voltages(sol, br.f_bus, br.f_conn);
        const CVector uj = conductor_voltages(sol, br.t_bus, br.t_conn);
        const CVector is = Eigen::Map<const CVector>(flow.i_series.data(), static_cast<Eigen::Index>(flow.i_series.size()));
        const CVector sh_fr = br.y_fr * ui;
        const CVector sh_to = br.y_to * uj;
        const CVector i_fr = is + sh_fr;
        const CVector i_to = -is + sh_to;
        flow.i_sh_fr = to_std(sh_fr);
        flow.i_sh_to = to_std(sh_to);
        flow.i_fr = to_std(i_fr);
        flow.i_to = to_std(i_to);
        flow.s_fr = to_std(ui.cwiseProduct(i_fr.conjugate()));
        flow.s_to = to_std(uj.cwiseProduct(i_to.conjugate()));
        for (std::size_t k = 0; k < br.size(); ++k) {
            leaving[{br.f_bus, br.f_conn[k]}] += flow.i_fr[k];
            leaving[{br.t_bus, br.t_conn[k]}] += flow.i_to[k];
        }
    }
    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const TransformerFlow& flow = sol.transformers.at(tr.id);
        for (std::size_t k = 0; k < tr.size(); ++k) {
            leaving[{tr.f_bus, tr.f_conn[k]}] += flow.i_f[k];
            leaving[{tr.t_bus, tr.t_conn[k]}] += flow.i_t[k];
        }
    }
    for (const auto& sh : net.shunts) {
        const CVector i = sh.y * conductor_voltages(sol, sh.bus, sh.conn);
        for (std::size_t k = 0; k < sh.conn.size(); ++k) leaving[{sh.bus, sh.conn[k]}] += i[static_cast<Eigen::Index>(k)];
    }
    for (const auto& ld : net.loads) {
        auto& currents = sol.load_currents[ld.id];
        currents.clear();
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            const auto& e = ld.elements[k];
            const Complex i = zip_current(element_voltage_of(sol, ld.bus, e), ld.s_nom[k], ld.v_nom, ld.zip).i;
            currents.push_back(i);
            leaving[{ld.bus, e.p}] += i;
            if (e.delta()) leaving[{ld.bus, e.q}] -= i;
        }
    }
    for (const auto& g : net.generators) {
        if (g.is_source()) continue;
        auto& currents = sol.generator_currents[g.id];
        currents.clear();
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            const auto& e = g.elements[k];
            const Complex i =
                constant_power_current(element_voltage_of(sol, g.bus, e), Complex(g.p_set[k], g.q_set[k])).i;
            currents.push_back(i);
            leaving[{g.bus, e.p}] -= i;
            if (e.delta()) leaving[{g.bus, e.q}] += i;
        }
    }
    // the source supplies whatever the rest of its bus draws
    for (const auto& g : net.generators) {
        if (!g.is_source()) continue;
        auto& currents = sol.generator_currents[g.id];
        currents.clear();
        for (const auto& e : g.elements) {
            auto it = leaving.find({g.bus, e.p});
            const Complex i = it == leaving.end() ? Complex() : it->second;
            currents.push_back(i);
            if (it != leaving.end()) it->second = 0.0;
        }
    }
}

ir::Assignment to_ivr_assignment(const network::Network& net, const PfSolution& sol) {
    ir::Assignment a;
    auto put = [&](const std::string& re, const std::string& im, Complex v) {
        a[re] = v.real();
        a[im] = v.imag();
    };
    for (const auto& b : net.buses) {
        for (int p : b.phases) {
            const std::string tag = names::phase_tag(p);
            put(names::bus("ur", b.id, tag), names::bus("ui", b.id, tag), sol.voltage(b.id, p));
        }
    }
    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const auto& is = sol.branches.at(br.id).i_series;
        for (std::size_t k = 0; k < br.size(); ++k) {
            const std::string tag = names::phase_tag(br.f_conn[k]);
            put(names::var("csr", br.id, tag), names::var("csi", br.id, tag), is[k]);
        }
    }
    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const auto& flow = sol.transformers.at(tr.id);
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            put(names::var("ctfr", tr.id, tf), names::var("ctfi", tr.id, tf), flow.i_f[k]);
            put(names::var("cttr", tr.id, tt), names::var("ctti", tr.id, tt), flow.i_t[k]);
        }
    }
    for (const auto& ld : net.loads) {
        const auto& currents = sol.load_currents.at(ld.id);
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            const auto& e = ld.elements[k];
            const std::string tag = names::element_tag(e);
            put(names::var("cdr", ld.id, tag), names::var("cdi", ld.id, tag), currents[k]);
            if (ld.zip.a_i != 0.0) a[names::var("vm", ld.id, tag)] = std::abs(element_voltage_of(sol, ld.bus, e));
        }
    }
    for (const auto& g : net.generators) {
        const auto& currents = sol.generator_currents.at(g.id);
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            const std::string tag = names::element_tag(g.elements[k]);
            put(names::var("cgr", g.id, tag), names::var("cgi", g.id, tag), currents[k]);
        }
    }
    return a;
}

std::string to_json(const network::Network& net, const PfSolution& sol) {
    nlohmann::ordered_json doc;
    doc["schema"] = ir::kSolutionSchema;
    doc["method"] = sol.method;
    doc["converged"] = sol.converged;
    doc["iterations"] = sol.iterations;
    if (std::isfinite(sol.max_residual)) doc["max_residual"] = sol.max_residual;
    else doc["max_residual"] = nullptr;
    doc["diagnostics"] = sol.diagnostics;
    doc["values"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : to_ivr_assignment(net, sol)) doc["values"][k] = v;
    return doc.dump(1) + "\n";
}

PfSolution pf_from_json(const std::string& text) {
    const ir::Assignment values = ir::import_solution(text);
    const auto doc = nlohmann::json::parse(text);
    PfSolution sol;
    sol.method = doc.value("method", std::string("external"));
    sol.converged = doc.value("converged", true);
    sol.iterations = doc.value("iterations", 0);
    if (doc.contains("max_residual") && doc["max_residual"].is_number()) sol.max_residual = doc["max_residual"];
    if (doc.contains("diagnostics") && doc["diagnostics"].is_array()) {
        for (const auto& d : doc["diagnostics"]) {
            if (d.is_string()) sol.diagnostics.push_back(d);
        }
    }
    const std::string prefix = "(bus.";
    for (const auto& [name, v] : values) {
        if (name.size() < 2 || (name.compare(0, 2, "ur") != 0 && name.compare(0, 2, "ui") != 0)) continue;
        if (name.compare(2, prefix.size(), prefix) != 0 || name.back() != ')') continue;
        const std::string inner = name.substr(2 + prefix.size(), name.size() - 3 - prefix.size());
        const auto comma = inner.rfind(',');
        if (comma == std::string::npos || comma + 2 != inner.size()) {
            throw ModelError("solution value '" + name + "' has no phase");
        }
        const std::string bus = inner.substr(0, comma);
        const int phase = inner[comma + 1] - 'a';
        if (phase < 0 || phase > 2) throw ModelError("solution value '" + name + "' has an unknown phase");
        Complex& u = sol.voltages[bus][phase];
        if (name[1] == 'r') u.real(v);
        else u.imag(v);
    }
    return sol;
}

std::set<std::string> floating_buses(const network::Network& net) {
    std::set<std::string> out;
    for (const auto& b : net.buses) {
        if (b.floating) out.insert(b.id);
    }
    return out;
}

}  // namespace mcdist::pf
