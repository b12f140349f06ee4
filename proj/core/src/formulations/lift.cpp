#include "detail.hpp"
#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/formulations.hpp"

namespace mcdist::formulations {

using detail::needs_vm;

namespace {

void put(ir::Assignment& a, const std::string& re, const std::string& im, Complex v) {
    a[re] = v.real();
    a[im] = v.imag();
}

Complex element_voltage(const pf::PfSolution& sol, const std::string& bus, const network::Element& e) {
    Complex u = sol.voltage(bus, e.p);
    if (e.delta()) u -= sol.voltage(bus, e.q);
    return u;
}

void put_voltages(ir::Assignment& a, const network::Network& net, const pf::PfSolution& sol) {
    for (const auto& b : net.buses) {
        for (int p : b.phases) {
            const Complex u = sol.voltage(b.id, p);
            put(a, names::bus("ur", b.id, names::phase_tag(p)), names::bus("ui", b.id, names::phase_tag(p)), u);
        }
    }
}

void put_generators(ir::Assignment& a, const network::Network& net, const pf::PfSolution& sol) {
    for (const auto& g : net.generators) {
        const auto& currents = sol.generator_currents.at(g.id);
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            const auto& e = g.elements[k];
            const std::string tag = names::element_tag(e);
            const Complex s = element_voltage(sol, g.bus, e) * std::conj(currents[k]);
            put(a, names::var("pg", g.id, tag), names::var("qg", g.id, tag), s);
        }
    }
}

void require_converged(const pf::PfSolution& sol) {
    if (!sol.converged) throw ModelError("power-flow solution did not converge; cannot map it to model variables");
}

}  // namespace

ir::Assignment lift_solution(const network::Network& net, const pf::PfSolution& sol) {
    require_converged(sol);
    ir::Assignment a;
    for (const auto& b : net.buses) {
        const std::string id = "bus." + b.id;
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            const Complex uk = sol.voltage(b.id, b.phases[k]);
            a[names::var("w", id, names::phase_tag(b.phases[k]))] = std::norm(uk);
            for (std::size_t l = k + 1; l < b.phases.size(); ++l) {
                const std::string tag = names::pair_tag(b.phases[k], b.phases[l]);
                put(a, names::var("wr", id, tag), names::var("wi", id, tag),
                    uk * std::conj(sol.voltage(b.id, b.phases[l])));
            }
        }
    }

    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const auto& is = sol.branches.at(br.id).i_series;
        const std::size_t n = br.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Complex uk = sol.voltage(br.f_bus, br.f_conn[k]);
            a[names::var("l", br.id, names::phase_tag(br.f_conn[k]))] = std::norm(is[k]);
            for (std::size_t l = 0; l < n; ++l) {
                const std::string tag = names::pair_tag(br.f_conn[k], br.f_conn[l]);
                put(a, names::var("sr", br.id, tag), names::var("si", br.id, tag), uk * std::conj(is[l]));
                if (l > k) put(a, names::var("lr", br.id, tag), names::var("li", br.id, tag), is[k] * std::conj(is[l]));
            }
        }
    }

    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const auto& flow = sol.transformers.at(tr.id);
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const std::string tag = names::phase_tag(tr.f_conn[k]);
            put(a, names::var("pt", tr.id, tag), names::var("qt", tr.id, tag),
                sol.voltage(tr.f_bus, tr.f_conn[k]) * std::conj(flow.i_f[k]));
        }
    }

    for (const auto& ld : net.loads) {
        const auto& currents = sol.load_currents.at(ld.id);
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            const auto& e = ld.elements[k];
            const std::string tag = names::element_tag(e);
            const Complex u = element_voltage(sol, ld.bus, e);
            put(a, names::var("pd", ld.id, tag), names::var("qd", ld.id, tag), u * std::conj(currents[k]));
            if (needs_vm(ld)) a[names::var("vm", ld.id, tag)] = std::abs(u);
            if (e.delta()) {
                put(a, names::var("pdp", ld.id, tag), names::var("qdp", ld.id, tag),
                    sol.voltage(ld.bus, e.p) * std::conj(currents[k]));
                put(a, names::var("pdq", ld.id, tag), names::var("qdq", ld.id, tag),
                    -sol.voltage(ld.bus, e.q) * std::conj(currents[k]));
            }
        }
    }
    put_generators(a, net, sol);
    return a;
}

ir::Assignment to_acr_assignment(const network::Network& net, const pf::PfSolution& sol) {
    require_converged(sol);
    ir::Assignment a;
    put_voltages(a, net, sol);
    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const auto& flow = sol.branches.at(br.id);
        for (std::size_t k = 0; k < br.size(); ++k) {
            const std::string tag = names::phase_tag(br.f_conn[k]);
            put(a, names::var("pf", br.id, tag), names::var("qf", br.id, tag), flow.s_fr[k]);
            put(a, names::var("pt", br.id, tag), names::var("qt", br.id, tag), flow.s_to[k]);
        }
    }
    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const auto& flow = sol.transformers.at(tr.id);
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            put(a, names::var("ctfr", tr.id, tf), names::var("ctfi", tr.id, tf), flow.i_f[k]);
            put(a, names::var("cttr", tr.id, tt), names::var("ctti", tr.id, tt), flow.i_t[k]);
            put(a, names::var("ptf", tr.id, tf), names::var("qtf", tr.id, tf),
                sol.voltage(tr.f_bus, tr.f_conn[k]) * std::conj(flow.i_f[k]));
            put(a, names::var("ptt", tr.id, tt), names::var("qtt", tr.id, tt),
                sol.voltage(tr.t_bus, tr.t_conn[k]) * std::conj(flow.i_t[k]));
        }
    }
    for (const auto& ld : net.loads) {
        const auto& currents = sol.load_currents.at(ld.id);
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            const auto& e = ld.elements[k];
            const std::string tag = names::element_tag(e);
            const Complex u = element_voltage(sol, ld.bus, e);
            put(a, names::var("pd", ld.id, tag), names::var("qd", ld.id, tag), u * std::conj(currents[k]));
            if (needs_vm(ld)) a[names::var("vm", ld.id, tag)] = std::abs(u);
            if (e.delta()) put(a, names::var("cdr", ld.id, tag), names::var("cdi", ld.id, tag), currents[k]);
        }
    }
    put_generators(a, net, sol);
    return a;
}

}  // namespace mcdist::formulations
