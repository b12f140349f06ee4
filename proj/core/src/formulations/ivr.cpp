#include "detail.hpp"
#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/formulations.hpp"

namespace mcdist::formulations {

using namespace detail;
using ir::Sense;

ir::MathModel build_pf_ivr(const network::Network& net) {
    require_slack_per_island(net);
    ir::MathModel m;
    m.formulation = "IVR";
    m.metadata["problem"] = "pf";
    add_rectangular_voltages(m, net);

    // KCL rows: currents leaving each bus phase, real and imaginary parts.
    BalanceRows kcl;
    for (const auto& b : net.buses) {
        for (int p : b.phases) kcl.at(b.id, p);
    }
    auto leave = [&](const std::string& bus, int phase, const CLin& current) {
        CQuad& row = kcl.at(bus, phase);
        row.re.linear.add(current.re);
        row.im.linear.add(current.im);
    };

    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const std::size_t n = br.size();
        std::vector<CLin> is(n), ui(n), uj(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tag = names::phase_tag(br.f_conn[k]);
            m.add_variable(names::var("csr", br.id, tag));
            m.add_variable(names::var("csi", br.id, tag));
            is[k] = {m.v(names::var("csr", br.id, tag)), m.v(names::var("csi", br.id, tag))};
            ui[k] = bus_voltage(m, br.f_bus, br.f_conn[k]);
            uj[k] = bus_voltage(m, br.t_bus, br.t_conn[k]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tag = names::phase_tag(br.f_conn[k]);
            CLin ohm = ui[k] - uj[k];
            CLin ifr = is[k];
            CLin ito = scaled(is[k], -1.0);
            for (std::size_t l = 0; l < n; ++l) {
                add_scaled(ohm, is[l], -br.z(k, l));
                add_scaled(ifr, ui[l], br.y_fr(k, l));
                add_scaled(ito, uj[l], br.y_to(k, l));
            }
            m.add_linear(names::var("ohm_re", br.id, tag), ohm.re, Sense::Eq);
            m.add_linear(names::var("ohm_im", br.id, tag), ohm.im, Sense::Eq);
            leave(br.f_bus, br.f_conn[k], ifr);
            leave(br.t_bus, br.t_conn[k], ito);
        }
    }

    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const std::size_t n = tr.size();
        std::vector<CLin> i_f(n), i_t(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            i_f[k] = {LinearExpr::variable(m.add_variable(names::var("ctfr", tr.id, tf))),
                      LinearExpr::variable(m.add_variable(names::var("ctfi", tr.id, tf)))};
            i_t[k] = {LinearExpr::variable(m.add_variable(names::var("cttr", tr.id, tt))),
                      LinearExpr::variable(m.add_variable(names::var("ctti", tr.id, tt)))};
        }
        for (std::size_t k = 0; k < n; ++k) {
            // U_f = T U_t
            CLin v = bus_voltage(m, tr.f_bus, tr.f_conn[k]);
            for (std::size_t l = 0; l < n; ++l) add_scaled(v, bus_voltage(m, tr.t_bus, tr.t_conn[l]), -tr.t(k, l));
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            m.add_linear(names::var("xfv_re", tr.id, tf), v.re, Sense::Eq);
            m.add_linear(names::var("xfv_im", tr.id, tf), v.im, Sense::Eq);
            // T^H I_f + I_t = 0
            CLin c = i_t[k];
            for (std::size_t l = 0; l < n; ++l) add_scaled(c, i_f[l], std::conj(tr.t(l, k)));
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            m.add_linear(names::var("xfi_re", tr.id, tt), c.re, Sense::Eq);
            m.add_linear(names::var("xfi_im", tr.id, tt), c.im, Sense::Eq);
            leave(tr.f_bus, tr.f_conn[k], i_f[k]);
            leave(tr.t_bus, tr.t_conn[k], i_t[k]);
        }
    }

    for (const auto& sh : net.shunts) {
        for (std::size_t k = 0; k < sh.conn.size(); ++k) {
            CLin i;
            for (std::size_t l = 0; l < sh.conn.size(); ++l) add_scaled(i, bus_voltage(m, sh.bus, sh.conn[l]), sh.y(k, l));
            leave(sh.bus, sh.conn[k], i);
        }
    }

    for (const auto& ld : net.loads) {
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            const auto& e = ld.elements[k];
            const std::string tag = names::element_tag(e);
            CLin i{LinearExpr::variable(m.add_variable(names::var("cdr", ld.id, tag))),
                   LinearExpr::variable(m.add_variable(names::var("cdi", ld.id, tag)))};
            CLin u = element_voltage(m, ld.bus, e);
            CQuad s;
            add_power(s, u, i);
            // |U|-dependent demand: a_z |U|^2 / v^2 + a_i vm / v + a_p
            const double v = ld.v_nom;
            QuadExpr factor(ld.zip.a_p);
            factor.add_product(u.re, u.re, ld.zip.a_z / (v * v));
            factor.add_product(u.im, u.im, ld.zip.a_z / (v * v));
            if (needs_vm(ld)) {
                const int vm = m.add_variable(names::var("vm", ld.id, tag), 0.0);
                factor.linear.add(vm, ld.zip.a_i / v);
                QuadExpr mag;
                mag.add_product(vm, vm, 1.0);
                mag.add_product(u.re, u.re, -1.0);
                mag.add_product(u.im, u.im, -1.0);
                m.add_quadratic(names::var("load_vm", ld.id, tag), mag, Sense::Eq);
            }
            s.re.add(factor, -ld.s_nom[k].real());
            s.im.add(factor, -ld.s_nom[k].imag());
            m.add_quadratic(names::var("load_p", ld.id, tag), s.re, Sense::Eq);
            m.add_quadratic(names::var("load_q", ld.id, tag), s.im, Sense::Eq);
            leave(ld.bus, e.p, i);
            if (e.delta()) leave(ld.bus, e.q, scaled(i, -1.0));
        }
    }

    for (const auto& g : net.generators) {
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            const auto& e = g.elements[k];
            const std::string tag = names::element_tag(e);
            CLin i{LinearExpr::variable(m.add_variable(names::var("cgr", g.id, tag))),
                   LinearExpr::variable(m.add_variable(names::var("cgi", g.id, tag)))};
            if (!g.is_source()) {
                CQuad s;
                add_power(s, element_voltage(m, g.bus, e), i);
                m.add_quadratic(names::var("gen_p", g.id, tag), s.re, Sense::Eq, g.p_set[k]);
                m.add_quadratic(names::var("gen_q", g.id, tag), s.im, Sense::Eq, g.q_set[k]);
            }
            leave(g.bus, e.p, scaled(i, -1.0));
            if (e.delta()) leave(g.bus, e.q, i);
        }
    }

    emit_balance(m, kcl, "kcl_re", "kcl_im");
    return m;
}

}  // namespace mcdist::formulations
