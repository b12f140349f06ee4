#include <cmath>

#include "detail.hpp"
#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/formulations.hpp"

namespace mcdist::formulations {

using namespace detail;
using ir::Sense;

namespace {

CLin new_complex(ir::MathModel& m, const std::string& re, const std::string& im, double lb_re = -ir::kInf,
                 double ub_re = ir::kInf, double lb_im = -ir::kInf, double ub_im = ir::kInf) {
    return {LinearExpr::variable(m.add_variable(re, lb_re, ub_re)),
            LinearExpr::variable(m.add_variable(im, lb_im, ub_im))};
}

/// diag(U U^H Y^H) on conductor k, with U taken at `bus` on `conn`.
void add_shunt_power(CQuad& acc, const ir::MathModel& m, const std::string& bus, const std::vector<int>& conn,
                     const CMatrix& y, std::size_t k) {
    const CLin uk = bus_voltage(m, bus, conn[k]);
    for (std::size_t l = 0; l < conn.size(); ++l) {
        if (y(k, l) != Complex(0.0, 0.0)) add_power_product(acc, uk, y(k, l), bus_voltage(m, bus, conn[l]));
    }
}

void add_to_row(CQuad& row, const CQuad& s, double sign = 1.0) {
    row.re.add(s.re, sign);
    row.im.add(s.im, sign);
}

void add_to_row(CQuad& row, const CLin& s, double sign = 1.0) {
    row.re.linear.add(s.re, sign);
    row.im.linear.add(s.im, sign);
}

}  // namespace

ir::MathModel build_opf_acr(const network::Network& net) {
    require_slack_per_island(net);
    require_wye_generators(net, "ACR");
    ir::MathModel m;
    m.formulation = "ACR";
    m.metadata["problem"] = "opf";
    add_rectangular_voltages(m, net);

    BalanceRows balance;
    for (const auto& b : net.buses) {
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            const int p = b.phases[k];
            balance.at(b.id, p);
            const CLin u = bus_voltage(m, b.id, p);
            QuadExpr mag;
            mag.add_product(u.re, u.re);
            mag.add_product(u.im, u.im);
            const std::string tag = names::phase_tag(p);
            if (b.vmin[k] > 0.0) m.add_quadratic(names::bus("vmag_lo", b.id, tag), mag, Sense::Ge, b.vmin[k] * b.vmin[k]);
            if (std::isfinite(b.vmax[k])) {
                m.add_quadratic(names::bus("vmag_hi", b.id, tag), mag, Sense::Le, b.vmax[k] * b.vmax[k]);
            }
        }
    }

    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const std::size_t n = br.size();
        const bool zero_z = zero_impedance(br);
        CMatrix ys;
        if (!zero_z) {
            Eigen::FullPivLU<CMatrix> lu(br.z);
            if (!lu.isInvertible()) throw ModelError("branch " + br.id + ": singular series impedance");
            ys = lu.inverse();
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tag = names::phase_tag(br.f_conn[k]);
            CLin sf = new_complex(m, names::var("pf", br.id, tag), names::var("qf", br.id, tag));
            CLin st = new_complex(m, names::var("pt", br.id, tag), names::var("qt", br.id, tag));
            const CLin ui = bus_voltage(m, br.f_bus, br.f_conn[k]);
            const CLin uj = bus_voltage(m, br.t_bus, br.t_conn[k]);

            CQuad sh_f, sh_t;
            add_shunt_power(sh_f, m, br.f_bus, br.f_conn, br.y_fr, k);
            add_shunt_power(sh_t, m, br.t_bus, br.t_conn, br.y_to, k);
            if (zero_z) {
                const CLin dv = ui - uj;
                m.add_linear(names::var("vequal_re", br.id, tag), dv.re, Sense::Eq);
                m.add_linear(names::var("vequal_im", br.id, tag), dv.im, Sense::Eq);
                CQuad sum;
                add_to_row(sum, sf);
                add_to_row(sum, st);
                add_to_row(sum, sh_f, -1.0);
                add_to_row(sum, sh_t, -1.0);
                m.add_quadratic(names::var("flow_sum_p", br.id, tag), sum.re, Sense::Eq);
                m.add_quadratic(names::var("flow_sum_q", br.id, tag), sum.im, Sense::Eq);
            } else {
                // S_f = diag(U_i U_i^H Y_fr^H + U_i (U_i - U_j)^H Y_s^H), mirrored for the t end
                CQuad ef, et;
                add_to_row(ef, sf);
                add_to_row(ef, sh_f, -1.0);
                add_to_row(et, st);
                add_to_row(et, sh_t, -1.0);
                for (std::size_t l = 0; l < n; ++l) {
                    const CLin dl = bus_voltage(m, br.f_bus, br.f_conn[l]) - bus_voltage(m, br.t_bus, br.t_conn[l]);
                    add_power_product(ef, ui, ys(k, l), dl, -1.0);
                    add_power_product(et, uj, ys(k, l), dl, 1.0);
                }
                m.add_quadratic(names::var("flow_p_fr", br.id, tag), ef.re, Sense::Eq);
                m.add_quadratic(names::var("flow_q_fr", br.id, tag), ef.im, Sense::Eq);
                m.add_quadratic(names::var("flow_p_to", br.id, tag), et.re, Sense::Eq);
                m.add_quadratic(names::var("flow_q_to", br.id, tag), et.im, Sense::Eq);
            }
            if (k < br.rating_power.size() && std::isfinite(br.rating_power[k])) {
                const double smax2 = br.rating_power[k] * br.rating_power[k];
                for (const auto& [label, s] : {std::pair{"flow_lim_fr", &sf}, std::pair{"flow_lim_to", &st}}) {
                    QuadExpr q;
                    q.add_product(s->re, s->re);
                    q.add_product(s->im, s->im);
                    m.add_quadratic(names::var(label, br.id, tag), q, Sense::Le, smax2);
                }
            }
            if (br.angle_bounds) {
                // tan(lo) Re(U_i U_j^*) <= Im(U_i U_j^*) <= tan(hi) Re(U_i U_j^*)
                CQuad w;
                add_power(w, ui, uj);
                const auto [lo, hi] = *br.angle_bounds;
                QuadExpr lower = w.im;
                lower.add(w.re, -std::tan(lo));
                QuadExpr upper = w.im;
                upper.add(w.re, -std::tan(hi));
                m.add_quadratic(names::var("vad_lo", br.id, tag), lower, Sense::Ge);
                m.add_quadratic(names::var("vad_hi", br.id, tag), upper, Sense::Le);
            }
            add_to_row(balance.at(br.f_bus, br.f_conn[k]), sf);
            add_to_row(balance.at(br.t_bus, br.t_conn[k]), st);
        }
    }

    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const std::size_t n = tr.size();
        std::vector<CLin> i_f(n), i_t(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            i_f[k] = new_complex(m, names::var("ctfr", tr.id, tf), names::var("ctfi", tr.id, tf));
            i_t[k] = new_complex(m, names::var("cttr", tr.id, tt), names::var("ctti", tr.id, tt));
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            CLin v = bus_voltage(m, tr.f_bus, tr.f_conn[k]);
            for (std::size_t l = 0; l < n; ++l) add_scaled(v, bus_voltage(m, tr.t_bus, tr.t_conn[l]), -tr.t(k, l));
            m.add_linear(names::var("xfv_re", tr.id, tf), v.re, Sense::Eq);
            m.add_linear(names::var("xfv_im", tr.id, tf), v.im, Sense::Eq);
            CLin c = i_t[k];
            for (std::size_t l = 0; l < n; ++l) add_scaled(c, i_f[l], std::conj(tr.t(l, k)));
            m.add_linear(names::var("xfi_re", tr.id, tt), c.re, Sense::Eq);
            m.add_linear(names::var("xfi_im", tr.id, tt), c.im, Sense::Eq);

            CLin sf = new_complex(m, names::var("ptf", tr.id, tf), names::var("qtf", tr.id, tf));
            CLin st = new_complex(m, names::var("ptt", tr.id, tt), names::var("qtt", tr.id, tt));
            CQuad df, dt;
            add_to_row(df, sf);
            add_power(df, bus_voltage(m, tr.f_bus, tr.f_conn[k]), i_f[k], -1.0);
            add_to_row(dt, st);
            add_power(dt, bus_voltage(m, tr.t_bus, tr.t_conn[k]), i_t[k], -1.0);
            m.add_quadratic(names::var("xf_p_f", tr.id, tf), df.re, Sense::Eq);
            m.add_quadratic(names::var("xf_q_f", tr.id, tf), df.im, Sense::Eq);
            m.add_quadratic(names::var("xf_p_t", tr.id, tt), dt.re, Sense::Eq);
            m.add_quadratic(names::var("xf_q_t", tr.id, tt), dt.im, Sense::Eq);
            add_to_row(balance.at(tr.f_bus, tr.f_conn[k]), sf);
            add_to_row(balance.at(tr.t_bus, tr.t_conn[k]), st);
        }
    }

    for (const auto& sh : net.shunts) {
        for (std::size_t k = 0; k < sh.conn.size(); ++k) {
            CQuad s;
            add_shunt_power(s, m, sh.bus, sh.conn, sh.y, k);
            add_to_row(balance.at(sh.bus, sh.conn[k]), s);
        }
    }

    for (const auto& ld : net.loads) {
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            const auto& e = ld.elements[k];
            const std::string tag = names::element_tag(e);
            CLin sd = new_complex(m, names::var("pd", ld.id, tag), names::var("qd", ld.id, tag));
            const CLin u = element_voltage(m, ld.bus, e);
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
            QuadExpr pz(sd.re), qz(sd.im);
            pz.add(factor, -ld.s_nom[k].real());
            qz.add(factor, -ld.s_nom[k].imag());
            m.add_quadratic(names::var("load_p", ld.id, tag), pz, Sense::Eq);
            m.add_quadratic(names::var("load_q", ld.id, tag), qz, Sense::Eq);
            if (!e.delta()) {
                add_to_row(balance.at(ld.bus, e.p), sd);
                continue;
            }
            // delta element: current variables carry the power to each terminal
            CLin i = new_complex(m, names::var("cdr", ld.id, tag), names::var("cdi", ld.id, tag));
            CQuad def;
            add_to_row(def, sd, -1.0);
            add_power(def, u, i);
            m.add_quadratic(names::var("load_sp", ld.id, tag), def.re, Sense::Eq);
            m.add_quadratic(names::var("load_sq", ld.id, tag), def.im, Sense::Eq);
            add_power(balance.at(ld.bus, e.p), bus_voltage(m, ld.bus, e.p), i);
            add_power(balance.at(ld.bus, e.q), bus_voltage(m, ld.bus, e.q), i, -1.0);
        }
    }

    for (const auto& g : net.generators) {
        LinearExpr total;
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            const auto& e = g.elements[k];
            const std::string tag = names::element_tag(e);
            CLin sg = new_complex(m, names::var("pg", g.id, tag), names::var("qg", g.id, tag), g.p_min[k], g.p_max[k],
                                  g.q_min[k], g.q_max[k]);
            add_to_row(balance.at(g.bus, e.p), sg, -1.0);
            total += sg.re;
        }
        add_fuel_cost(m, net, g, total);
    }

    emit_balance(m, balance, "pb_p", "pb_q");
    return m;
}

}  // namespace mcdist::formulations
