#include <cmath>

#include "detail.hpp"
#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/formulations.hpp"
#include "mcdist/network/topology.hpp"

namespace mcdist::formulations {

using namespace detail;
using ir::Sense;

namespace {

/// Linearized shunt draw at conductor k: w_p * sum_l gamma^(p-l) conj(Y_kl),
/// taking U_p conj(U_l) ~ gamma^(p-l) |U_p|^2.
Complex shunt_coefficient(const std::vector<int>& conn, const CMatrix& y, std::size_t k) {
    Complex c = 0.0;
    for (std::size_t l = 0; l < conn.size(); ++l) c += gamma_power(conn[k] - conn[l]) * std::conj(y(k, l));
    return c;
}

void add_fixed(CQuad& row, Complex s) {
    row.re.linear.constant += s.real();
    row.im.linear.constant += s.imag();
}

void add_var(CQuad& row, const CLin& s, double sign = 1.0) {
    row.re.linear.add(s.re, sign);
    row.im.linear.add(s.im, sign);
}

}  // namespace

ir::MathModel build_opf_lindistflow(const network::Network& net, const LinDistFlowOptions& options) {
    network::require_radial(net, "LinDistFlow");
    require_slack_per_island(net);
    require_wye_generators(net, "LinDistFlow");
    for (const auto& tr : net.transformers) {
        if (tr.status && (!tr.same_config() || !tr.t.isDiagonal())) {
            throw UnsupportedError("LinDistFlow: transformer " + tr.id +
                                   " mixes wye and delta windings; only ratio transformers are supported");
        }
    }
    for (const auto& g : net.generators) {
        if (g.c2 == 0.0) continue;
        if (options.pwl_segments <= 0) {
            throw UnsupportedError("LinDistFlow: generator " + g.id +
                                   " has a quadratic cost; enable piecewise-linear costs to use it");
        }
    }

    const bool multi = net.periods.has_value();
    const std::vector<network::Period> periods = multi ? net.periods->periods : std::vector<network::Period>{{}};
    const double dt = multi ? net.periods->delta_t_hours : 1.0;
    if (periods.empty()) throw ModelError("period series is empty");

    ir::MathModel m;
    m.formulation = "LINDISTFLOW";
    m.metadata["problem"] = "opf";
    m.metadata["periods"] = std::to_string(periods.size());

    for (std::size_t ti = 0; ti < periods.size(); ++ti) {
        const int t = multi ? static_cast<int>(ti) : -1;
        const network::Period& per = periods[ti];
        auto w = [&](const std::string& bus, int p) { return m.v(names::bus("w", bus, names::phase_tag(p), t)); };

        BalanceRows balance;
        for (const auto& b : net.buses) {
            for (std::size_t k = 0; k < b.phases.size(); ++k) {
                const std::string tag = names::phase_tag(b.phases[k]);
                m.add_variable(names::bus("w", b.id, tag, t), b.vmin[k] * b.vmin[k], b.vmax[k] * b.vmax[k]);
                balance.at(b.id, b.phases[k]);
                if (b.type == network::BusType::Slack) {
                    m.add_linear(names::bus("slack_w", b.id, tag, t), w(b.id, b.phases[k]), Sense::Eq,
                                 std::norm(b.v_set[k]));
                }
            }
        }

        for (const auto& br : net.branches) {
            if (!br.status) continue;
            const std::size_t n = br.size();
            std::vector<CLin> s(n);
            for (std::size_t k = 0; k < n; ++k) {
                const std::string tag = names::phase_tag(br.f_conn[k]);
                s[k] = {LinearExpr::variable(m.add_variable(names::var("pf", br.id, tag, t))),
                        LinearExpr::variable(m.add_variable(names::var("qf", br.id, tag, t)))};
            }
            for (std::size_t k = 0; k < n; ++k) {
                // w_j = w_i - 2 sum_l (P_l Re H_kl - Q_l Im H_kl), H_kl = gamma^(p_k - p_l) conj(z_kl)
                LinearExpr row = w(br.t_bus, br.t_conn[k]) - w(br.f_bus, br.f_conn[k]);
                for (std::size_t l = 0; l < n; ++l) {
                    const Complex h = gamma_power(br.f_conn[k] - br.f_conn[l]) * std::conj(br.z(k, l));
                    row.add(s[l].re, 2.0 * h.real());
                    row.add(s[l].im, -2.0 * h.imag());
                }
                m.add_linear(names::var("vdrop", br.id, names::phase_tag(br.f_conn[k]), t), row, Sense::Eq);

                CLin at_f = s[k];
                add_scaled(at_f, {w(br.f_bus, br.f_conn[k]), {}}, shunt_coefficient(br.f_conn, br.y_fr, k));
                CLin at_t = scaled(s[k], -1.0);
                add_scaled(at_t, {w(br.t_bus, br.t_conn[k]), {}}, shunt_coefficient(br.t_conn, br.y_to, k));
                add_var(balance.at(br.f_bus, br.f_conn[k]), at_f);
                add_var(balance.at(br.t_bus, br.t_conn[k]), at_t);
            }
        }

        for (const auto& tr : net.transformers) {
            if (!tr.status) continue;
            for (std::size_t k = 0; k < tr.size(); ++k) {
                const std::string tag = names::phase_tag(tr.f_conn[k]);
                LinearExpr row = w(tr.f_bus, tr.f_conn[k]);
                row.add(w(tr.t_bus, tr.t_conn[k]), -std::norm(tr.t(k, k)));
                m.add_linear(names::var("xfw", tr.id, tag, t), row, Sense::Eq);
                CLin sp{LinearExpr::variable(m.add_variable(names::var("pt", tr.id, tag, t))),
                        LinearExpr::variable(m.add_variable(names::var("qt", tr.id, tag, t)))};
                add_var(balance.at(tr.f_bus, tr.f_conn[k]), sp);
                add_var(balance.at(tr.t_bus, tr.t_conn[k]), sp, -1.0);
            }
        }

        for (const auto& sh : net.shunts) {
            for (std::size_t k = 0; k < sh.conn.size(); ++k) {
                CLin draw;
                add_scaled(draw, {w(sh.bus, sh.conn[k]), {}}, shunt_coefficient(sh.conn, sh.y, k));
                add_var(balance.at(sh.bus, sh.conn[k]), draw);
            }
        }

        // constant power at nominal voltage; delta elements split by the balanced rotation
        for (const auto& ld : net.loads) {
            for (std::size_t k = 0; k < ld.elements.size(); ++k) {
                const auto& e = ld.elements[k];
                const Complex se = ld.s_nom[k] * per.load_scale;
                if (!e.delta()) {
                    add_fixed(balance.at(ld.bus, e.p), se);
                    continue;
                }
                const Complex r = gamma_power(e.q - e.p);
                add_fixed(balance.at(ld.bus, e.p), se / (1.0 - r));
                add_fixed(balance.at(ld.bus, e.q), -se * r / (1.0 - r));
            }
        }

        const double weight = dt * per.cost_scale;
        for (const auto& g : net.generators) {
            LinearExpr total;
            double p_lo = 0.0, p_hi = 0.0;
            for (std::size_t k = 0; k < g.elements.size(); ++k) {
                const auto& e = g.elements[k];
                const std::string tag = names::element_tag(e);
                const double scale = g.is_source() ? 1.0 : per.gen_scale;
                CLin sg{LinearExpr::variable(m.add_variable(names::var("pg", g.id, tag, t), g.p_min[k] * scale,
                                                            g.p_max[k] * scale)),
                        LinearExpr::variable(m.add_variable(names::var("qg", g.id, tag, t), g.q_min[k], g.q_max[k]))};
                add_var(balance.at(g.bus, e.p), sg, -1.0);
                total += sg.re;
                p_lo += g.p_min[k] * scale;
                p_hi += g.p_max[k] * scale;
            }
            if (g.c2 == 0.0) {
                add_fuel_cost(m, net, g, total, weight);
                continue;
            }
            // epigraph of c2 P^2 + c1 P + c0 cut by tangents at evenly spaced points
            if (!std::isfinite(p_lo) || !std::isfinite(p_hi)) {
                throw UnsupportedError("LinDistFlow: piecewise-linear cost of " + g.id + " needs finite power limits");
            }
            const double to_mw = net.sbase / 1e6;
            const int cost = m.add_variable(names::var("cost", g.id, "", t));
            const int segments = options.pwl_segments;
            for (int j = 0; j <= segments; ++j) {
                const double x = to_mw * (p_lo + (p_hi - p_lo) * j / segments);
                // cost >= c2 (2 x P - x^2) + c1 P + c0
                LinearExpr cut = LinearExpr::variable(cost);
                cut.add(total, -(2.0 * g.c2 * x + g.c1) * to_mw);
                m.add_linear(names::var("pwl", g.id, "k" + std::to_string(j), t), cut, Sense::Ge, g.c0 - g.c2 * x * x);
            }
            m.objective.linear.add(cost, weight);
        }

        for (const auto& st : net.storages) {
            const int pc = m.add_variable(names::var("sc", st.id, "", t), 0.0, st.p_charge_max);
            const int pd = m.add_variable(names::var("sd", st.id, "", t), 0.0, st.p_discharge_max);
            const int e = m.add_variable(names::var("se", st.id, "", t), 0.0, st.energy_max);
            // E_t = E_(t-1) + (eta_c P_c - P_d / eta_d) dt
            LinearExpr row = LinearExpr::variable(e);
            const double rhs = ti == 0 ? st.energy_init : 0.0;
            if (ti > 0) row.add(m.var(names::var("se", st.id, "", t - 1)), -1.0);
            row.add(pc, -st.eff_charge * dt);
            row.add(pd, dt / st.eff_discharge);
            m.add_linear(names::var("energy", st.id, "", t), row, Sense::Eq, rhs);
            if (st.thermal_rating > 0.0 && std::isfinite(st.thermal_rating)) {
                LinearExpr th = LinearExpr::variable(pc);
                th.add(pd, 1.0);
                m.add_linear(names::var("thermal", st.id, "", t), th, Sense::Le, st.thermal_rating);
            }
            const double share = 1.0 / static_cast<double>(st.conn.size());
            for (int p : st.conn) {
                CQuad& row_p = balance.at(st.bus, p);
                row_p.re.linear.add(pc, share);
                row_p.re.linear.add(pd, -share);
            }
        }

        emit_balance(m, balance, "pb_p", "pb_q", t);
    }
    return m;
}

}  // namespace mcdist::formulations
