#include <cmath>

#include "detail.hpp"
#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/formulations.hpp"
#include "mcdist/network/topology.hpp"

namespace mcdist::formulations {

using namespace detail;
using ir::Sense;

namespace {

/// Hermitian matrix of lifted variables: real diagonal "<d>(c,a)" and
/// off-diagonal pairs "<r>(c,ab)", "<i>(c,ab)" for p < q.
class Hermitian {
  public:
    Hermitian(ir::MathModel& m, std::string component, std::vector<int> tags, const std::string& d,
              const std::string& r, const std::string& i, const std::vector<double>& lb,
              const std::vector<double>& ub)
        : tags_(std::move(tags)) {
        const std::size_t n = tags_.size();
        diag_.resize(n);
        off_re_.assign(n * n, -1);
        off_im_.assign(n * n, -1);
        for (std::size_t k = 0; k < n; ++k) {
            diag_[k] = m.add_variable(names::var(d, component, names::phase_tag(tags_[k])), lb[k], ub[k]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = k + 1; l < n; ++l) {
                const std::string tag = names::pair_tag(tags_[k], tags_[l]);
                off_re_[k * n + l] = m.add_variable(names::var(r, component, tag));
                off_im_[k * n + l] = m.add_variable(names::var(i, component, tag));
            }
        }
    }

    std::size_t size() const { return tags_.size(); }
    int position(int phase) const {
        for (std::size_t k = 0; k < tags_.size(); ++k) {
            if (tags_[k] == phase) return static_cast<int>(k);
        }
        return -1;
    }

    /// Entry (k, l) by position.
    CLin at(std::size_t k, std::size_t l) const {
        const std::size_t n = tags_.size();
        if (k == l) return {LinearExpr::variable(diag_[k]), {}};
        if (k < l) return {LinearExpr::variable(off_re_[k * n + l]), LinearExpr::variable(off_im_[k * n + l])};
        return {LinearExpr::variable(off_re_[l * n + k]), LinearExpr::variable(off_im_[l * n + k], -1.0)};
    }

  private:
    std::vector<int> tags_;
    std::vector<int> diag_, off_re_, off_im_;
};

void add_to_row(CQuad& row, const CLin& s, double sign = 1.0) {
    row.re.linear.add(s.re, sign);
    row.im.linear.add(s.im, sign);
}

/// (W Y^H)_kk over the conductors `conn` of a bus matrix.
CLin shunt_power(const Hermitian& w, const std::vector<int>& conn, const CMatrix& y, std::size_t k) {
    CLin out;
    const int pk = w.position(conn[k]);
    for (std::size_t l = 0; l < conn.size(); ++l) {
        if (y(k, l) == Complex(0.0, 0.0)) continue;
        add_scaled(out, w.at(pk, w.position(conn[l])), std::conj(y(k, l)));
    }
    return out;
}

}  // namespace

ir::MathModel build_opf_socbfm(const network::Network& net, const SocOptions& options) {
    network::require_radial(net, "SOC-BFM");
    require_slack_per_island(net);
    require_wye_generators(net, "SOC-BFM");
    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        if (!tr.same_config() || !tr.t.isDiagonal()) {
            throw UnsupportedError("SOC-BFM: transformer " + tr.id +
                                   " mixes wye and delta windings; only ratio transformers are supported");
        }
    }

    ir::MathModel m;
    m.formulation = "SOC_BFM";
    m.metadata["problem"] = "opf";
    m.metadata["cone_form"] = "rotated";

    std::map<std::string, Hermitian> w;
    for (const auto& b : net.buses) {
        std::vector<double> lb(b.phases.size()), ub(b.phases.size());
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            lb[k] = b.vmin[k] * b.vmin[k];
            ub[k] = b.vmax[k] * b.vmax[k];
        }
        w.emplace(b.id, Hermitian(m, "bus." + b.id, b.phases, "w", "wr", "wi", lb, ub));
    }
    auto bus_entry = [&](const std::string& bus, int p, int q) {
        const Hermitian& h = w.at(bus);
        return h.at(h.position(p), h.position(q));
    };

    for (const auto& b : net.buses) {
        const Hermitian& h = w.at(b.id);
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            for (std::size_t l = k + 1; l < b.phases.size(); ++l) {
                const CLin off = h.at(k, l);
                m.add_rotated_soc(names::bus("soc_w", b.id, names::pair_tag(b.phases[k], b.phases[l])), h.at(k, k).re,
                                  h.at(l, l).re, {off.re, off.im});
            }
        }
        if (b.type != network::BusType::Slack) continue;
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            for (std::size_t l = k; l < b.phases.size(); ++l) {
                const Complex target = b.v_set[k] * std::conj(b.v_set[l]);
                const CLin e = h.at(k, l);
                const std::string tag = names::pair_tag(b.phases[k], b.phases[l]);
                m.add_linear(names::bus("slack_w_re", b.id, tag), e.re, Sense::Eq, target.real());
                if (k != l) m.add_linear(names::bus("slack_w_im", b.id, tag), e.im, Sense::Eq, target.imag());
            }
        }
    }

    BalanceRows balance;
    for (const auto& b : net.buses) {
        for (int p : b.phases) balance.at(b.id, p);
    }

    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const std::size_t n = br.size();
        std::vector<double> lb(n, 0.0), ub(n, ir::kInf);
        for (std::size_t k = 0; k < n && k < br.rating_current.size(); ++k) {
            if (std::isfinite(br.rating_current[k])) ub[k] = br.rating_current[k] * br.rating_current[k];
        }
        Hermitian L(m, br.id, br.f_conn, "l", "lr", "li", lb, ub);
        std::vector<CLin> s(n * n);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) {
                const std::string tag = names::pair_tag(br.f_conn[k], br.f_conn[l]);
                s[k * n + l] = {LinearExpr::variable(m.add_variable(names::var("sr", br.id, tag))),
                                LinearExpr::variable(m.add_variable(names::var("si", br.id, tag)))};
            }
        }
        const CMatrix& z = br.z;

        // W_j = W_i - (S Z^H + Z S^H) + Z L Z^H
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = k; l < n; ++l) {
                CLin row = bus_entry(br.t_bus, br.t_conn[k], br.t_conn[l]) - bus_entry(br.f_bus, br.f_conn[k], br.f_conn[l]);
                for (std::size_t q = 0; q < n; ++q) {
                    add_scaled(row, s[k * n + q], std::conj(z(l, q)));
                    add_scaled(row, conj(s[l * n + q]), z(k, q));
                    for (std::size_t r = 0; r < n; ++r) {
                        const Complex c = z(k, q) * std::conj(z(l, r));
                        if (c != Complex(0.0, 0.0)) add_scaled(row, L.at(q, r), -c);
                    }
                }
                if (k == l) {
                    m.add_linear(names::var("vdrop", br.id, names::phase_tag(br.f_conn[k])), row.re, Sense::Eq);
                } else {
                    const std::string tag = names::pair_tag(br.f_conn[k], br.f_conn[l]);
                    m.add_linear(names::var("vdrop_re", br.id, tag), row.re, Sense::Eq);
                    m.add_linear(names::var("vdrop_im", br.id, tag), row.im, Sense::Eq);
                }
            }
        }

        // |S_kl|^2 <= W_i,kk L_ll and |L_kl|^2 <= L_kk L_ll
        for (std::size_t k = 0; k < n; ++k) {
            const CLin wi = bus_entry(br.f_bus, br.f_conn[k], br.f_conn[k]);
            for (std::size_t l = 0; l < n; ++l) {
                const std::string tag = names::pair_tag(br.f_conn[k], br.f_conn[l]);
                m.add_rotated_soc(names::var("soc_s", br.id, tag), wi.re, L.at(l, l).re,
                                  {s[k * n + l].re, s[k * n + l].im});
                if (l > k) {
                    const CLin off = L.at(k, l);
                    m.add_rotated_soc(names::var("soc_l", br.id, tag), L.at(k, k).re, L.at(l, l).re, {off.re, off.im});
                }
            }
        }

        const Hermitian& wf = w.at(br.f_bus);
        const Hermitian& wt = w.at(br.t_bus);
        for (std::size_t k = 0; k < n; ++k) {
            // from end: S_kk + (W_i Y_fr^H)_kk; to end: (W_j Y_to^H)_kk - S_kk + (Z L)_kk
            CLin sf = s[k * n + k];
            sf.re += shunt_power(wf, br.f_conn, br.y_fr, k).re;
            sf.im += shunt_power(wf, br.f_conn, br.y_fr, k).im;
            CLin st = shunt_power(wt, br.t_conn, br.y_to, k) - s[k * n + k];
            for (std::size_t q = 0; q < n; ++q) add_scaled(st, L.at(q, k), z(k, q));
            add_to_row(balance.at(br.f_bus, br.f_conn[k]), sf);
            add_to_row(balance.at(br.t_bus, br.t_conn[k]), st);
            if (k < br.rating_power.size() && std::isfinite(br.rating_power[k])) {
                const std::string tag = names::phase_tag(br.f_conn[k]);
                const double smax = br.rating_power[k];
                m.add_rotated_soc(names::var("flow_lim_fr", br.id, tag), LinearExpr(smax), LinearExpr(smax), {sf.re, sf.im});
                m.add_rotated_soc(names::var("flow_lim_to", br.id, tag), LinearExpr(smax), LinearExpr(smax), {st.re, st.im});
            }
        }
    }

    // ratio transformers: W_f = T W_t T^H on diagonal T, lossless
    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const std::size_t n = tr.size();
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = k; l < n; ++l) {
                const Complex c = tr.t(k, k) * std::conj(tr.t(l, l));
                CLin row = bus_entry(tr.f_bus, tr.f_conn[k], tr.f_conn[l]);
                add_scaled(row, bus_entry(tr.t_bus, tr.t_conn[k], tr.t_conn[l]), -c);
                if (k == l) {
                    m.add_linear(names::var("xfw", tr.id, names::phase_tag(tr.f_conn[k])), row.re, Sense::Eq);
                } else {
                    const std::string tag = names::pair_tag(tr.f_conn[k], tr.f_conn[l]);
                    m.add_linear(names::var("xfw_re", tr.id, tag), row.re, Sense::Eq);
                    m.add_linear(names::var("xfw_im", tr.id, tag), row.im, Sense::Eq);
                }
            }
            const std::string tag = names::phase_tag(tr.f_conn[k]);
            CLin sp{LinearExpr::variable(m.add_variable(names::var("pt", tr.id, tag))),
                    LinearExpr::variable(m.add_variable(names::var("qt", tr.id, tag)))};
            add_to_row(balance.at(tr.f_bus, tr.f_conn[k]), sp);
            add_to_row(balance.at(tr.t_bus, tr.t_conn[k]), sp, -1.0);
        }
    }

    for (const auto& sh : net.shunts) {
        const Hermitian& h = w.at(sh.bus);
        for (std::size_t k = 0; k < sh.conn.size(); ++k) add_to_row(balance.at(sh.bus, sh.conn[k]), shunt_power(h, sh.conn, sh.y, k));
    }

    for (const auto& ld : net.loads) {
        for (std::size_t k = 0; k < ld.elements.size(); ++k) {
            const auto& e = ld.elements[k];
            const std::string tag = names::element_tag(e);
            CLin sd{LinearExpr::variable(m.add_variable(names::var("pd", ld.id, tag))),
                    LinearExpr::variable(m.add_variable(names::var("qd", ld.id, tag)))};
            // |U_e|^2 in lifted variables
            LinearExpr mag = bus_entry(ld.bus, e.p, e.p).re;
            if (e.delta()) {
                mag += bus_entry(ld.bus, e.q, e.q).re;
                mag.add(bus_entry(ld.bus, e.p, e.q).re, -2.0);
            }
            const double v = ld.v_nom;
            LinearExpr factor(ld.zip.a_p);
            factor.add(mag, ld.zip.a_z / (v * v));
            if (needs_vm(ld)) {
                const int vm = m.add_variable(names::var("vm", ld.id, tag), 0.0);
                factor.add(vm, ld.zip.a_i / v);
                m.add_rotated_soc(names::var("load_vm", ld.id, tag), mag, LinearExpr(1.0), {LinearExpr::variable(vm)});
            }
            m.add_linear(names::var("load_p", ld.id, tag), sd.re - ld.s_nom[k].real() * factor, Sense::Eq);
            m.add_linear(names::var("load_q", ld.id, tag), sd.im - ld.s_nom[k].imag() * factor, Sense::Eq);
            if (!e.delta()) {
                add_to_row(balance.at(ld.bus, e.p), sd);
                continue;
            }
            // terminal shares of a delta element are only tied through their sum
            CLin at_p{LinearExpr::variable(m.add_variable(names::var("pdp", ld.id, tag))),
                      LinearExpr::variable(m.add_variable(names::var("qdp", ld.id, tag)))};
            CLin at_q{LinearExpr::variable(m.add_variable(names::var("pdq", ld.id, tag))),
                      LinearExpr::variable(m.add_variable(names::var("qdq", ld.id, tag)))};
            const CLin split{at_p.re + at_q.re - sd.re, at_p.im + at_q.im - sd.im};
            m.add_linear(names::var("load_split_p", ld.id, tag), split.re, Sense::Eq);
            m.add_linear(names::var("load_split_q", ld.id, tag), split.im, Sense::Eq);
            add_to_row(balance.at(ld.bus, e.p), at_p);
            add_to_row(balance.at(ld.bus, e.q), at_q);
        }
    }

    for (const auto& g : net.generators) {
        LinearExpr total;
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            const auto& e = g.elements[k];
            const std::string tag = names::element_tag(e);
            CLin sg{LinearExpr::variable(m.add_variable(names::var("pg", g.id, tag), g.p_min[k], g.p_max[k])),
                    LinearExpr::variable(m.add_variable(names::var("qg", g.id, tag), g.q_min[k], g.q_max[k]))};
            add_to_row(balance.at(g.bus, e.p), sg, -1.0);
            total += sg.re;
        }
        add_fuel_cost(m, net, g, total);
    }

    emit_balance(m, balance, "pb_p", "pb_q");
    return options.conic ? m.to_conic() : m;
}

}  // namespace mcdist::formulations
