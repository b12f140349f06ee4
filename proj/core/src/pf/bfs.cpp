#include "mcdist/pf/bfs.hpp"

#include <cmath>

#include "mcdist/common/errors.hpp"
#include "mcdist/network/topology.hpp"
#include "mcdist/pf/load_models.hpp"
#include "mcdist/pf/newton.hpp"

namespace mcdist::pf {

using network::EdgeKind;

namespace {

/// One tree edge in conductor space, parent side first.
struct Edge {
    EdgeKind kind;
    std::string id;
    bool reversed = false;
    std::vector<int> parent_conn, child_conn;
    CMatrix z, y_parent, y_child;  ///< branches
    CMatrix t, t_inv;              ///< transformers
    // sweep state
    CMatrix a;
    CVector j_child;
};

class Sweeper {
  public:
    explicit Sweeper(const network::Network& net) : net_(net), tree_(network::build_tree(net)) {
        const int nb = static_cast<int>(net.buses.size());
        if (static_cast<int>(tree_.order.size()) != nb) {
            std::vector<bool> seen(nb, false);
            for (int b : tree_.order) seen[b] = true;
            for (int b = 0; b < nb; ++b) {
                if (!seen[b]) throw ModelError("bus " + net.buses[b].id + " is not connected to the slack bus");
            }
        }
        edges_.resize(nb);
        for (int b : tree_.order) {
            const int e = tree_.parent_edge[b];
            if (e < 0) continue;
            const network::TreeEdge& te = tree_.edges[e];
            Edge& ed = edges_[b];
            ed.kind = te.kind;
            ed.reversed = te.reversed;
            if (te.kind == EdgeKind::Branch) {
                const auto& br = net.branches[te.index];
                ed.id = br.id;
                ed.z = br.z;
                ed.parent_conn = te.reversed ? br.t_conn : br.f_conn;
                ed.child_conn = te.reversed ? br.f_conn : br.t_conn;
                ed.y_parent = te.reversed ? br.y_to : br.y_fr;
                ed.y_child = te.reversed ? br.y_fr : br.y_to;
            } else {
                const auto& tr = net.transformers[te.index];
                ed.id = tr.id;
                ed.t = tr.t;
                ed.parent_conn = te.reversed ? tr.t_conn : tr.f_conn;
                ed.child_conn = te.reversed ? tr.f_conn : tr.t_conn;
                if (!te.reversed) {
                    Eigen::FullPivLU<CMatrix> lu(tr.t);
                    if (!lu.isInvertible()) {
                        throw UnsupportedError("backward-forward sweep: transformer " + tr.id +
                                               " cannot be swept towards its secondary (singular ratio matrix)");
                    }
                    ed.t_inv = lu.inverse();
                }
            }
            const auto& child = net.buses[b];
            if (ed.child_conn.size() != child.phases.size()) {
                throw UnsupportedError("backward-forward sweep: bus " + child.id + " has phases not fed by " + ed.id);
            }
        }
        for (const auto& g : net.generators) {
            if (g.is_source() && net.bus_index(g.bus) != tree_.order.front()) {
                throw UnsupportedError("backward-forward sweep: source " + g.id + " is not at the root bus");
            }
        }

        local_y_.resize(nb);
        for (int b = 0; b < nb; ++b) {
            const auto n = static_cast<Eigen::Index>(net.buses[b].phases.size());
            local_y_[b] = CMatrix::Zero(n, n);
        }
        for (const auto& sh : net.shunts) {
            const int b = net.bus_index(sh.bus);
            for (std::size_t k = 0; k < sh.conn.size(); ++k) {
                for (std::size_t l = 0; l < sh.conn.size(); ++l) local_y_[b](pos(b, sh.conn[k]), pos(b, sh.conn[l])) += sh.y(k, l);
            }
        }
        for (const auto& ld : net.loads) {
            if (ld.zip.a_z == 0.0) continue;
            const int b = net.bus_index(ld.bus);
            for (std::size_t k = 0; k < ld.elements.size(); ++k) {
                const auto& e = ld.elements[k];
                const Complex y = std::conj(ld.s_nom[k]) * ld.zip.a_z / (ld.v_nom * ld.v_nom);
                local_y_[b](pos(b, e.p), pos(b, e.p)) += y;
                if (!e.delta()) continue;
                local_y_[b](pos(b, e.q), pos(b, e.q)) += y;
                local_y_[b](pos(b, e.p), pos(b, e.q)) -= y;
                local_y_[b](pos(b, e.q), pos(b, e.p)) -= y;
            }
        }
        for (const auto& ld : net.loads) linear_ = linear_ && ld.zip.a_i == 0.0 && ld.zip.a_p == 0.0;
        for (const auto& g : net.generators) linear_ = linear_ && g.is_source();
    }

    bool linear() const { return linear_; }

    std::vector<CVector> flat() const {
        std::vector<CVector> u(net_.buses.size());
        const auto& slack = net_.slack();
        for (std::size_t b = 0; b < net_.buses.size(); ++b) {
            const auto& bus = net_.buses[b];
            u[b].resize(static_cast<Eigen::Index>(bus.phases.size()));
            for (std::size_t k = 0; k < bus.phases.size(); ++k) {
                const int s = slack.index_of(bus.phases[k]);
                u[b][static_cast<Eigen::Index>(k)] =
                    s >= 0 ? slack.v_set[s] : slack.v_set.front() * phase_rotation(bus.phases[k] - slack.phases.front());
            }
        }
        return u;
    }

    /// Non-impedance load and generator currents leaving each bus at `u`.
    std::vector<CVector> injections(const std::vector<CVector>& u, bool full) const {
        std::vector<CVector> j(u.size());
        for (std::size_t b = 0; b < u.size(); ++b) j[b] = CVector::Zero(u[b].size());
        for (const auto& ld : net_.loads) {
            const int b = net_.bus_index(ld.bus);
            const network::Zip zip = full ? ld.zip : network::Zip{0.0, ld.zip.a_i, ld.zip.a_p};
            for (std::size_t k = 0; k < ld.elements.size(); ++k) {
                const auto& e = ld.elements[k];
                const Complex ue = element_voltage(e, u[b][pos(b, e.p)], e.delta() ? u[b][pos(b, e.q)] : Complex());
                const Complex i = zip_current(ue, ld.s_nom[k], ld.v_nom, zip).i;
                j[b][pos(b, e.p)] += i;
                if (e.delta()) j[b][pos(b, e.q)] -= i;
            }
        }
        for (const auto& g : net_.generators) {
            if (g.is_source()) continue;
            const int b = net_.bus_index(g.bus);
            for (std::size_t k = 0; k < g.elements.size(); ++k) {
                const auto& e = g.elements[k];
                const Complex ue = element_voltage(e, u[b][pos(b, e.p)], e.delta() ? u[b][pos(b, e.q)] : Complex());
                const Complex i = constant_power_current(ue, Complex(g.p_set[k], g.q_set[k])).i;
                j[b][pos(b, e.p)] -= i;
                if (e.delta()) j[b][pos(b, e.q)] += i;
            }
        }
        return j;
    }

    /// One backward aggregation and forward voltage sweep.
    std::vector<CVector> sweep(const std::vector<CVector>& u) {
        std::vector<CMatrix> y = local_y_;
        std::vector<CVector> j = injections(u, false);
        for (auto it = tree_.order.rbegin(); it != tree_.order.rend(); ++it) {
            const int b = *it;
            if (tree_.parent_edge[b] < 0) continue;
            Edge& ed = edges_[b];
            const int parent = tree_.edges[tree_.parent_edge[b]].parent_bus;
            const CMatrix yc = gather(y[b], b, ed.child_conn);
            const CVector jc = gather(j[b], b, ed.child_conn);
            CMatrix yp;
            CVector jp;
            if (ed.kind == EdgeKind::Branch) {
                const CMatrix yprime = ed.y_child + yc;
                const auto n = static_cast<Eigen::Index>(ed.child_conn.size());
                ed.a = (CMatrix::Identity(n, n) + ed.z * yprime).inverse();
                yp = ed.y_parent + yprime * ed.a;
                jp = jc - yprime * ed.a * ed.z * jc;
            } else if (!ed.reversed) {
                yp = ed.t_inv.adjoint() * yc * ed.t_inv;
                jp = ed.t_inv.adjoint() * jc;
            } else {
                yp = ed.t.adjoint() * yc * ed.t;
                jp = ed.t.adjoint() * jc;
            }
            ed.j_child = jc;
            scatter(y[parent], parent, ed.parent_conn, yp);
            scatter(j[parent], parent, ed.parent_conn, jp);
        }
        std::vector<CVector> out = u;
        for (int b : tree_.order) {
            if (tree_.parent_edge[b] < 0) continue;
            const Edge& ed = edges_[b];
            const int parent = tree_.edges[tree_.parent_edge[b]].parent_bus;
            const CVector up = gather(out[parent], parent, ed.parent_conn);
            CVector uc;
            if (ed.kind == EdgeKind::Branch) uc = ed.a * (up - ed.z * ed.j_child);
            else if (!ed.reversed) uc = ed.t_inv * up;
            else uc = ed.t * up;
            for (std::size_t k = 0; k < ed.child_conn.size(); ++k) out[b][pos(b, ed.child_conn[k])] = uc[static_cast<Eigen::Index>(k)];
        }
        return out;
    }

    /// Exact KCL currents for the final voltages, into `sol`.
    void currents(const std::vector<CVector>& u, PfSolution& sol) const {
        std::vector<CVector> down = injections(u, true);
        for (std::size_t b = 0; b < u.size(); ++b) down[b] += local_shunt(static_cast<int>(b)) * u[b];
        for (auto it = tree_.order.rbegin(); it != tree_.order.rend(); ++it) {
            const int b = *it;
            if (tree_.parent_edge[b] < 0) continue;
            const Edge& ed = edges_[b];
            const int parent = tree_.edges[tree_.parent_edge[b]].parent_bus;
            const CVector ic = gather(down[b], b, ed.child_conn);
            const CVector uc = gather(u[b], b, ed.child_conn);
            const CVector up = gather(u[parent], parent, ed.parent_conn);
            CVector leaving_parent;
            if (ed.kind == EdgeKind::Branch) {
                const CVector through = ed.y_child * uc + ic;  // parent to child in the series element
                leaving_parent = through + ed.y_parent * up;
                const CVector is = ed.reversed ? CVector(-through) : through;
                sol.branches[ed.id].i_series.assign(is.data(), is.data() + is.size());
            } else {
                auto& flow = sol.transformers[ed.id];
                CVector i_f, i_t;
                if (!ed.reversed) {
                    i_t = -ic;
                    i_f = ed.t_inv.adjoint() * ic;
                    leaving_parent = i_f;
                } else {
                    i_f = -ic;
                    i_t = ed.t.adjoint() * ic;
                    leaving_parent = i_t;
                }
                flow.i_f.assign(i_f.data(), i_f.data() + i_f.size());
                flow.i_t.assign(i_t.data(), i_t.data() + i_t.size());
            }
            CVector& dp = down[parent];
            for (std::size_t k = 0; k < ed.parent_conn.size(); ++k) dp[pos(parent, ed.parent_conn[k])] += leaving_parent[static_cast<Eigen::Index>(k)];
        }
    }

  private:
    Eigen::Index pos(int bus, int phase) const {
        const int k = net_.buses[bus].index_of(phase);
        if (k < 0) throw ModelError("bus " + net_.buses[bus].id + " has no phase " + std::string(1, phase_letter(phase)));
        return k;
    }

    CMatrix gather(const CMatrix& m, int bus, const std::vector<int>& conn) const {
        const auto n = static_cast<Eigen::Index>(conn.size());
        CMatrix out(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index l = 0; l < n; ++l) out(k, l) = m(pos(bus, conn[k]), pos(bus, conn[l]));
        }
        return out;
    }
    CVector gather(const CVector& v, int bus, const std::vector<int>& conn) const {
        CVector out(static_cast<Eigen::Index>(conn.size()));
        for (std::size_t k = 0; k < conn.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[pos(bus, conn[k])];
        return out;
    }
    void scatter(CMatrix& m, int bus, const std::vector<int>& conn, const CMatrix& add) const {
        for (std::size_t k = 0; k < conn.size(); ++k) {
            for (std::size_t l = 0; l < conn.size(); ++l) {
                m(pos(bus, conn[k]), pos(bus, conn[l])) += add(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
            }
        }
    }
    void scatter(CVector& v, int bus, const std::vector<int>& conn, const CVector& add) const {
        for (std::size_t k = 0; k < conn.size(); ++k) v[pos(bus, conn[k])] += add[static_cast<Eigen::Index>(k)];
    }

    /// Shunt admittance only; impedance loads are counted with the full ZIP currents.
    CMatrix local_shunt(int b) const {
        const auto n = static_cast<Eigen::Index>(net_.buses[b].phases.size());
        CMatrix y = CMatrix::Zero(n, n);
        for (const auto& sh : net_.shunts) {
            if (sh.bus != net_.buses[b].id) continue;
            for (std::size_t k = 0; k < sh.conn.size(); ++k) {
                for (std::size_t l = 0; l < sh.conn.size(); ++l) y(pos(b, sh.conn[k]), pos(b, sh.conn[l])) += sh.y(k, l);
            }
        }
        return y;
    }

    const network::Network& net_;
    network::Tree tree_;
    std::vector<Edge> edges_;
    std::vector<CMatrix> local_y_;
    bool linear_ = true;
};

}  // namespace

PfSolution solve_bfs(const network::Network& net, const BfsOptions& options) {
    network::require_radial(net, "backward-forward sweep");
    Sweeper sw(net);
    std::vector<CVector> u = sw.flat();
    int iterations = 0;
    double change = ir::kInf;
    while (iterations < options.max_iterations) {
        std::vector<CVector> next = sw.sweep(u);
        ++iterations;
        change = 0.0;
        for (std::size_t b = 0; b < u.size(); ++b) {
            if (u[b].size() > 0) change = std::max(change, (next[b] - u[b]).cwiseAbs().maxCoeff());
        }
        u = std::move(next);
        // with impedance loads only the first sweep is already exact
        if (change <= options.tolerance || sw.linear()) break;
    }

    PfSolution sol;
    sol.method = "bfs";
    for (std::size_t b = 0; b < u.size(); ++b) {
        const auto& bus = net.buses[b];
        for (std::size_t k = 0; k < bus.phases.size(); ++k) sol.voltages[bus.id][bus.phases[k]] = u[b][static_cast<Eigen::Index>(k)];
    }
    sw.currents(u, sol);
    complete_solution(net, sol);
    sol.iterations = iterations;
    sol.converged = change <= options.tolerance || sw.linear();
    const NewtonSystem sys(net);
    const RVector f = sys.residual(sys.pack(sol));
    sol.max_residual = f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
    if (!sol.converged) {
        sol.diagnostics.push_back("no convergence after " + std::to_string(iterations) + " sweeps; last voltage change " +
                                  std::to_string(change));
    }
    return sol;
}

}  // namespace mcdist::pf
