#include "mcdist/network/validate.hpp"

#include <cmath>
#include <set>

#include "mcdist/network/topology.hpp"

namespace mcdist::network {

namespace {

class Checker {
  public:
    explicit Checker(const Network& net) : net_(net) {}

    std::vector<Diagnostic> run() {
        for (const auto& b : net_.buses) bus(b);
        for (const auto& br : net_.branches) branch(br);
        for (const auto& tr : net_.transformers) transformer(tr);
        for (const auto& sh : net_.shunts) {
            if (conn(sh.id, sh.bus, sh.conn)) square(sh.id, "shunt admittance", sh.y, sh.conn.size(), true);
        }
        for (const auto& ld : net_.loads) load(ld);
        for (const auto& g : net_.generators) generator(g);
        for (const auto& s : net_.storages) storage(s);
        connectivity();
        return std::move(out_);
    }

  private:
    void error(const std::string& component, const std::string& rule, const std::string& message) {
        out_.push_back({Severity::Error, component, rule, message});
    }

    bool bus_exists(const std::string& component, const std::string& bus) {
        if (net_.find_bus(bus)) return true;
        error(component, "missing bus", component + " references missing bus '" + bus + "'");
        return false;
    }

    bool conn(const std::string& component, const std::string& bus, const std::vector<int>& phases) {
        if (!bus_exists(component, bus)) return false;
        const Bus& b = net_.bus(bus);
        for (int p : phases) {
            if (b.index_of(p) < 0) {
                error(component, "phase not at bus",
                      component + " uses phase " + std::string(1, phase_letter(p)) + " absent at bus " + bus);
                return false;
            }
        }
        return true;
    }

    void square(const std::string& component, const std::string& what, const CMatrix& m, std::size_t n,
                bool symmetric) {
        if (m.rows() != static_cast<Eigen::Index>(n) || m.cols() != static_cast<Eigen::Index>(n)) {
            error(component, "matrix size", what + " is not " + std::to_string(n) + "x" + std::to_string(n));
            return;
        }
        if (symmetric && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
            error(component, "symmetry", what + " is not symmetric");
        }
    }

    void bus(const Bus& b) {
        if (b.vbase <= 0.0) error(b.id, "voltage base", "bus " + b.id + " has no positive voltage base");
        if (b.vmin.size() != b.phases.size() || b.vmax.size() != b.phases.size()) {
            error(b.id, "bounds size", "voltage bounds do not match the phases of bus " + b.id);
            return;
        }
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            if (!(0.0 <= b.vmin[k] && b.vmin[k] <= b.vmax[k])) {
                error(b.id, "voltage bounds", "bus " + b.id + " needs 0 <= vmin <= vmax");
            }
        }
        if (b.type == BusType::Slack && b.v_set.size() != b.phases.size()) {
            error(b.id, "slack setpoint", "slack bus " + b.id + " needs one phasor per phase");
        }
        if (b.floating) {
            out_.push_back({Severity::Warning, b.id, "floating bus",
                            "bus " + b.id + " has no grounded path; compare phase-to-phase voltages"});
        }
    }

    void branch(const Branch& br) {
        const bool f = conn(br.id, br.f_bus, br.f_conn);
        const bool t = conn(br.id, br.t_bus, br.t_conn);
        if (!f || !t) return;
        const std::size_t n = br.size();
        if (br.t_conn.size() != n) error(br.id, "conductor count", "branch ends have different conductor counts");
        square(br.id, "series impedance", br.z, n, true);
        square(br.id, "from-side shunt", br.y_fr, n, true);
        square(br.id, "to-side shunt", br.y_to, n, true);
        if (br.rating_current.size() != n) error(br.id, "rating size", "current rating per conductor expected");
    }

    void transformer(const IdealTransformer& tr) {
        if (!conn(tr.id, tr.f_bus, tr.f_conn) || !conn(tr.id, tr.t_bus, tr.t_conn)) return;
        const std::size_t n = tr.size();
        if (tr.t.rows() != static_cast<Eigen::Index>(n) || tr.t.cols() != static_cast<Eigen::Index>(n)) {
            error(tr.id, "matrix size", "transformation matrix is not " + std::to_string(n) + "x" + std::to_string(n));
            return;
        }
        // delta vector groups are singular by construction (zero sequence is not transferred)
        if (tr.same_config() && Eigen::FullPivLU<CMatrix>(tr.t).rank() < static_cast<Eigen::Index>(n)) {
            error(tr.id, "invertible", "transformation matrix of " + tr.id + " is singular");
        }
    }

    void load(const Load& ld) {
        if (!bus_exists(ld.id, ld.bus)) return;
        const Bus& b = net_.bus(ld.bus);
        for (const auto& e : ld.elements) {
            if (b.index_of(e.p) < 0 || (e.delta() && b.index_of(e.q) < 0)) {
                error(ld.id, "phase not at bus", ld.id + " connects to a phase absent at bus " + ld.bus);
            }
        }
        if (ld.connection == Connection::Delta && b.phases.size() < 2) {
            error(ld.id, "delta phases", "delta load " + ld.id + " needs at least two phases");
        }
        if (ld.s_nom.size() != ld.elements.size()) error(ld.id, "size", "one nominal power per element expected");
        const auto& z = ld.zip;
        if (z.a_z < 0 || z.a_i < 0 || z.a_p < 0 || std::abs(z.a_z + z.a_i + z.a_p - 1.0) > 1e-9) {
            error(ld.id, "zip", "ZIP coefficients must be nonnegative and sum to 1");
        }
        if (!(ld.v_nom > 0.0)) error(ld.id, "v_nom", "nominal voltage must be positive");
    }

    void generator(const Generator& g) {
        if (!bus_exists(g.id, g.bus)) return;
        const Bus& b = net_.bus(g.bus);
        for (const auto& e : g.elements) {
            if (b.index_of(e.p) < 0 || (e.delta() && b.index_of(e.q) < 0)) {
                error(g.id, "phase not at bus", g.id + " connects to a phase absent at bus " + g.bus);
            }
        }
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            if (g.p_min[k] > g.p_max[k]) error(g.id, "p bounds", "p_min exceeds p_max");
            if (g.q_min[k] > g.q_max[k]) error(g.id, "q bounds", "q_min exceeds q_max");
        }
    }

    void storage(const Storage& s) {
        conn(s.id, s.bus, s.conn);
        if (!(0.0 <= s.energy_init && s.energy_init <= s.energy_max)) {
            error(s.id, "energy", "storage needs 0 <= energy_init <= energy_max");
        }
        for (double eta : {s.eff_charge, s.eff_discharge}) {
            if (!(eta > 0.0 && eta <= 1.0)) error(s.id, "efficiency", "storage efficiency must be in (0, 1]");
        }
    }

    void connectivity() {
        for (const auto& br : net_.branches) {
            if (!net_.find_bus(br.f_bus) || !net_.find_bus(br.t_bus)) return;
        }
        for (const auto& tr : net_.transformers) {
            if (!net_.find_bus(tr.f_bus) || !net_.find_bus(tr.t_bus)) return;
        }
        std::set<std::string> load_buses;
        for (const auto& ld : net_.loads) load_buses.insert(ld.bus);
        for (const auto& island : islands(net_)) {
            int slacks = 0;
            for (int i : island) slacks += net_.buses[static_cast<std::size_t>(i)].type == BusType::Slack;
            const std::string first = net_.buses[static_cast<std::size_t>(island.front())].id;
            if (slacks > 1) error(first, "multiple slack", "island containing bus " + first + " has multiple slack buses");
            if (slacks == 0) {
                for (int i : island) {
                    const auto& id = net_.buses[static_cast<std::size_t>(i)].id;
                    if (load_buses.count(id)) {
                        error(id, "unreachable load", "load bus " + id + " is not connected to a slack bus");
                    }
                }
            }
        }
    }

    const Network& net_;
    std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Network& net) { return Checker(net).run(); }

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) return true;
    }
    return false;
}

}  // namespace mcdist::network
