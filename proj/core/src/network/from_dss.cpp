#include "mcdist/network/from_dss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "mcdist/common/errors.hpp"
#include "mcdist/dss/statement.hpp"
#include "mcdist/network/kron.hpp"
#include "mcdist/network/topology.hpp"

namespace mcdist::network {

namespace {

using dss::DssObject;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt3 = std::sqrt(3.0);

std::string lower(const std::string& s) { return dss::to_lower(s); }

bool truthy(const std::string& text) {
    const std::string t = lower(text);
    return t == "y" || t == "yes" || t == "true" || t == "t";
}

bool enabled(const DssObject& obj) {
    return !obj.has("enabled") || truthy(obj.text("enabled"));
}

Connection parse_connection(const std::string& text, const std::string& who) {
    const std::string t = lower(text);
    if (t.empty() || t == "wye" || t == "y" || t == "ln") return Connection::Wye;
    if (t == "delta" || t == "d" || t == "ll") return Connection::Delta;
    throw UnsupportedError(who + ": unsupported connection '" + text + "'");
}

double length_factor(const std::string& units) {
    const std::string u = lower(units);
    if (u.empty() || u == "none") return 0.0;
    if (u == "mi") return 1609.344;
    if (u == "kft") return 304.8;
    if (u == "km") return 1000.0;
    if (u == "m") return 1.0;
    if (u == "ft") return 0.3048;
    if (u == "in") return 0.0254;
    if (u == "cm") return 0.01;
    throw ModelError("unknown length unit '" + units + "'");
}

/// n x n phase matrix from sequence quantities.
RMatrix from_sequence(double s1, double s0, int n) {
    if (n == 1) return RMatrix::Constant(1, 1, (2.0 * s1 + s0) / 3.0);
    RMatrix m = RMatrix::Constant(n, n, (s0 - s1) / 3.0);
    m.diagonal().setConstant((2.0 * s1 + s0) / 3.0);
    return m;
}

RMatrix to_eigen(const dss::SymMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    RMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return out;
}

/// Terminal numbers of a connection; defaults to 1..n when none are given.
std::vector<int> terminals(const dss::BusSpec& spec, int n) {
    if (spec.terminals.empty()) {
        std::vector<int> t(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = k + 1;
        return t;
    }
    return spec.terminals;
}

int phase_of(int terminal, const std::string& who) {
    if (terminal < 1 || terminal > 3) {
        throw ModelError(who + ": terminal " + std::to_string(terminal) + " is not a phase conductor");
    }
    return terminal - 1;
}

std::vector<Element> elements_for(const dss::BusSpec& spec, int phases, Connection conn, const std::string& who) {
    std::vector<int> t = terminals(spec, phases);
    std::vector<int> ph;
    for (int term : t) {
        if (term >= 1 && term <= 3) ph.push_back(term - 1);
    }
    std::vector<Element> out;
    if (conn == Connection::Wye) {
        if (phases == 1 && ph.size() >= 2) return {{ph[0], ph[1]}};
        if (static_cast<int>(ph.size()) < phases) throw ModelError(who + ": fewer terminals than phases");
        for (int k = 0; k < phases; ++k) out.push_back({ph[static_cast<std::size_t>(k)], kGround});
        return out;
    }
    if (phases == 3) {
        if (ph.size() < 3) throw ModelError(who + ": delta connection needs 3 phase terminals");
        return {{ph[0], ph[1]}, {ph[1], ph[2]}, {ph[2], ph[0]}};
    }
    if (phases == 1) {
        if (ph.empty()) throw ModelError(who + ": no phase terminal");
        if (ph.size() == 1) return {{ph[0], (ph[0] + 1) % 3}};
        return {{ph[0], ph[1]}};
    }
    throw UnsupportedError(who + ": " + std::to_string(phases) + "-phase delta (open delta) is not supported");
}

std::vector<int> element_phases(const std::vector<Element>& elements) {
    std::vector<int> out;
    for (const auto& e : elements) {
        for (int p : {e.p, e.q}) {
            if (p != kGround && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
        }
    }
    return out;
}

struct BusEntry {
    std::set<int> phases;
    double vmin = -kInf;  ///< explicit component overrides
    double vmax = kInf;
    bool has_vmin = false, has_vmax = false;
};

class Converter {
  public:
    Converter(const dss::DssDataModel& model, const FromDssOptions& options) : m_(model), opt_(options) {}

    Network run() {
        net_.sbase = opt_.sbase;
        if (auto it = m_.options.find("defaultbasefrequency"); it != m_.options.end()) {
            net_.base_frequency = std::get<double>(it->second);
        }
        if (auto it = m_.options.find("basefrequency"); it != m_.options.end()) {
            net_.base_frequency = std::get<double>(it->second);
        }
        net_.warnings = m_.warnings;
        if (opt_.sbase <= 0.0) throw ModelError("sbase must be positive");

        source();
        propagate_bases();
        for (const auto& [cls, key] : m_.source_order) {
            const DssObject& obj = *m_.find(cls, key);
            if (cls == "line") line(obj);
            else if (cls == "transformer") transformer(obj);
            else if (cls == "load") load(obj);
            else if (cls == "generator" || cls == "pvsystem") generator(cls, obj);
            else if (cls == "storage") storage(obj);
            else if (cls == "capacitor" || cls == "reactor") shunt(cls, obj);
        }
        finish_buses();
        return std::move(net_);
    }

  private:
    BusEntry& touch(const std::string& bus, const std::vector<int>& phases) {
        auto [it, inserted] = entries_.try_emplace(bus);
        if (inserted) bus_order_.push_back(bus);
        it->second.phases.insert(phases.begin(), phases.end());
        return it->second;
    }

    double vbase(const std::string& bus, const std::string& who) const {
        auto it = vbase_.find(bus);
        if (it == vbase_.end() || it->second <= 0.0) {
            throw ModelError(who + ": bus '" + bus + "' has no voltage base (not connected to the source)");
        }
        return it->second;
    }

    void bounds(BusEntry& entry, const DssObject& obj) {
        if (obj.has("vminpu")) {
            entry.vmin = std::max(entry.vmin, obj.number("vminpu", 0.0));
            entry.has_vmin = true;
        }
        if (obj.has("vmaxpu")) {
            entry.vmax = std::min(entry.vmax, obj.number("vmaxpu", kInf));
            entry.has_vmax = true;
        }
    }

    static std::array<double, 3> cost(const DssObject& obj, std::array<double, 3> fallback, const std::string& who) {
        if (!obj.has("cost")) return fallback;
        auto c = obj.numbers("cost");
        if (c.size() != 3) throw ModelError(who + ": cost needs three coefficients [c2 c1 c0]");
        return {c[0], c[1], c[2]};
    }

    void source() {
        if (m_.count("vsource") != 1) {
            throw ModelError("expected exactly one circuit/vsource, found " + std::to_string(m_.count("vsource")));
        }
        const DssObject& vs = m_.objects.at("vsource").begin()->second;
        const std::string who = "vsource." + vs.name;
        auto spec = vs.bus("bus1").value_or(dss::BusSpec{"sourcebus", {}});
        const int phases = static_cast<int>(vs.number("phases", 3));
        source_bus_ = lower(spec.name);
        const double basekv = vs.number("basekv", 115.0);
        if (basekv <= 0.0) throw ModelError(who + ": basekv must be positive");
        source_vbase_ = phases == 1 ? basekv * 1000.0 : basekv * 1000.0 / kSqrt3;
        source_pu_ = vs.number("pu", 1.0);
        source_angle_ = vs.number("angle", 0.0) * kPi / 180.0;

        std::vector<int> ph;
        for (int t : terminals(spec, phases)) {
            if (t >= 1 && t <= 3 && static_cast<int>(ph.size()) < phases) ph.push_back(t - 1);
        }
        touch(source_bus_, ph);

        Generator g;
        g.id = "vsource." + vs.name;
        g.bus = source_bus_;
        g.kind = GeneratorKind::Source;
        for (int p : ph) g.elements.push_back({p, kGround});
        const std::size_t n = ph.size();
        g.p_min.assign(n, -kInf);
        g.p_max.assign(n, kInf);
        g.q_min.assign(n, -kInf);
        g.q_max.assign(n, kInf);
        g.p_set.assign(n, 0.0);
        g.q_set.assign(n, 0.0);
        auto c = cost(vs, {0.0, 1.0, 0.0}, who);
        g.c2 = c[0];
        g.c1 = c[1];
        g.c0 = c[2];
        net_.generators.push_back(std::move(g));
    }

    void propagate_bases() {
        struct Edge {
            std::string other;
            double ratio;
        };
        std::map<std::string, std::vector<Edge>> adj;
        for (const auto& [key, obj] : objects("line")) {
            auto b1 = lower(obj.bus("bus1").value_or(dss::BusSpec{}).name);
            auto b2 = lower(obj.bus("bus2").value_or(dss::BusSpec{}).name);
            if (b1.empty() || b2.empty()) throw ModelError("line." + obj.name + ": bus1 and bus2 are required");
            adj[b1].push_back({b2, 1.0});
            adj[b2].push_back({b1, 1.0});
        }
        for (const auto& [key, obj] : objects("transformer")) {
            auto buses = obj.texts("buses");
            auto kvs = obj.numbers("kvs");
            if (buses.size() < 2 || kvs.size() < 2) continue;  // reported during conversion
            auto b1 = lower(dss::BusSpec::parse(buses[0]).name);
            auto b2 = lower(dss::BusSpec::parse(buses[1]).name);
            if (kvs[0] <= 0.0 || kvs[1] <= 0.0) throw ModelError("transformer." + obj.name + ": kv must be positive");
            adj[b1].push_back({b2, kvs[1] / kvs[0]});
            adj[b2].push_back({b1, kvs[0] / kvs[1]});
        }
        vbase_[source_bus_] = source_vbase_;
        std::deque<std::string> queue{source_bus_};
        while (!queue.empty()) {
            std::string b = queue.front();
            queue.pop_front();
            for (const auto& e : adj[b]) {
                const double v = vbase_[b] * e.ratio;
                auto it = vbase_.find(e.other);
                if (it == vbase_.end()) {
                    vbase_[e.other] = v;
                    queue.push_back(e.other);
                } else if (std::abs(it->second - v) > 1e-9 * v) {
                    net_.warnings.push_back("bus " + e.other + ": inconsistent voltage bases around a loop; keeping " +
                                            std::to_string(it->second) + " V");
                }
            }
        }
    }

    const std::map<std::string, DssObject>& objects(const std::string& cls) const {
        static const std::map<std::string, DssObject> empty;
        auto it = m_.objects.find(cls);
        return it == m_.objects.end() ? empty : it->second;
    }

    void line(const DssObject& obj) {
        const std::string who = "line." + obj.name;
        const DssObject* code = nullptr;
        if (obj.has("linecode")) {
            code = m_.find("linecode", obj.text("linecode"));
            if (!code) throw ModelError(who + ": missing linecode '" + obj.text("linecode") + "'");
        }
        const bool is_switch = obj.has("switch") && truthy(obj.text("switch"));
        const auto spec1 = *obj.bus("bus1");
        const auto spec2 = *obj.bus("bus2");
        const std::string b1 = lower(spec1.name);
        const std::string b2 = lower(spec2.name);

        // impedance data comes from the line itself when given, else the linecode
        const DssObject* zsrc = obj.has("rmatrix") || obj.has("xmatrix") || obj.has("r1") || obj.has("x1") ||
                                        obj.has("r0") || obj.has("x0") || !code
                                    ? &obj
                                    : code;
        int phases = static_cast<int>(obj.number("phases", code ? code->number("nphases", 3) : 3));
        RMatrix r, x, c;
        if (zsrc->has("rmatrix") || zsrc->has("xmatrix")) {
            auto rm = zsrc->matrix("rmatrix");
            auto xm = zsrc->matrix("xmatrix");
            const std::size_t n = rm ? rm->size() : xm->size();
            r = rm ? to_eigen(*rm) : RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            x = xm ? to_eigen(*xm) : RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            if (r.rows() != x.rows()) throw ModelError(who + ": rmatrix and xmatrix sizes differ");
        } else {
            const int n = zsrc == code ? static_cast<int>(code->number("nphases", phases)) : phases;
            r = from_sequence(zsrc->number("r1", 0.058), zsrc->number("r0", 0.1784), n);
            x = from_sequence(zsrc->number("x1", 0.1206), zsrc->number("x0", 0.4047), n);
        }
        const DssObject* csrc = obj.has("cmatrix") || obj.has("c1") || obj.has("c0") || !code ? &obj : code;
        if (auto cm = csrc->matrix("cmatrix")) {
            c = to_eigen(*cm);
        } else {
            c = from_sequence(csrc->number("c1", 3.4), csrc->number("c0", 1.6), static_cast<int>(r.rows()));
        }
        if (c.rows() != r.rows()) throw ModelError(who + ": cmatrix size does not match the impedance matrices");
        const int m = static_cast<int>(r.rows());

        double length = obj.number("length", 1.0);
        const double f_line = length_factor(obj.text("units"));
        const double f_code = code ? length_factor(code->text("units")) : 0.0;
        if (f_line > 0.0 && f_code > 0.0) length *= f_line / f_code;

        // conductors on phase terminals are kept; neutrals are Kron-eliminated
        std::vector<int> t1 = terminals(spec1, m);
        std::vector<int> t2 = terminals(spec2, m);
        std::vector<int> keep, fconn, tconn;
        for (int k = 0; k < m; ++k) {
            const int a = k < static_cast<int>(t1.size()) ? t1[static_cast<std::size_t>(k)] : 0;
            const int b = k < static_cast<int>(t2.size()) ? t2[static_cast<std::size_t>(k)] : 0;
            const bool pa = a >= 1 && a <= 3;
            const bool pb = b >= 1 && b <= 3;
            if (pa != pb) throw ModelError(who + ": conductor " + std::to_string(k + 1) + " is a phase at one end only");
            if (!pa) continue;
            keep.push_back(k);
            fconn.push_back(a - 1);
            tconn.push_back(b - 1);
        }
        if (keep.empty()) throw ModelError(who + ": no phase conductors");
        if (static_cast<int>(keep.size()) > phases && obj.has("phases")) {
            throw ModelError(who + ": more phase terminals than phases=" + std::to_string(phases));
        }

        const double vb = vbase(b1, who);
        const double vb2 = vbase(b2, who);
        if (std::abs(vb - vb2) > 1e-9 * vb) {
            throw ModelError(who + ": ends are on different voltage bases (" + std::to_string(vb) + " V, " +
                             std::to_string(vb2) + " V)");
        }
        const double zbase = vb * vb / net_.sbase;
        const double omega = 2.0 * kPi * net_.base_frequency;

        CMatrix zfull = (r.cast<Complex>() + Complex(0, 1) * x.cast<Complex>()) * length;
        CMatrix yfull = Complex(0, 1) * omega * 1e-9 * length * c.cast<Complex>();
        const auto n = static_cast<Eigen::Index>(keep.size());

        Branch br;
        br.id = who;
        br.f_bus = b1;
        br.t_bus = b2;
        br.f_conn = fconn;
        br.t_conn = tconn;
        br.is_switch = is_switch;
        br.status = enabled(obj);
        if (is_switch) {
            br.z = CMatrix::Zero(n, n);
            br.y_fr = CMatrix::Zero(n, n);
            br.y_to = CMatrix::Zero(n, n);
        } else {
            br.z = kron_reduce(zfull, keep) / zbase;
            CMatrix ysh = select(yfull, keep) * zbase;
            br.y_fr = ysh / 2.0;
            br.y_to = ysh / 2.0;
        }
        double amps = kInf;
        if (obj.has("normamps")) amps = obj.number("normamps", kInf);
        else if (code && code->has("normamps")) amps = code->number("normamps", kInf);
        const double ibase = net_.sbase / vb;
        br.rating_current.assign(static_cast<std::size_t>(n), amps / ibase);
        br.rating_power = br.rating_current;
        if (obj.has("vad_min") || obj.has("vad_max")) {
            br.angle_bounds = std::make_pair(obj.number("vad_min", -180.0) * kPi / 180.0,
                                             obj.number("vad_max", 180.0) * kPi / 180.0);
        }
        touch(b1, fconn);
        touch(b2, tconn);
        net_.branches.push_back(std::move(br));
    }

    void transformer(const DssObject& obj) {
        const std::string who = "transformer." + obj.name;
        const int windings = static_cast<int>(obj.number("windings", 2));
        if (windings != 2) throw UnsupportedError(who + ": only two-winding transformers are supported");
        auto buses = obj.texts("buses");
        if (buses.size() != 2) throw ModelError(who + ": both winding buses are required");

        TransformerSpec spec;
        spec.id = who;
        spec.phases = static_cast<int>(obj.number("phases", 3));
        auto conns = obj.texts("conns");
        auto kvs = obj.numbers("kvs");
        auto kvas = obj.numbers("kvas");
        auto taps = obj.numbers("taps");
        auto rs = obj.numbers("%rs");
        if (!conns.empty()) {
            spec.config_primary = parse_connection(conns[0], who);
            spec.config_secondary = parse_connection(conns[1], who);
        }
        if (!kvs.empty()) {
            spec.kv_primary = kvs[0];
            spec.kv_secondary = kvs[1];
        }
        if (!kvas.empty()) spec.kva = kvas[0];
        if (!taps.empty()) {
            spec.tap_primary = taps[0];
            spec.tap_secondary = taps[1];
        }
        if (obj.has("%loadloss")) spec.r_percent = obj.number("%loadloss", 0.4);
        else if (!rs.empty()) spec.r_percent = rs[0] + rs[1];
        spec.x_percent = obj.number("xhl", obj.number("x12", 7.0));
        spec.noload_percent = obj.number("%noloadloss", 0.0);
        spec.imag_percent = obj.number("%imag", 0.0);

        auto s1 = dss::BusSpec::parse(buses[0]);
        auto s2 = dss::BusSpec::parse(buses[1]);
        spec.bus_primary = lower(s1.name);
        spec.bus_secondary = lower(s2.name);
        auto conductors = [&](const dss::BusSpec& s) {
            std::vector<int> out;
            for (int t : terminals(s, spec.phases)) {
                if (static_cast<int>(out.size()) == spec.phases) break;
                out.push_back(phase_of(t, who));
            }
            return out;
        };
        if (spec.phases == 1 && (s1.terminals.size() >= 2 && s1.terminals[1] != 0)) {
            throw UnsupportedError(who + ": single-phase winding across two phases is not supported");
        }
        spec.conn_primary = conductors(s1);
        spec.conn_secondary = conductors(s2);

        auto parts = decompose_transformer(spec, vbase(spec.bus_primary, who), vbase(spec.bus_secondary, who),
                                           net_.sbase);
        const bool on = enabled(obj);
        parts.leakage.status = on;
        parts.ideal.status = on;
        touch(spec.bus_primary, spec.conn_primary);
        touch(spec.bus_secondary, spec.conn_secondary);
        internal_.push_back(std::move(parts.internal_bus));
        net_.branches.push_back(std::move(parts.leakage));
        net_.transformers.push_back(std::move(parts.ideal));
        if (parts.magnetizing) net_.shunts.push_back(std::move(*parts.magnetizing));
    }

    void load(const DssObject& obj) {
        if (!enabled(obj)) return;
        const std::string who = "load." + obj.name;
        const auto spec = obj.bus("bus1").value_or(dss::BusSpec{});
        if (spec.name.empty()) throw ModelError(who + ": bus1 is required");
        const std::string bus = lower(spec.name);
        const int phases = static_cast<int>(obj.number("phases", 3));
        const Connection conn = parse_connection(obj.text("conn"), who);

        Load ld;
        ld.id = who;
        ld.bus = bus;
        ld.elements = elements_for(spec, phases, conn, who);
        const bool delta = std::any_of(ld.elements.begin(), ld.elements.end(), [](auto& e) { return e.delta(); });
        ld.connection = delta ? Connection::Delta : Connection::Wye;

        const double kw = obj.number("kw", 10.0);
        double kvar = 0.0;
        if (obj.has("kvar")) {
            kvar = obj.number("kvar", 0.0);
        } else {
            const double pf = obj.number("pf", 0.88);
            if (pf == 0.0 || std::abs(pf) > 1.0) throw ModelError(who + ": pf must be in (0, 1]");
            kvar = kw * std::tan(std::acos(std::abs(pf))) * (pf < 0 ? -1.0 : 1.0);
        }
        const double nel = static_cast<double>(ld.elements.size());
        ld.s_nom.assign(ld.elements.size(), Complex(kw, kvar) * 1000.0 / nel / net_.sbase);

        const double vb = vbase(bus, who);
        const double kv = obj.number("kv", 12.47);
        const double v_elem = (phases == 1 || delta) ? kv * 1000.0 : kv * 1000.0 / kSqrt3;
        ld.v_nom = v_elem / vb;
        if (ld.v_nom <= 0.0) throw ModelError(who + ": kv must be positive");

        const int model = static_cast<int>(obj.number("model", 1));
        switch (model) {
            case 1: ld.zip = {0.0, 0.0, 1.0}; break;
            case 2: ld.zip = {1.0, 0.0, 0.0}; break;
            case 5: ld.zip = {0.0, 1.0, 0.0}; break;
            case 8: {
                auto z = obj.numbers("zipv");
                if (z.size() < 3) throw ModelError(who + ": model=8 needs zipv");
                if (z[0] < 0 || z[1] < 0 || z[2] < 0 || std::abs(z[0] + z[1] + z[2] - 1.0) > 1e-6) {
                    throw ModelError(who + ": ZIP coefficients must be nonnegative and sum to 1");
                }
                ld.zip = {z[0], z[1], z[2]};
                break;
            }
            default:
                net_.warnings.push_back(who + ": load model " + std::to_string(model) +
                                        " is not supported; using constant power");
                ld.zip = {0.0, 0.0, 1.0};
        }
        bounds(touch(bus, element_phases(ld.elements)), obj);
        net_.loads.push_back(std::move(ld));
    }

    void generator(const std::string& cls, const DssObject& obj) {
        if (!enabled(obj)) return;
        const std::string who = cls + "." + obj.name;
        const auto spec = obj.bus("bus1").value_or(dss::BusSpec{});
        if (spec.name.empty()) throw ModelError(who + ": bus1 is required");
        const std::string bus = lower(spec.name);
        const int phases = static_cast<int>(obj.number("phases", 3));

        Generator g;
        g.id = who;
        g.bus = bus;
        g.elements = elements_for(spec, phases, parse_connection(obj.text("conn"), who), who);
        const bool delta = std::any_of(g.elements.begin(), g.elements.end(), [](auto& e) { return e.delta(); });
        g.connection = delta ? Connection::Delta : Connection::Wye;
        const double per = 1000.0 / static_cast<double>(g.elements.size()) / net_.sbase;
        const std::size_t n = g.elements.size();

        std::array<double, 3> c{};
        double p_set = 0, q_set = 0, p_min = 0, p_max = 0, q_lim = 0;
        if (cls == "pvsystem") {
            g.kind = GeneratorKind::PvSystem;
            p_max = obj.number("pmpp", 500.0) * obj.number("irradiance", 1.0);
            p_set = p_max;
            q_set = obj.number("kvar", 0.0);
            const double kva = obj.number("kva", 500.0);
            q_lim = obj.has("kvarmax") ? obj.number("kvarmax", 0.0) : std::sqrt(std::max(0.0, kva * kva - p_max * p_max));
            c = cost(obj, {0.0, 0.0, 0.0}, who);
        } else {
            g.kind = GeneratorKind::Generator;
            const double kw = obj.number("kw", 1000.0);
            p_set = kw;
            if (obj.has("kvar")) {
                q_set = obj.number("kvar", 0.0);
            } else {
                const double pf = obj.number("pf", 0.8);
                q_set = kw * std::tan(std::acos(std::clamp(std::abs(pf), 1e-9, 1.0)));
            }
            p_max = obj.number("maxkw", kw);
            p_min = obj.number("minkw", 0.0);
            q_lim = obj.number("maxkvar", obj.number("kva", kw));
            c = cost(obj, {0.0, 1.0, 0.0}, who);
        }
        g.p_set.assign(n, p_set * per);
        g.q_set.assign(n, q_set * per);
        g.p_min.assign(n, p_min * per);
        g.p_max.assign(n, p_max * per);
        g.q_max.assign(n, q_lim * per);
        g.q_min.assign(n, obj.has("minkvar") ? obj.number("minkvar", 0.0) * per : -q_lim * per);
        g.c2 = c[0];
        g.c1 = c[1];
        g.c0 = c[2];
        vbase(bus, who);
        bounds(touch(bus, element_phases(g.elements)), obj);
        net_.generators.push_back(std::move(g));
    }

    void storage(const DssObject& obj) {
        if (!enabled(obj)) return;
        const std::string who = "storage." + obj.name;
        const auto spec = obj.bus("bus1").value_or(dss::BusSpec{});
        if (spec.name.empty()) throw ModelError(who + ": bus1 is required");
        const int phases = static_cast<int>(obj.number("phases", 3));
        Storage s;
        s.id = who;
        s.bus = lower(spec.name);
        for (const auto& e : elements_for(spec, phases, Connection::Wye, who)) {
            if (e.delta()) throw UnsupportedError(who + ": storage must be wye-connected");
            s.conn.push_back(e.p);
        }
        const double scale = 1000.0 / net_.sbase;
        const double kwh = obj.number("kwhrated", 50.0);
        const double kw = obj.number("kwrated", 25.0);
        s.energy_max = kwh * scale;
        s.energy_init = obj.has("kwhstored") ? obj.number("kwhstored", kwh) * scale
                                             : obj.number("%stored", 100.0) / 100.0 * s.energy_max;
        s.p_charge_max = kw * obj.number("%charge", 100.0) / 100.0 * scale;
        s.p_discharge_max = kw * obj.number("%discharge", 100.0) / 100.0 * scale;
        s.eff_charge = obj.number("%effcharge", 90.0) / 100.0;
        s.eff_discharge = obj.number("%effdischarge", 90.0) / 100.0;
        s.thermal_rating = obj.number("kva", kw) * scale;
        vbase(s.bus, who);
        touch(s.bus, s.conn);
        net_.storages.push_back(std::move(s));
    }

    void shunt(const std::string& cls, const DssObject& obj) {
        if (!enabled(obj)) return;
        const std::string who = cls + "." + obj.name;
        const auto spec = obj.bus("bus1").value_or(dss::BusSpec{});
        if (spec.name.empty()) throw ModelError(who + ": bus1 is required");
        const std::string bus = lower(spec.name);
        if (auto b2 = obj.bus("bus2"); b2 && lower(b2->name) != bus) {
            throw UnsupportedError(who + ": series " + cls + " is not supported");
        }
        const int phases = static_cast<int>(obj.number("phases", 3));
        const Connection conn = parse_connection(obj.text("conn"), who);
        auto elements = elements_for(spec, phases, conn, who);
        const bool delta = std::any_of(elements.begin(), elements.end(), [](auto& e) { return e.delta(); });

        double kvar = 0.0;
        for (double k : obj.numbers("kvar")) kvar += k;
        if (!obj.has("kvar")) kvar = 1200.0;
        const double vb = vbase(bus, who);
        const double kv = obj.number("kv", 12.47);
        const double v_elem = (phases == 1 || delta) ? kv * 1000.0 : kv * 1000.0 / kSqrt3;
        const double vnom = v_elem / vb;
        const double q = kvar * 1000.0 / static_cast<double>(elements.size()) / net_.sbase;
        const Complex y(0.0, (cls == "capacitor" ? 1.0 : -1.0) * q / (vnom * vnom));

        Shunt sh;
        sh.id = who;
        sh.bus = bus;
        sh.conn = element_phases(elements);
        const auto n = static_cast<Eigen::Index>(sh.conn.size());
        sh.y = CMatrix::Zero(n, n);
        auto pos = [&](int p) {
            return static_cast<Eigen::Index>(std::find(sh.conn.begin(), sh.conn.end(), p) - sh.conn.begin());
        };
        for (const auto& e : elements) {
            const auto i = pos(e.p);
            sh.y(i, i) += y;
            if (e.delta()) {
                const auto j = pos(e.q);
                sh.y(j, j) += y;
                sh.y(i, j) -= y;
                sh.y(j, i) -= y;
            }
        }
        touch(bus, sh.conn);
        net_.shunts.push_back(std::move(sh));
    }

    void finish_buses() {
        for (const auto& id : bus_order_) {
            const BusEntry& e = entries_.at(id);
            Bus b;
            b.id = id;
            b.phases.assign(e.phases.begin(), e.phases.end());
            b.vbase = vbase(id, "bus " + id);
            const std::size_t n = b.phases.size();
            b.vmin.assign(n, e.has_vmin ? e.vmin : opt_.vmin);
            b.vmax.assign(n, e.has_vmax ? e.vmax : opt_.vmax);
            if (id == source_bus_) {
                b.type = BusType::Slack;
                for (int p : b.phases) {
                    b.v_set.push_back(std::polar(source_pu_, source_angle_ - 2.0 * kPi * p / 3.0));
                }
            }
            net_.buses.push_back(std::move(b));
        }
        for (auto& b : internal_) net_.buses.push_back(std::move(b));
        net_.index();

        mark_floating(net_);
        if (opt_.anti_floating_shunt > 0.0) {
            for (const auto& b : net_.buses) {
                if (!b.floating) continue;
                Shunt sh;
                sh.id = "antifloat." + b.id;
                sh.bus = b.id;
                sh.conn = b.phases;
                const auto n = static_cast<Eigen::Index>(b.phases.size());
                sh.y = CMatrix::Identity(n, n) * opt_.anti_floating_shunt;
                sh.anti_floating = true;
                net_.shunts.push_back(std::move(sh));
            }
        }
    }

    const dss::DssDataModel& m_;
    FromDssOptions opt_;
    Network net_;
    std::string source_bus_;
    double source_vbase_ = 0.0, source_pu_ = 1.0, source_angle_ = 0.0;
    std::map<std::string, double> vbase_;
    std::map<std::string, BusEntry> entries_;
    std::vector<std::string> bus_order_;
    std::vector<Bus> internal_;
};

}  // namespace

Network from_dss(const dss::DssDataModel& model, const FromDssOptions& options) {
    return Converter(model, options).run();
}

}  // namespace mcdist::network
