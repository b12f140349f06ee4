#include "mcdist/network/json.hpp"

#include <cmath>
#include <json.hpp>

#include "mcdist/common/errors.hpp"
#include "mcdist/network/from_dss.hpp"

namespace mcdist::network {

namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
    if (std::isinf(v)) return nullptr;
    return v;
}

ordered_json numbers(const std::vector<double>& v) {
    ordered_json out = ordered_json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

ordered_json complex(Complex c) { return ordered_json::array({c.real(), c.imag()}); }

ordered_json matrix(const CMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json phases(const std::vector<int>& ph) {
    ordered_json out = ordered_json::array();
    for (int p : ph) out.push_back(std::string(1, phase_letter(p)));
    return out;
}

ordered_json elements(const std::vector<Element>& els) {
    ordered_json out = ordered_json::array();
    for (const auto& e : els) {
        std::string s(1, phase_letter(e.p));
        s += e.delta() ? std::string(1, phase_letter(e.q)) : std::string("n");
        out.push_back(s);
    }
    return out;
}

const char* conn_name(Connection c) { return c == Connection::Wye ? "wye" : "delta"; }

}  // namespace

std::string to_json(const Network& net) {
    ordered_json doc;
    doc["schema"] = "mcdist.network/1";
    doc["sbase"] = net.sbase;
    doc["base_frequency"] = net.base_frequency;

    auto& buses = doc["buses"] = ordered_json::array();
    for (const auto& b : net.buses) {
        ordered_json j;
        j["id"] = b.id;
        j["phases"] = phases(b.phases);
        j["vmin"] = numbers(b.vmin);
        j["vmax"] = numbers(b.vmax);
        j["bus_type"] = b.type == BusType::Slack ? "slack" : "pq";
        j["vbase"] = b.vbase;
        j["internal"] = b.internal;
        j["floating"] = b.floating;
        if (b.type == BusType::Slack) {
            j["v_set"] = ordered_json::array();
            for (auto v : b.v_set) j["v_set"].push_back(complex(v));
        }
        buses.push_back(std::move(j));
    }
    auto& branches = doc["branches"] = ordered_json::array();
    for (const auto& br : net.branches) {
        ordered_json j;
        j["id"] = br.id;
        j["f_bus"] = br.f_bus;
        j["t_bus"] = br.t_bus;
        j["f_conn"] = phases(br.f_conn);
        j["t_conn"] = phases(br.t_conn);
        j["z"] = matrix(br.z);
        j["y_fr"] = matrix(br.y_fr);
        j["y_to"] = matrix(br.y_to);
        j["rating_current"] = numbers(br.rating_current);
        j["rating_power"] = numbers(br.rating_power);
        j["status"] = br.status;
        j["switch"] = br.is_switch;
        j["internal"] = br.internal;
        if (br.angle_bounds) j["angle_bounds"] = {br.angle_bounds->first, br.angle_bounds->second};
        branches.push_back(std::move(j));
    }
    auto& transformers = doc["transformers"] = ordered_json::array();
    for (const auto& tr : net.transformers) {
        ordered_json j;
        j["id"] = tr.id;
        j["f_bus"] = tr.f_bus;
        j["t_bus"] = tr.t_bus;
        j["f_conn"] = phases(tr.f_conn);
        j["t_conn"] = phases(tr.t_conn);
        j["t"] = matrix(tr.t);
        j["tap"] = tr.tap;
        j["configuration"] = {conn_name(tr.f_config), conn_name(tr.t_config)};
        j["ratio"] = tr.ratio;
        j["status"] = tr.status;
        transformers.push_back(std::move(j));
    }
    auto& shunts = doc["shunts"] = ordered_json::array();
    for (const auto& sh : net.shunts) {
        shunts.push_back({{"id", sh.id}, {"bus", sh.bus}, {"conn", phases(sh.conn)}, {"y", matrix(sh.y)},
                          {"anti_floating", sh.anti_floating}});
    }
    auto& loads = doc["loads"] = ordered_json::array();
    for (const auto& ld : net.loads) {
        ordered_json s = ordered_json::array();
        for (auto v : ld.s_nom) s.push_back(complex(v));
        loads.push_back({{"id", ld.id}, {"bus", ld.bus}, {"connection", conn_name(ld.connection)},
                         {"elements", elements(ld.elements)}, {"s_nom", s}, {"v_nom", ld.v_nom},
                         {"zip", {ld.zip.a_z, ld.zip.a_i, ld.zip.a_p}}});
    }
    auto& gens = doc["generators"] = ordered_json::array();
    for (const auto& g : net.generators) {
        const char* kind = g.kind == GeneratorKind::Source ? "source" : g.kind == GeneratorKind::PvSystem ? "pvsystem" : "generator";
        gens.push_back({{"id", g.id}, {"bus", g.bus}, {"kind", kind}, {"connection", conn_name(g.connection)},
                        {"elements", elements(g.elements)}, {"p_min", numbers(g.p_min)}, {"p_max", numbers(g.p_max)},
                        {"q_min", numbers(g.q_min)}, {"q_max", numbers(g.q_max)}, {"p_set", numbers(g.p_set)},
                        {"q_set", numbers(g.q_set)}, {"cost", {g.c2, g.c1, g.c0}}});
    }
    auto& storages = doc["storages"] = ordered_json::array();
    for (const auto& s : net.storages) {
        storages.push_back({{"id", s.id}, {"bus", s.bus}, {"conn", phases(s.conn)}, {"energy_max", s.energy_max},
                            {"energy_init", s.energy_init}, {"p_charge_max", s.p_charge_max},
                            {"p_discharge_max", s.p_discharge_max}, {"eff_charge", s.eff_charge},
                            {"eff_discharge", s.eff_discharge}, {"thermal_rating", s.thermal_rating}});
    }
    if (net.periods) {
        ordered_json p;
        p["delta_t_hours"] = net.periods->delta_t_hours;
        p["periods"] = ordered_json::array();
        for (const auto& per : net.periods->periods) {
            p["periods"].push_back(
                {{"load_scale", per.load_scale}, {"gen_scale", per.gen_scale}, {"cost_scale", per.cost_scale}});
        }
        doc["periods"] = std::move(p);
    }
    return doc.dump(2) + "\n";
}

PeriodSeries periods_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(std::string("periods file: ") + e.what());
    }
    PeriodSeries out;
    try {
        out.delta_t_hours = doc.value("delta_t_hours", 1.0);
        if (!(out.delta_t_hours > 0.0)) throw ModelError("periods file: delta_t_hours must be positive");
        if (!doc.contains("periods") || !doc["periods"].is_array() || doc["periods"].empty()) {
            throw ModelError("periods file: 'periods' must be a nonempty array");
        }
        for (const auto& p : doc["periods"]) {
            Period per;
            per.load_scale = p.value("load_scale", 1.0);
            per.gen_scale = p.value("gen_scale", 1.0);
            per.cost_scale = p.value("cost_scale", 1.0);
            out.periods.push_back(per);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("periods file: ") + e.what());
    }
    return out;
}

}  // namespace mcdist::network
