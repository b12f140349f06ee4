#include "mcdist/dss/serialize.hpp"

#include <json.hpp>

namespace mcdist::dss {

namespace {

void write_properties(std::string& out, const DssObject& obj) {
    for (const auto& [key, value] : obj.properties) out += " " + key + "=" + format_value(value);
}

nlohmann::json value_json(const DssValue& value) {
    struct Visitor {
        nlohmann::json operator()(double v) const { return v; }
        nlohmann::json operator()(const std::string& s) const { return s; }
        nlohmann::json operator()(const NumberArray& a) const { return a; }
        nlohmann::json operator()(const TextArray& a) const { return a; }
        nlohmann::json operator()(const SymMatrix& m) const {
            auto rows = nlohmann::json::array();
            for (std::size_t i = 0; i < m.size(); ++i) {
                auto row = nlohmann::json::array();
                for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
                rows.push_back(std::move(row));
            }
            return rows;
        }
        nlohmann::json operator()(const BusSpec& b) const { return b.str(); }
    };
    return std::visit(Visitor{}, value);
}

}  // namespace

std::string to_dss(const DssDataModel& model) {
    std::string out;
    const auto circuit = model.options.find("circuit");
    for (const auto& [cls, key] : model.source_order) {
        const DssObject* obj = model.find(cls, key);
        if (!obj) continue;
        if (cls == "vsource" && key == "source" && circuit != model.options.end()) {
            out += "New Circuit." + std::get<std::string>(circuit->second);
        } else {
            out += "New " + cls + "." + obj->name;
        }
        write_properties(out, *obj);
        out += "\n";
    }
    for (const auto& [key, value] : model.options) {
        if (key == "circuit") continue;
        out += "Set " + key + "=" + format_value(value) + "\n";
    }
    return out;
}

std::string to_json(const DssDataModel& model) {
    nlohmann::json doc;
    doc["schema"] = "mcdist.dss/1";
    doc["options"] = nlohmann::json::object();
    for (const auto& [key, value] : model.options) doc["options"][key] = value_json(value);
    doc["objects"] = nlohmann::json::object();
    for (const auto& [cls, bucket] : model.objects) {
        auto& jc = doc["objects"][cls];
        jc = nlohmann::json::object();
        for (const auto& [key, obj] : bucket) {
            nlohmann::json jo;
            jo["name"] = obj.name;
            jo["properties"] = nlohmann::json::object();
            for (const auto& [pk, pv] : obj.properties) jo["properties"][pk] = value_json(pv);
            jc[key] = std::move(jo);
        }
    }
    doc["source_order"] = nlohmann::json::array();
    for (const auto& [cls, key] : model.source_order) doc["source_order"].push_back({cls, key});
    return doc.dump(2) + "\n";
}

}  // namespace mcdist::dss
