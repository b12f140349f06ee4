#include "mcdist/dss/classes.hpp"

#include <array>
#include <map>

#include "mcdist/common/errors.hpp"

namespace mcdist::dss {

namespace {

using K = ValueKind;

std::vector<PropertyDef> with_general(std::vector<PropertyDef> props) {
    props.push_back({"like", K::Text});
    props.push_back({"enabled", K::Text});
    return props;
}

const std::map<std::string_view, ClassDef>& class_table() {
    static const std::map<std::string_view, ClassDef> table = [] {
        std::map<std::string_view, ClassDef> t;
        t["vsource"] = {"vsource", with_general({
            {"bus1", K::Bus}, {"basekv", K::Number}, {"pu", K::Number}, {"angle", K::Number},
            {"frequency", K::Number}, {"phases", K::Number}, {"mvasc3", K::Number}, {"mvasc1", K::Number},
            {"x1r1", K::Number}, {"x0r0", K::Number}, {"isc3", K::Number}, {"isc1", K::Number},
            {"r1", K::Number}, {"x1", K::Number}, {"r0", K::Number}, {"x0", K::Number},
            {"scantype", K::Text}, {"sequence", K::Text}, {"bus2", K::Bus}, {"z1", K::NumberArray},
            {"z0", K::NumberArray}, {"z2", K::NumberArray}, {"puz1", K::NumberArray}, {"puz0", K::NumberArray},
            {"puz2", K::NumberArray}, {"basemva", K::Number}, {"basefreq", K::Number}, {"cost", K::NumberArray},
        })};
        t["linecode"] = {"linecode", with_general({
            {"nphases", K::Number}, {"r1", K::Number}, {"x1", K::Number}, {"r0", K::Number},
            {"x0", K::Number}, {"c1", K::Number}, {"c0", K::Number}, {"units", K::Text},
            {"rmatrix", K::Matrix}, {"xmatrix", K::Matrix}, {"cmatrix", K::Matrix}, {"basefreq", K::Number},
            {"normamps", K::Number}, {"emergamps", K::Number}, {"faultrate", K::Number}, {"pctperm", K::Number},
            {"repair", K::Number}, {"kron", K::Text}, {"rg", K::Number}, {"xg", K::Number},
            {"rho", K::Number}, {"neutral", K::Number}, {"b1", K::Number}, {"b0", K::Number},
        })};
        t["line"] = {"line", with_general({
            {"bus1", K::Bus}, {"bus2", K::Bus}, {"linecode", K::Text}, {"length", K::Number},
            {"phases", K::Number}, {"r1", K::Number}, {"x1", K::Number}, {"r0", K::Number},
            {"x0", K::Number}, {"c1", K::Number}, {"c0", K::Number}, {"rmatrix", K::Matrix},
            {"xmatrix", K::Matrix}, {"cmatrix", K::Matrix}, {"switch", K::Text}, {"rg", K::Number},
            {"xg", K::Number}, {"rho", K::Number}, {"geometry", K::Text}, {"units", K::Text},
            {"spacing", K::Text}, {"wires", K::TextArray}, {"earthmodel", K::Text}, {"cncables", K::TextArray},
            {"tscables", K::TextArray}, {"b1", K::Number}, {"b0", K::Number}, {"seasons", K::Number},
            {"ratings", K::NumberArray}, {"linetype", K::Text}, {"normamps", K::Number}, {"emergamps", K::Number},
            {"vad_min", K::Number}, {"vad_max", K::Number},
        })};
        t["load"] = {"load", with_general({
            {"phases", K::Number}, {"bus1", K::Bus}, {"kv", K::Number}, {"kw", K::Number},
            {"pf", K::Number}, {"model", K::Number}, {"yearly", K::Text}, {"daily", K::Text},
            {"duty", K::Text}, {"growth", K::Text}, {"conn", K::Text}, {"kvar", K::Number},
            {"rneut", K::Number}, {"xneut", K::Number}, {"status", K::Text}, {"class", K::Number},
            {"vminpu", K::Number}, {"vmaxpu", K::Number}, {"vminnorm", K::Number}, {"vminemerg", K::Number},
            {"xfkva", K::Number}, {"allocationfactor", K::Number}, {"kva", K::Number}, {"%mean", K::Number},
            {"%stddev", K::Number}, {"cvrwatts", K::Number}, {"cvrvars", K::Number}, {"kwh", K::Number},
            {"kwhdays", K::Number}, {"cfactor", K::Number}, {"cvrcurve", K::Text}, {"numcust", K::Number},
            {"zipv", K::NumberArray}, {"%seriesrl", K::Number}, {"relweight", K::Number}, {"vlowpu", K::Number},
        })};
        t["capacitor"] = {"capacitor", with_general({
            {"bus1", K::Bus}, {"bus2", K::Bus}, {"phases", K::Number}, {"kvar", K::NumberArray},
            {"kv", K::Number}, {"conn", K::Text}, {"cmatrix", K::Matrix}, {"cuf", K::NumberArray},
            {"r", K::NumberArray}, {"xl", K::NumberArray}, {"harm", K::NumberArray}, {"numsteps", K::Number},
            {"states", K::NumberArray}, {"vminpu", K::Number}, {"vmaxpu", K::Number},
        })};
        t["reactor"] = {"reactor", with_general({
            {"bus1", K::Bus}, {"bus2", K::Bus}, {"phases", K::Number}, {"kvar", K::Number},
            {"kv", K::Number}, {"conn", K::Text}, {"rmatrix", K::Matrix}, {"xmatrix", K::Matrix},
            {"parallel", K::Text}, {"r", K::Number}, {"x", K::Number}, {"rp", K::Number},
        })};
        t["transformer"] = {"transformer", with_general({
            {"phases", K::Number}, {"windings", K::Number}, {"wdg", K::Number}, {"bus", K::Bus},
            {"conn", K::Text}, {"kv", K::Number}, {"kva", K::Number}, {"tap", K::Number},
            {"%r", K::Number}, {"rneut", K::Number}, {"xneut", K::Number}, {"buses", K::TextArray},
            {"conns", K::TextArray}, {"kvs", K::NumberArray}, {"kvas", K::NumberArray}, {"taps", K::NumberArray},
            {"xhl", K::Number}, {"xht", K::Number}, {"xlt", K::Number}, {"xscarray", K::NumberArray},
            {"thermal", K::Number}, {"n", K::Number}, {"m", K::Number}, {"flrise", K::Number},
            {"hsrise", K::Number}, {"%loadloss", K::Number}, {"%noloadloss", K::Number}, {"normhkva", K::Number},
            {"emerghkva", K::Number}, {"sub", K::Text}, {"maxtap", K::Number}, {"mintap", K::Number},
            {"numtaps", K::Number}, {"subname", K::Text}, {"%imag", K::Number}, {"ppm_antifloat", K::Number},
            {"%rs", K::NumberArray}, {"bank", K::Text}, {"xfmrcode", K::Text}, {"xrconst", K::Text},
            {"x12", K::Number}, {"x13", K::Number}, {"x23", K::Number}, {"leadlag", K::Text},
        })};
        t["generator"] = {"generator", with_general({
            {"phases", K::Number}, {"bus1", K::Bus}, {"kv", K::Number}, {"kw", K::Number},
            {"pf", K::Number}, {"kvar", K::Number}, {"model", K::Number}, {"vminpu", K::Number},
            {"vmaxpu", K::Number}, {"yearly", K::Text}, {"daily", K::Text}, {"duty", K::Text},
            {"dispmode", K::Text}, {"dispvalue", K::Number}, {"conn", K::Text}, {"status", K::Text},
            {"class", K::Number}, {"vpu", K::Number}, {"maxkvar", K::Number}, {"minkvar", K::Number},
            {"pvfactor", K::Number}, {"forceon", K::Text}, {"kva", K::Number}, {"mva", K::Number},
            {"cost", K::NumberArray}, {"minkw", K::Number}, {"maxkw", K::Number},
        })};
        t["pvsystem"] = {"pvsystem", with_general({
            {"phases", K::Number}, {"bus1", K::Bus}, {"kv", K::Number}, {"irradiance", K::Number},
            {"pmpp", K::Number}, {"%pmpp", K::Number}, {"temperature", K::Number}, {"pf", K::Number},
            {"conn", K::Text}, {"kvar", K::Number}, {"kva", K::Number}, {"%cutin", K::Number},
            {"%cutout", K::Number}, {"effcurve", K::Text}, {"p-tcurve", K::Text}, {"%r", K::Number},
            {"%x", K::Number}, {"model", K::Number}, {"vminpu", K::Number}, {"vmaxpu", K::Number},
            {"balanced", K::Text}, {"limitcurrent", K::Text}, {"yearly", K::Text}, {"daily", K::Text},
            {"duty", K::Text}, {"kvarmax", K::Number}, {"kvarmaxabs", K::Number}, {"cost", K::NumberArray},
        })};
        t["storage"] = {"storage", with_general({
            {"phases", K::Number}, {"bus1", K::Bus}, {"kv", K::Number}, {"conn", K::Text},
            {"kw", K::Number}, {"kvar", K::Number}, {"pf", K::Number}, {"kva", K::Number},
            {"%cutin", K::Number}, {"%cutout", K::Number}, {"effcurve", K::Text}, {"varfollowinverter", K::Text},
            {"kvarmax", K::Number}, {"kvarmaxabs", K::Number}, {"wattpriority", K::Text}, {"pfpriority", K::Text},
            {"%pminnovars", K::Number}, {"%pminkvarmax", K::Number}, {"kwrated", K::Number}, {"%kwrated", K::Number},
            {"kwhrated", K::Number}, {"kwhstored", K::Number}, {"%stored", K::Number}, {"%reserve", K::Number},
            {"state", K::Text}, {"%discharge", K::Number}, {"%charge", K::Number}, {"%effcharge", K::Number},
            {"%effdischarge", K::Number}, {"%idlingkw", K::Number}, {"%r", K::Number}, {"%x", K::Number},
            {"model", K::Number}, {"vminpu", K::Number}, {"vmaxpu", K::Number},
        })};
        return t;
    }();
    return table;
}

constexpr std::array<std::string_view, 11> kSupported = {
    "circuit", "vsource", "linecode", "line", "load", "capacitor",
    "reactor", "transformer", "generator", "pvsystem", "storage",
};

struct WindingPair {
    std::string_view scalar;
    std::string_view array;
};
constexpr std::array<WindingPair, 6> kWinding = {{
    {"bus", "buses"}, {"conn", "conns"}, {"kv", "kvs"}, {"kva", "kvas"}, {"tap", "taps"}, {"%r", "%rs"},
}};

}  // namespace

int ClassDef::index_of(std::string_view key) const {
    for (std::size_t i = 0; i < properties.size(); ++i) {
        if (properties[i].name == key) return static_cast<int>(i);
    }
    return -1;
}

const PropertyDef* ClassDef::find(std::string_view key) const {
    int i = index_of(key);
    return i < 0 ? nullptr : &properties[static_cast<std::size_t>(i)];
}

const ClassDef* find_class(std::string_view object_class) {
    if (object_class == "circuit") object_class = "vsource";
    const auto& table = class_table();
    auto it = table.find(object_class);
    return it == table.end() ? nullptr : &it->second;
}

std::span<const std::string_view> supported_classes() {
    return kSupported;
}

ResolvedKey resolve_property(const ClassDef& cls, std::string_view key) {
    if (cls.find(key)) return {std::string(key), true};
    const PropertyDef* match = nullptr;
    for (const auto& p : cls.properties) {
        if (p.name.substr(0, key.size()) != key) continue;
        if (match) {
            throw ParseError("ambiguous property '" + std::string(key) + "' for class " + std::string(cls.name) +
                             " (matches '" + std::string(match->name) + "' and '" + std::string(p.name) + "')");
        }
        match = &p;
    }
    if (match) return {std::string(match->name), true};
    return {std::string(key), false};
}

bool is_winding_property(std::string_view key) {
    for (const auto& w : kWinding) {
        if (w.scalar == key) return true;
    }
    return false;
}

std::string_view winding_array_name(std::string_view key) {
    for (const auto& w : kWinding) {
        if (w.scalar == key) return w.array;
    }
    return {};
}

std::string_view winding_scalar_name(std::string_view array_key) {
    for (const auto& w : kWinding) {
        if (w.array == array_key) return w.scalar;
    }
    return {};
}

}  // namespace mcdist::dss
