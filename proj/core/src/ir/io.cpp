#include "mcdist/ir/io.hpp"

#include <cmath>
#include <json.hpp>

#include "mcdist/common/errors.hpp"

namespace mcdist::ir {

namespace {

using nlohmann::ordered_json;

ordered_json bound(double v) {
    if (std::isinf(v)) return nullptr;
    return v;
}

const char* sense_text(Sense s) {
    switch (s) {
        case Sense::Eq: return "==";
        case Sense::Le: return "<=";
        case Sense::Ge: return ">=";
    }
    return "==";
}

ordered_json terms_json(const LinearExpr& e) {
    ordered_json t = ordered_json::array();
    for (const auto& term : e.terms) t.push_back({term.var, term.coef});
    return t;
}

ordered_json expr_json(const LinearExpr& e) {
    ordered_json j;
    j["terms"] = terms_json(e);
    j["constant"] = e.constant;
    return j;
}

ordered_json quad_json(const QuadExpr& e) {
    ordered_json j;
    j["terms"] = terms_json(e.linear);
    j["quad_terms"] = ordered_json::array();
    for (const auto& q : e.quad) j["quad_terms"].push_back({q.a, q.b, q.coef});
    j["constant"] = e.linear.constant;
    return j;
}

[[noreturn]] void schema_error(const std::string& what) { throw ModelError("model schema violation: " + what); }

Sense parse_sense(const nlohmann::json& j) {
    const std::string s = j.get<std::string>();
    if (s == "==") return Sense::Eq;
    if (s == "<=") return Sense::Le;
    if (s == ">=") return Sense::Ge;
    schema_error("unknown sense '" + s + "'");
}

double parse_bound(const nlohmann::json& j, double inf) {
    if (j.is_null()) return inf;
    return j.get<double>();
}

LinearExpr parse_terms(const nlohmann::json& terms, double constant, std::size_t n) {
    LinearExpr e;
    e.constant = constant;
    for (const auto& t : terms) {
        if (!t.is_array() || t.size() != 2) schema_error("linear term must be [index, coef]");
        const int var = t[0].get<int>();
        if (var < 0 || static_cast<std::size_t>(var) >= n) schema_error("variable index out of range");
        e.terms.push_back({var, t[1].get<double>()});
    }
    return e;
}

LinearExpr parse_expr(const nlohmann::json& j, std::size_t n) {
    return parse_terms(j.at("terms"), j.value("constant", 0.0), n);
}

QuadExpr parse_quad(const nlohmann::json& j, std::size_t n) {
    QuadExpr e(parse_terms(j.at("terms"), j.value("constant", 0.0), n));
    for (const auto& q : j.value("quad_terms", nlohmann::json::array())) {
        if (!q.is_array() || q.size() != 3) schema_error("quadratic term must be [i, j, coef]");
        const int a = q[0].get<int>(), b = q[1].get<int>();
        if (a < 0 || b < 0 || static_cast<std::size_t>(std::max(a, b)) >= n) schema_error("variable index out of range");
        e.quad.push_back({a, b, q[2].get<double>()});
    }
    return e;
}

}  // namespace

std::string export_model(const MathModel& model) {
    ordered_json doc;
    doc["schema"] = kModelSchema;
    doc["formulation"] = model.formulation;
    doc["metadata"] = ordered_json::object();
    for (const auto& [k, v] : model.metadata) doc["metadata"][k] = v;
    auto& vars = doc["variables"] = ordered_json::array();
    for (const auto& v : model.variables) vars.push_back({{"name", v.name}, {"lb", bound(v.lb)}, {"ub", bound(v.ub)}});
    auto& cons = doc["constraints"] = ordered_json::array();
    for (const auto& c : model.constraints) {
        ordered_json j;
        j["label"] = c.label;
        std::visit(
            [&](const auto& b) {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, LinearConstraint>) {
                    j["kind"] = "linear";
                    j["terms"] = terms_json(b.expr);
                    j["constant"] = b.expr.constant;
                    j["sense"] = sense_text(b.sense);
                    j["rhs"] = b.rhs;
                } else if constexpr (std::is_same_v<T, QuadraticConstraint>) {
                    j["kind"] = "quadratic";
                    auto q = quad_json(b.expr);
                    j["terms"] = q["terms"];
                    j["quad_terms"] = q["quad_terms"];
                    j["constant"] = q["constant"];
                    j["sense"] = sense_text(b.sense);
                    j["rhs"] = b.rhs;
                } else if constexpr (std::is_same_v<T, SocConstraint>) {
                    j["kind"] = "soc";
                    j["args"] = ordered_json::array();
                    for (const auto& a : b.args) j["args"].push_back(expr_json(a));
                    j["bound"] = expr_json(b.bound);
                } else {
                    j["kind"] = "rotated_soc";
                    j["x1"] = expr_json(b.x1);
                    j["x2"] = expr_json(b.x2);
                    j["args"] = ordered_json::array();
                    for (const auto& a : b.args) j["args"].push_back(expr_json(a));
                }
            },
            c.body);
        cons.push_back(std::move(j));
    }
    ordered_json obj;
    obj["sense"] = "min";
    auto q = quad_json(model.objective);
    obj["terms"] = q["terms"];
    obj["quad_terms"] = q["quad_terms"];
    obj["constant"] = q["constant"];
    doc["objective"] = std::move(obj);
    return doc.dump(1) + "\n";
}

MathModel import_model(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        schema_error(e.what());
    }
    try {
        if (!doc.is_object() || doc.value("schema", "") != kModelSchema) {
            schema_error("unknown or missing schema version (expected " + std::string(kModelSchema) + ")");
        }
        MathModel m;
        m.formulation = doc.value("formulation", "");
        for (const auto& [k, v] : doc.value("metadata", nlohmann::json::object()).items()) {
            m.metadata[k] = v.get<std::string>();
        }
        for (const auto& v : doc.at("variables")) {
            m.add_variable(v.at("name").get<std::string>(), parse_bound(v.at("lb"), -kInf), parse_bound(v.at("ub"), kInf));
        }
        const std::size_t n = m.variables.size();
        for (const auto& c : doc.at("constraints")) {
            const std::string label = c.at("label").get<std::string>();
            const std::string kind = c.at("kind").get<std::string>();
            if (kind == "linear") {
                m.constraints.push_back({label, LinearConstraint{parse_expr(c, n), parse_sense(c.at("sense")),
                                                                 c.at("rhs").get<double>()}});
            } else if (kind == "quadratic") {
                m.constraints.push_back({label, QuadraticConstraint{parse_quad(c, n), parse_sense(c.at("sense")),
                                                                    c.at("rhs").get<double>()}});
            } else if (kind == "soc") {
                SocConstraint s;
                for (const auto& a : c.at("args")) s.args.push_back(parse_expr(a, n));
                s.bound = parse_expr(c.at("bound"), n);
                m.constraints.push_back({label, std::move(s)});
            } else if (kind == "rotated_soc") {
                RotatedSocConstraint r;
                r.x1 = parse_expr(c.at("x1"), n);
                r.x2 = parse_expr(c.at("x2"), n);
                for (const auto& a : c.at("args")) r.args.push_back(parse_expr(a, n));
                m.constraints.push_back({label, std::move(r)});
            } else {
                schema_error("unknown constraint kind '" + kind + "'");
            }
        }
        const auto& obj = doc.at("objective");
        if (obj.value("sense", "min") != "min") schema_error("only minimization objectives are supported");
        m.objective = parse_quad(obj, n);
        return m;
    } catch (const nlohmann::json::exception& e) {
        schema_error(e.what());
    }
}

std::string export_solution(const Assignment& a) {
    ordered_json doc;
    doc["schema"] = kSolutionSchema;
    doc["values"] = ordered_json::object();
    for (const auto& [k, v] : a) doc["values"][k] = v;
    return doc.dump(1) + "\n";
}

Assignment import_solution(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(std::string("solution schema violation: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != kSolutionSchema) {
        throw ModelError("solution schema violation: unknown or missing schema version (expected " +
                         std::string(kSolutionSchema) + ")");
    }
    if (!doc.contains("values") || !doc["values"].is_object()) {
        throw ModelError("solution schema violation: 'values' must be an object");
    }
    Assignment a;
    for (const auto& [k, v] : doc["values"].items()) {
        if (!v.is_number()) throw ModelError("solution schema violation: value of '" + k + "' is not a number");
        a[k] = v.get<double>();
    }
    return a;
}

}  // namespace mcdist::ir
