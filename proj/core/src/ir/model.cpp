#include "mcdist/ir/model.hpp"

#include "mcdist/common/errors.hpp"

namespace mcdist::ir {

LinearExpr LinearExpr::variable(int var, double coef) {
    LinearExpr e;
    e.terms.push_back({var, coef});
    return e;
}

LinearExpr& LinearExpr::add(int var, double coef) {
    if (coef != 0.0) terms.push_back({var, coef});
    return *this;
}

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
    for (const auto& t : other.terms) add(t.var, t.coef * scale);
    constant += other.constant * scale;
    return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
    for (auto& t : terms) t.coef *= s;
    constant *= s;
    return *this;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a.add(b); }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a.add(b, -1.0); }
LinearExpr operator*(double s, LinearExpr a) { return a *= s; }
LinearExpr operator-(LinearExpr a) { return a *= -1.0; }

QuadExpr& QuadExpr::add_product(int a, int b, double coef) {
    if (coef != 0.0) quad.push_back({a, b, coef});
    return *this;
}

QuadExpr& QuadExpr::add_product(const LinearExpr& x, const LinearExpr& y, double coef) {
    for (const auto& tx : x.terms) {
        for (const auto& ty : y.terms) add_product(tx.var, ty.var, coef * tx.coef * ty.coef);
        linear.add(tx.var, coef * tx.coef * y.constant);
    }
    for (const auto& ty : y.terms) linear.add(ty.var, coef * ty.coef * x.constant);
    linear.constant += coef * x.constant * y.constant;
    return *this;
}

QuadExpr& QuadExpr::add(const QuadExpr& other, double scale) {
    linear.add(other.linear, scale);
    for (const auto& q : other.quad) add_product(q.a, q.b, q.coef * scale);
    return *this;
}

SocConstraint rotated_soc_to_soc(const RotatedSocConstraint& c) {
    SocConstraint out;
    for (const auto& a : c.args) out.args.push_back(2.0 * a);
    out.args.push_back(c.x1 - c.x2);
    out.bound = c.x1 + c.x2;
    return out;
}

int MathModel::add_variable(const std::string& name, double lb, double ub) {
    if (lookup_.count(name)) throw ModelError("variable '" + name + "' declared twice");
    if (lb > ub) throw ModelError("variable '" + name + "' has lb > ub");
    const int idx = static_cast<int>(variables.size());
    variables.push_back({name, lb, ub});
    lookup_[name] = idx;
    return idx;
}

int MathModel::var(const std::string& name) const {
    if (lookup_.size() != variables.size()) {
        for (std::size_t i = 0; i < variables.size(); ++i) {
            if (variables[i].name == name) return static_cast<int>(i);
        }
        throw ModelError("undeclared variable '" + name + "'");
    }
    auto it = lookup_.find(name);
    if (it == lookup_.end()) throw ModelError("undeclared variable '" + name + "'");
    return it->second;
}

namespace {

void check(const LinearExpr& e, std::size_t n, const std::string& label) {
    for (const auto& t : e.terms) {
        if (t.var < 0 || static_cast<std::size_t>(t.var) >= n) {
            throw ModelError("constraint '" + label + "' references an undeclared variable");
        }
    }
}

void check(const QuadExpr& e, std::size_t n, const std::string& label) {
    check(e.linear, n, label);
    for (const auto& q : e.quad) {
        if (q.a < 0 || q.b < 0 || static_cast<std::size_t>(std::max(q.a, q.b)) >= n) {
            throw ModelError("constraint '" + label + "' references an undeclared variable");
        }
    }
}

}  // namespace

void MathModel::add_linear(const std::string& label, LinearExpr expr, Sense sense, double rhs) {
    check(expr, variables.size(), label);
    constraints.push_back({label, LinearConstraint{std::move(expr), sense, rhs}});
}

void MathModel::add_quadratic(const std::string& label, QuadExpr expr, Sense sense, double rhs) {
    check(expr, variables.size(), label);
    if (expr.is_linear()) {
        add_linear(label, std::move(expr.linear), sense, rhs);
        return;
    }
    constraints.push_back({label, QuadraticConstraint{std::move(expr), sense, rhs}});
}

void MathModel::add_soc(const std::string& label, std::vector<LinearExpr> args, LinearExpr bound) {
    for (const auto& a : args) check(a, variables.size(), label);
    check(bound, variables.size(), label);
    constraints.push_back({label, SocConstraint{std::move(args), std::move(bound)}});
}

void MathModel::add_rotated_soc(const std::string& label, LinearExpr x1, LinearExpr x2,
                                std::vector<LinearExpr> args) {
    for (const auto& a : args) check(a, variables.size(), label);
    check(x1, variables.size(), label);
    check(x2, variables.size(), label);
    constraints.push_back({label, RotatedSocConstraint{std::move(x1), std::move(x2), std::move(args)}});
}

MathModel MathModel::to_conic() const {
    MathModel out = *this;
    for (auto& c : out.constraints) {
        if (auto* r = std::get_if<RotatedSocConstraint>(&c.body)) c.body = rotated_soc_to_soc(*r);
    }
    out.metadata["cone_form"] = "norm";
    return out;
}

bool MathModel::is_linear() const {
    if (!objective.is_linear()) return false;
    for (const auto& c : constraints) {
        if (!std::holds_alternative<LinearConstraint>(c.body)) return false;
    }
    return true;
}

std::map<std::string, std::size_t> MathModel::constraint_counts() const {
    std::map<std::string, std::size_t> out;
    for (const auto& c : constraints) {
        const char* kind = std::visit(
            [](const auto& b) -> const char* {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, LinearConstraint>) return "linear";
                else if constexpr (std::is_same_v<T, QuadraticConstraint>) return "quadratic";
                else if constexpr (std::is_same_v<T, SocConstraint>) return "soc";
                else return "rotated_soc";
            },
            c.body);
        ++out[kind];
    }
    return out;
}

double evaluate(const LinearExpr& e, const std::vector<double>& x) {
    double v = e.constant;
    for (const auto& t : e.terms) v += t.coef * x[static_cast<std::size_t>(t.var)];
    return v;
}

double evaluate(const QuadExpr& e, const std::vector<double>& x) {
    double v = evaluate(e.linear, x);
    for (const auto& q : e.quad) v += q.coef * x[static_cast<std::size_t>(q.a)] * x[static_cast<std::size_t>(q.b)];
    return v;
}

std::vector<double> values_for(const MathModel& model, const Assignment& a) {
    std::vector<double> x;
    x.reserve(model.variables.size());
    for (const auto& v : model.variables) {
        auto it = a.find(v.name);
        if (it == a.end()) throw ModelError("assignment is missing variable '" + v.name + "'");
        x.push_back(it->second);
    }
    return x;
}

}  // namespace mcdist::ir
