#include <map>

#include "mcdist/common/errors.hpp"
#include "mcdist/lp/lp.hpp"

namespace mcdist::lp {

void LpProblem::check() const {
    const auto n = static_cast<std::size_t>(num_vars);
    const auto m = static_cast<std::size_t>(num_rows);
    if (lb.size() != n || ub.size() != n || cost.size() != n || senses.size() != m || rhs.size() != m) {
        throw ModelError("LP dimensions are inconsistent");
    }
    for (const auto& e : entries) {
        if (e.row < 0 || e.row >= num_rows || e.col < 0 || e.col >= num_vars) {
            throw ModelError("LP coefficient outside the problem dimensions");
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (lb[j] > ub[j]) throw ModelError("LP variable " + std::to_string(j) + " has lb > ub");
    }
}

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "?";
}

LpProblem extract(const ir::MathModel& model) {
    if (!model.objective.is_linear()) throw UnsupportedError("LP solver: the objective is quadratic");
    LpProblem p;
    p.num_vars = static_cast<int>(model.variables.size());
    for (const auto& v : model.variables) {
        p.lb.push_back(v.lb);
        p.ub.push_back(v.ub);
        p.var_names.push_back(v.name);
    }
    p.cost.assign(p.lb.size(), 0.0);
    for (const auto& t : model.objective.linear.terms) p.cost[static_cast<std::size_t>(t.var)] += t.coef;
    p.cost_constant = model.objective.linear.constant;

    for (const auto& c : model.constraints) {
        const ir::LinearExpr* expr = nullptr;
        ir::Sense sense = ir::Sense::Eq;
        double rhs = 0.0;
        if (const auto* lin = std::get_if<ir::LinearConstraint>(&c.body)) {
            expr = &lin->expr;
            sense = lin->sense;
            rhs = lin->rhs;
        } else if (const auto* quad = std::get_if<ir::QuadraticConstraint>(&c.body); quad && quad->expr.is_linear()) {
            expr = &quad->expr.linear;
            sense = quad->sense;
            rhs = quad->rhs;
        } else {
            throw UnsupportedError("LP solver: constraint " + c.label + " is not linear");
        }
        std::map<int, double> row;
        for (const auto& t : expr->terms) row[t.var] += t.coef;
        for (const auto& [col, value] : row) {
            if (value != 0.0) p.entries.push_back({p.num_rows, col, value});
        }
        p.senses.push_back(sense);
        p.rhs.push_back(rhs - expr->constant);
        p.row_labels.push_back(c.label);
        ++p.num_rows;
    }
    p.check();
    return p;
}

}  // namespace mcdist::lp
