#include "mcdist/ir/residuals.hpp"

#include <algorithm>
#include <cmath>

namespace mcdist::ir {

namespace {

double sense_residual(double lhs, Sense sense, double rhs) {
    switch (sense) {
        case Sense::Eq: return std::abs(lhs - rhs);
        case Sense::Le: return std::max(0.0, lhs - rhs);
        case Sense::Ge: return std::max(0.0, rhs - lhs);
    }
    return 0.0;
}

}  // namespace

std::string label_family(const std::string& label) { return label.substr(0, label.find('(')); }

double residual(const Constraint& c, const std::vector<double>& x) {
    struct Visitor {
        const std::vector<double>& x;
        double operator()(const LinearConstraint& l) const { return sense_residual(evaluate(l.expr, x), l.sense, l.rhs); }
        double operator()(const QuadraticConstraint& q) const {
            return sense_residual(evaluate(q.expr, x), q.sense, q.rhs);
        }
        double operator()(const SocConstraint& s) const {
            double sq = 0.0;
            for (const auto& a : s.args) {
                const double v = evaluate(a, x);
                sq += v * v;
            }
            return std::max(0.0, std::sqrt(sq) - evaluate(s.bound, x));
        }
        double operator()(const RotatedSocConstraint& r) const {
            double sq = 0.0;
            for (const auto& a : r.args) {
                const double v = evaluate(a, x);
                sq += v * v;
            }
            const double x1 = evaluate(r.x1, x);
            const double x2 = evaluate(r.x2, x);
            return std::max({0.0, sq - x1 * x2, -x1, -x2});
        }
    };
    return std::visit(Visitor{x}, c.body);
}

ResidualReport evaluate_residuals(const MathModel& model, const Assignment& a, const ResidualOptions& options) {
    const std::vector<double> x = values_for(model, a);
    ResidualReport report;
    auto record = [&](const std::string& label, double r) {
        report.constraints.push_back({label, r});
        auto& fam = report.by_family[label_family(label)];
        fam = std::max(fam, r);
        if (report.worst_label.empty() || r > report.max) {
            report.max = std::max(report.max, r);
            report.worst_label = label;
        }
    };
    for (const auto& c : model.constraints) record(c.label, residual(c, x));
    if (options.include_bounds) {
        for (std::size_t i = 0; i < model.variables.size(); ++i) {
            const auto& v = model.variables[i];
            const double r = std::max({0.0, v.lb - x[i], x[i] - v.ub});
            if (r > 0.0) record("bound(" + v.name + ")", r);
        }
    }
    return report;
}

}  // namespace mcdist::ir
