#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcdist/ir/model.hpp"

namespace mcdist::ir {

struct ConstraintResidual {
    std::string label;
    double value = 0.0;
};

struct ResidualReport {
    double max = 0.0;
    std::string worst_label;
    std::vector<ConstraintResidual> constraints;
    /// Largest residual per constraint family (label text before '(').
    std::map<std::string, double> by_family;
};

struct ResidualOptions {
    /// Also report variable bound violations, labelled "bound(<name>)".
    bool include_bounds = true;
};

double residual(const Constraint& c, const std::vector<double>& x);

ResidualReport evaluate_residuals(const MathModel& model, const Assignment& a, const ResidualOptions& options = {});

/// Text before the first '(' of a constraint label.
std::string label_family(const std::string& label);

}  // namespace mcdist::ir
